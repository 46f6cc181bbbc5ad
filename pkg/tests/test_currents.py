"""Current sums checked against brute force, spins, and each other."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critlat.currents import (
    DEFAULT_N_MAX,
    connected_trace,
    current_weight,
    double_current_event,
    double_current_sum,
    even_overlap_trace,
    even_subgraphs,
    hte_correlation,
    parity_class_sums,
    parity_masks,
    simon_report,
    single_current_sum,
    squared_correlation_gap,
    switching_tail_bound,
    truncated_ineq_checks,
    truncation_tail_bound,
    u4_value,
    verify_switching,
)
from critlat.lattice import LatticeGraph, build_box, build_rect
from critlat.oracle import ising_moment, potts_two_point

SQUARE = build_rect((0, 1), (0, 1))
GRID23 = build_rect((0, 1), (0, 2))
PATH2 = LatticeGraph([(0, 0), (1, 0), (2, 0)],
                     [((0, 0), (1, 0)), ((1, 0), (2, 0))])


def test_even_subgraphs_of_cycle():
    # cycle space of the 4-cycle has dimension 1
    assert sorted(even_subgraphs(SQUARE)) == [0, 0b1111]
    # sourceless subgraphs of a tree: only the empty one
    assert list(even_subgraphs(PATH2)) == [0]


def test_parity_masks_adjacent_pair():
    # two arcs join adjacent corners of the cycle
    arcs = parity_masks(SQUARE, [(0, 0), (1, 0)])
    assert len(arcs) == 2
    for mask in arcs:
        deg = [0] * SQUARE.n_vertices
        for k, (u, v) in enumerate(SQUARE.edges):
            if mask >> k & 1:
                deg[SQUARE.vertex_index[u]] += 1
                deg[SQUARE.vertex_index[v]] += 1
    odd = [i for i, d in enumerate(deg) if d % 2]
    assert odd == sorted(SQUARE.vertex_index[x] for x in [(0, 0), (1, 0)])


def test_odd_sources_infeasible():
    assert parity_masks(SQUARE, [(0, 0)]) == []
    with pytest.warns(UserWarning):
        assert hte_correlation(SQUARE, 0.7, [(0, 0)]) == 0.0


def test_current_weight():
    assert current_weight([2, 0, 1], 0.5) == pytest.approx(0.5 ** 3 / 2.0)
    assert current_weight([0, 0], 1.3) == 1.0


def test_parity_class_sums_approach_cosh_sinh():
    c0, c1 = parity_class_sums(0.6, DEFAULT_N_MAX)
    # first omitted terms: j = 10 for the even series, j = 9 for the odd
    assert abs(c0 - math.cosh(0.6)) < 0.6 ** 10 / math.factorial(10) * 2
    assert abs(c1 - math.sinh(0.6)) < 0.6 ** 9 / math.factorial(9) * 2
    c0, c1 = parity_class_sums(0.6, 30)
    assert abs(c0 - math.cosh(0.6)) < 1e-15
    assert abs(c1 - math.sinh(0.6)) < 1e-15


@pytest.mark.parametrize("beta", [0.25, 0.6, 1.1])
def test_hte_matches_spin_oracle(beta):
    for A in ([(0, 0), (1, 2)], [(0, 1), (1, 1)],
              [(0, 0), (1, 0), (0, 2), (1, 2)]):
        hte = hte_correlation(GRID23, beta, A)
        assert abs(hte - ising_moment(GRID23, beta, A)) < 1e-10
        assert hte >= 0.0  # first Griffiths inequality


def test_consistency_triangle():
    # spin moment, tanh-weight ratio, truncated current ratio
    beta, x, y = 0.6, (0, 0), (1, 2)
    spin = potts_two_point(GRID23, 2, beta, x, y)
    hte = hte_correlation(GRID23, beta, [x, y])
    ratio = (single_current_sum(GRID23, [x, y], beta)
             / single_current_sum(GRID23, (), beta))
    deep = (single_current_sum(GRID23, [x, y], beta, n_max=16)
            / single_current_sum(GRID23, (), beta, n_max=16))
    assert abs(spin - hte) < 1e-10
    assert abs(ratio - hte) < 1e-6  # capped at n_max = 8
    assert abs(deep - hte) < 1e-12


def brute_single_sum(graph, A, beta, n_max):
    want = sorted(graph.vertex_index[tuple(x)] for x in A)
    total = 0.0
    for values in itertools.product(range(n_max + 1),
                                    repeat=graph.n_edges):
        deg = [0] * graph.n_vertices
        for k, (u, v) in enumerate(graph.edges):
            deg[graph.vertex_index[u]] += values[k]
            deg[graph.vertex_index[v]] += values[k]
        if [i for i, d in enumerate(deg) if d % 2] == want:
            total += current_weight(values, beta)
    return total


def test_single_current_sum_brute_force():
    for A in ((), [(0, 0), (2, 0)], [(0, 0), (1, 0)]):
        got = single_current_sum(PATH2, A, 0.7, n_max=5)
        assert got == pytest.approx(brute_single_sum(PATH2, A, 0.7, 5),
                                    rel=1e-12)
    got = single_current_sum(SQUARE, [(0, 0), (0, 1)], 0.9, n_max=3)
    assert got == pytest.approx(brute_single_sum(SQUARE, [(0, 0), (0, 1)],
                                                 0.9, 3), rel=1e-12)


def brute_double_sum(graph, A, B, beta, n_max, trace):
    wa = sorted(graph.vertex_index[tuple(x)] for x in A)
    wb = sorted(graph.vertex_index[tuple(x)] for x in B)
    ends = [(graph.vertex_index[u], graph.vertex_index[v])
            for u, v in graph.edges]

    def sources(values):
        deg = [0] * graph.n_vertices
        for k, (a, b) in enumerate(ends):
            deg[a] += values[k]
            deg[b] += values[k]
        return [i for i, d in enumerate(deg) if d % 2]

    space = list(itertools.product(range(n_max + 1), repeat=graph.n_edges))
    ones = [(v, current_weight(v, beta)) for v in space if sources(v) == wa]
    twos = [(v, current_weight(v, beta)) for v in space if sources(v) == wb]
    total = 0.0
    for v1, w1 in ones:
        for v2, w2 in twos:
            supp = 0
            for k in range(graph.n_edges):
                if v1[k] + v2[k] > 0:
                    supp |= 1 << k
            total += w1 * w2 * (1.0 if trace is None else trace[supp])
    return total


@pytest.mark.parametrize("A,B", [((), ()),
                                 ([(0, 0), (1, 0)], [(0, 0), (0, 1)]),
                                 ([(0, 0), (1, 0)], ())])
def test_double_current_sum_brute_force(A, B):
    rng = np.random.default_rng(5)
    trace = rng.random(1 << SQUARE.n_edges)
    got = double_current_sum(SQUARE, A, B, 0.8, n_max=3, trace=trace)
    want = brute_double_sum(SQUARE, A, B, 0.8, 3, trace)
    assert got == pytest.approx(want, rel=1e-12)
    got = double_current_sum(SQUARE, A, B, 0.8, n_max=3)
    want = brute_double_sum(SQUARE, A, B, 0.8, 3, None)
    assert got == pytest.approx(want, rel=1e-12)


def brute_switch_sides(graph, A, B, beta, n_max, trace):
    """Pairs capped by the sum n1 + n2 <= n_max per edge."""
    wa = sorted(graph.vertex_index[tuple(x)] for x in A)
    wb = sorted(graph.vertex_index[tuple(x)] for x in B)
    wx = sorted(graph.vertex_index[tuple(x)]
                for x in set(map(tuple, A)) ^ set(map(tuple, B)))
    ends = [(graph.vertex_index[u], graph.vertex_index[v])
            for u, v in graph.edges]
    fb = even_overlap_trace(graph, B)

    def sources(values):
        deg = [0] * graph.n_vertices
        for k, (a, b) in enumerate(ends):
            deg[a] += values[k]
            deg[b] += values[k]
        return [i for i, d in enumerate(deg) if d % 2]

    space = list(itertools.product(range(n_max + 1), repeat=graph.n_edges))
    lhs = rhs = 0.0
    for v1 in space:
        for v2 in space:
            s = [a + b for a, b in zip(v1, v2)]
            if max(s) > n_max:
                continue
            supp = sum(1 << k for k, t in enumerate(s) if t > 0)
            w = (current_weight(v1, beta) * current_weight(v2, beta)
                 * (1.0 if trace is None else trace[supp]))
            s1 = sources(v1)
            if s1 == wa and sources(v2) == wb:
                lhs += w
            if s1 == wx and sources(v2) == [] and fb[supp]:
                rhs += w
    return lhs, rhs


def test_switching_sides_brute_force():
    rng = np.random.default_rng(11)
    trace = rng.random(1 << SQUARE.n_edges)
    A, B = [(0, 0), (1, 0)], [(0, 0), (1, 1)]
    for tr in (None, trace):
        rep = verify_switching(SQUARE, A, B, 0.8, n_max=3, trace=tr)
        lhs, rhs = brute_switch_sides(SQUARE, A, B, 0.8, 3, tr)
        assert rep["lhs"] == pytest.approx(lhs, rel=1e-12)
        assert rep["rhs"] == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("graph", [SQUARE, GRID23], ids=["cycle4", "grid23"])
@pytest.mark.parametrize("beta", [0.3, 0.6])
def test_switching_identity(graph, beta):
    verts = graph.vertices
    A = [verts[0], verts[1]]
    B = [verts[0], verts[-1]]
    rep = verify_switching(graph, A, B, beta)
    assert rep["ok"]
    assert rep["gap"] <= 1e-8
    assert rep["gap"] <= rep["tail_bound"]


def test_switching_with_trace_functional():
    trace = connected_trace(SQUARE, (0, 0), (1, 1))
    rep = verify_switching(SQUARE, [(0, 0), (1, 0)], [(0, 0), (1, 0)],
                           0.6, trace=trace)
    assert rep["ok"] and rep["gap"] <= 1e-8


def test_switching_values_functional():
    # F reads the actual multiplicities of n1 + n2, not just the trace
    def values_fn(vals):
        return np.exp(-0.1 * vals.sum(axis=0))

    rep = verify_switching(SQUARE, [(0, 0), (1, 0)], [(0, 1), (1, 1)],
                           0.7, values_fn=values_fn)
    assert rep["ok"] and rep["gap"] <= 1e-8


def test_switching_gap_stays_at_roundoff():
    # the capped multigraph family is closed under source swapping, so
    # the gap never grows with the cap
    for n in (2, 4, 6, 8):
        rep = verify_switching(SQUARE, [(0, 0), (1, 0)], [(0, 1), (1, 1)],
                               0.9, n_max=n)
        assert rep["gap"] <= 1e-12
        assert rep["gap"] <= rep["tail_bound"]


def test_squared_correlation_gap_shrinks_with_n_max():
    gaps = [squared_correlation_gap(SQUARE, (0, 0), (1, 1), 0.9,
                                    n_max=n)[0]
            for n in (2, 4, 6, 8)]
    for lo, hi in zip(gaps[1:], gaps):
        assert lo <= hi + 1e-15
    assert gaps[-1] < gaps[0]


@settings(max_examples=25, deadline=None)
@given(beta=st.floats(0.05, 0.9),
       ia=st.integers(1, 3), ib=st.integers(1, 3))
def test_switching_gap_below_tail(beta, ia, ib):
    A = [SQUARE.vertices[0], SQUARE.vertices[ia]]
    B = [SQUARE.vertices[0], SQUARE.vertices[ib]]
    rep = verify_switching(SQUARE, A, B, beta)
    assert rep["gap"] <= max(rep["tail_bound"], 1e-12)


def test_tail_bounds_decrease():
    for bound in (truncation_tail_bound, switching_tail_bound):
        tails = [bound(SQUARE, 0.6, n) for n in (2, 4, 8, 12, 16)]
        assert tails == sorted(tails, reverse=True)
        assert tails[-1] < 1e-8


def test_multigraph_cap_refused():
    with pytest.raises(ValueError, match="refusing"):
        verify_switching(build_box(2), [(0, 0), (1, 0)],
                         [(0, 0), (0, 1)], 0.5)


def test_squared_correlation_is_sourceless_connection():
    for graph, x, y in ((SQUARE, (0, 0), (1, 1)),
                        (GRID23, (0, 0), (1, 2))):
        gap, tail = squared_correlation_gap(graph, x, y, 0.5)
        assert gap <= max(tail, 1e-10)
        assert gap <= 1e-8


def test_double_current_event_bounds():
    trace = even_overlap_trace(SQUARE, [(0, 0), (1, 1)])
    prob, tail = double_current_event(SQUARE, [(0, 0), (1, 1)], 0.6,
                                      trace=trace)
    assert 0.0 <= prob <= 1.0
    sure, _ = double_current_event(SQUARE, (), 0.6)
    assert sure == 1.0


def test_u4_nonpositive():
    quad = [(0, 0), (1, 0), (0, 2), (1, 1)]
    for beta in (0.2, 0.6, 1.3):
        assert u4_value(GRID23, beta, quad) <= 1e-12


def test_simon_inequality_and_witness():
    grid = build_rect((0, 2), (0, 1))
    rep = simon_report(grid, 0.5, (0, 0), (2, 1), [(1, 0), (1, 1)])
    assert rep["ok"] and rep["slack"] >= -1e-12
    with pytest.raises(ValueError, match="open path"):
        simon_report(grid, 0.5, (0, 0), (2, 1), [(1, 0)])


def test_simon_equality_on_tree():
    # correlations factorize through the middle vertex of a path
    rep = simon_report(PATH2, 0.8, (0, 0), (2, 0), [(1, 0)])
    assert abs(rep["lhs"] - rep["rhs"]) < 1e-12
    assert abs(rep["lhs"] - math.tanh(0.8) ** 2) < 1e-12


def test_truncated_ineq_checks():
    rep = truncated_ineq_checks(GRID23, 0.6,
                                [(0, 0), (1, 0), (0, 2), (1, 1)],
                                ((0, 0), (1, 2), [(0, 1), (1, 1)]))
    assert rep["ok"] and rep["u4_ok"] and rep["simon"]["ok"]
