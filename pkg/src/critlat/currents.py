"""High-temperature expansion and the random-current representation.

Currents assign a nonnegative integer to every edge with weight
w_beta(n) = prod_e beta^{n_e}/n_e!; only the source set (odd-incidence
vertices) and the trace (edges with n_e > 0) ever enter the identities, so
sums over currents factorize through per-edge parity classes: with entries
capped at n_max, the even and odd entry sums are the truncated cosh and
sinh series c0 and c1. A pair of currents is then a pair of subgraphs
carrying the parities plus a choice of extra supported edges where both
entries are even and positive, with per-edge factors c1*c1, c1*c0 and
c0*c0 - 1. Trace functionals are arrays indexed by support mask, summed
over supersets with a weighted zeta transform.

Two truncated ensembles appear. Event probabilities cap each current at
n_max separately (parity-class compression as above). The switching check
instead caps the summed multigraph n1 + n2 at n_max per edge: source
swapping redistributes a total it preserves, so that family is closed
under the bijection and the identity holds exactly on it, while a
per-current cap leaks mass through the swap and the leak (not the
identity) would dominate the reported gap. Either way every enumerated
current has entries <= n_max and every report carries an explicit
factorial tail bound on the discarded mass.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .lattice import free_bc
from .oracle import connectivity_event, even_overlap_event, ising_moment

DEFAULT_N_MAX = 8


def parity_masks(graph, sources):
    """All edge subsets whose odd-degree vertex set equals sources."""
    idx = sorted(graph.vertex_index[tuple(x)] for x in sources)
    if len(set(idx)) != len(idx):
        raise ValueError("sources must be distinct vertices")
    m = graph.n_edges
    masks = np.arange(1 << m, dtype=np.int64)
    par = np.zeros((1 << m, graph.n_vertices), dtype=np.uint8)
    for k, (u, v) in enumerate(graph.edges):
        bit = ((masks >> k) & 1).astype(np.uint8)
        par[:, graph.vertex_index[u]] ^= bit
        par[:, graph.vertex_index[v]] ^= bit
    want = np.zeros(graph.n_vertices, dtype=np.uint8)
    want[idx] = 1
    hit = (par == want).all(axis=1)
    return [int(f) for f in masks[hit]]


def even_subgraphs(graph, sources=()):
    """Iterator of edge masks eta with boundary d(eta) = sources."""
    return iter(parity_masks(graph, sources))


def hte_correlation(graph, beta, A):
    """tanh-weight ratio sum_{d eta = A} / sum_{d eta = empty}.

    Equals the Ising moment E[sigma_A] at inverse temperature beta; odd |A|
    gives 0 (with a warning, the sum is empty by parity).
    """
    if len(A) % 2 == 1:
        warnings.warn("odd source sets have no even-subgraph expansion")
        return 0.0
    t = math.tanh(beta)
    num = sum(t ** bin(mask).count("1") for mask in parity_masks(graph, A))
    den = sum(t ** bin(mask).count("1") for mask in parity_masks(graph, ()))
    return num / den


def current_weight(values, beta):
    """w_beta(n) = prod_e beta^{n_e} / n_e!."""
    out = 1.0
    for v in values:
        out *= beta ** v / math.factorial(v)
    return out


def parity_class_sums(beta, n_max):
    """(c0, c1): truncated even and odd sums of beta^j/j!."""
    c0 = sum(beta ** j / math.factorial(j) for j in range(0, n_max + 1, 2))
    c1 = sum(beta ** j / math.factorial(j) for j in range(1, n_max + 1, 2))
    return c0, c1


def truncation_tail_bound(graph, beta, n_max):
    """Upper bound on the effect of capping double-current entries.

    Each of the two currents can exceed the cap on any edge; the missing
    mass per edge is at most beta^{n_max+1}/(n_max+1)! e^beta, and the
    remaining edge sums are each at most e^beta.
    """
    m = graph.n_edges
    t1 = beta ** (n_max + 1) / math.factorial(n_max + 1) * math.exp(beta)
    return 2.0 * m * t1 * math.exp(beta * (2 * m - 1))


def single_current_sum(graph, A, beta, n_max=DEFAULT_N_MAX):
    """sum over d(n) = A, entries <= n_max, of w_beta(n)."""
    c0, c1 = parity_class_sums(beta, n_max)
    m = graph.n_edges
    return sum(c1 ** bin(mask).count("1") * c0 ** (m - bin(mask).count("1"))
               for mask in parity_masks(graph, A))


def _superset_transform(values, g):
    """T[x] = sum over S >= x of g^(|S \\ x|) values[S], all x at once."""
    out = np.array(values, dtype=float)
    n = len(out).bit_length() - 1
    masks = np.arange(len(out))
    for b in range(n):
        lower = np.nonzero(((masks >> b) & 1) == 0)[0]
        out[lower] += g * out[lower | (1 << b)]
    return out


def double_current_sum(graph, A, B, beta, n_max=DEFAULT_N_MAX, trace=None):
    """sum over d(n1)=A, d(n2)=B, entries <= n_max of w(n1)w(n2)F(trace).

    trace is an array over support masks of n1+n2 (None for F = 1). Exact
    for the capped ensemble: parities are carried by two subgraphs, every
    extra supported edge has both entries even and positive.
    """
    c0, c1 = parity_class_sums(beta, n_max)
    g_both, g_one, g_extra = c1 * c1, c1 * c0, c0 * c0 - 1.0
    m = graph.n_edges
    if trace is not None:
        transformed = _superset_transform(trace, g_extra)
    total = 0.0
    masks_b = parity_masks(graph, B)
    for m1 in parity_masks(graph, A):
        for m2 in masks_b:
            forced = m1 | m2
            base = 1.0
            for k in range(m):
                bit = 1 << k
                if forced & bit:
                    base *= g_both if (m1 & bit and m2 & bit) else g_one
            if trace is None:
                free = m - bin(forced).count("1")
                total += base * (1.0 + g_extra) ** free
            else:
                total += base * transformed[forced]
    return total


def connected_trace(graph, x, y):
    """Trace functional: x and y joined by supported edges."""
    return connectivity_event(graph, free_bc(graph), x, y).astype(float)


def even_overlap_trace(graph, B):
    """Trace functional F_B: every supported cluster meets B evenly."""
    return even_overlap_event(graph, free_bc(graph), B).astype(float)


MULTIGRAPH_CAP = 8_000_000


def _split_tables(n_max):
    """T[par, t] = sum over a <= t, a = par mod 2, of 1/(a! (t-a)!)."""
    table = np.zeros((2, n_max + 1))
    for t in range(n_max + 1):
        for a in range(t + 1):
            table[a & 1, t] += 1.0 / (math.factorial(a)
                                      * math.factorial(t - a))
    return table


def _multigraph_values(graph, n_max):
    """Per-edge value columns of all multigraphs with entries <= n_max."""
    m = graph.n_edges
    count = (n_max + 1) ** m
    if count > MULTIGRAPH_CAP:
        raise ValueError("refusing to enumerate %d multigraphs" % count)
    idx = np.arange(count, dtype=np.int64)
    return [((idx // (n_max + 1) ** e) % (n_max + 1)).astype(np.int8)
            for e in range(m)]


def _split_weights(graph, sources, vals, table):
    """sum over n1 <= s with d(n1) = sources of prod_e 1/(n1_e!(s_e-n1_e)!).

    The complementary current s - n1 inherits its source set from parity,
    and T[1, 0] = 0 confines both currents to the support automatically.
    """
    total = np.zeros(len(vals[0]))
    for pi in parity_masks(graph, sources):
        term = np.ones(len(vals[0]))
        for e in range(graph.n_edges):
            term *= table[(pi >> e) & 1][vals[e]]
        total += term
    return total


def switching_tail_bound(graph, beta, n_max):
    """Mass discarded by capping n1 + n2 at n_max per edge.

    Per edge the pair weights sum to (2 beta)^s / s! over the total s, so
    the cut tail is at most beta^{n_max+1}/(n_max+1)! times a graph factor.
    """
    m = graph.n_edges
    factor = m * 2.0 ** (n_max + 1) * math.exp(2.0 * beta * m)
    return beta ** (n_max + 1) / math.factorial(n_max + 1) * factor


def verify_switching(graph, A, B, beta, n_max=DEFAULT_N_MAX, trace=None,
                     values_fn=None):
    """Both sides of the source-swapping identity over capped multigraphs.

    LHS: sum over d(n1)=A, d(n2)=B of w(n1)w(n2) F(n1+n2).
    RHS: the same with sources A xor B and none, times 1[trace in F_B].
    Pairs are enumerated through their sum s (entries <= n_max) with split
    weights per source set, so both sides see the same multigraphs and the
    gap measures agreement of two independent parity enumerations. F is
    the sure event, or an array over support masks (trace=), or a
    vectorized callable on the (n_edges, count) value matrix (values_fn=).
    """
    m = graph.n_edges
    vals = _multigraph_values(graph, n_max)
    count = len(vals[0])
    a_xor_b = sorted(set(map(tuple, A)) ^ set(map(tuple, B)))

    # d(n1) + d(n2) = d(n1 + n2): only multigraphs with source set A xor B
    # contribute to either side
    pmask = np.zeros(count, dtype=np.int64)
    for e in range(m):
        pmask |= (vals[e].astype(np.int64) & 1) << e
    feasible = np.zeros(1 << m, dtype=bool)
    feasible[parity_masks(graph, a_xor_b)] = True
    keep = feasible[pmask]
    vals = [v[keep] for v in vals]

    smask = np.zeros(len(vals[0]), dtype=np.int64)
    tot = np.zeros(len(vals[0]), dtype=np.int32)
    for e in range(m):
        smask |= (vals[e] > 0).astype(np.int64) << e
        tot += vals[e]
    w = beta ** tot.astype(float)

    table = _split_tables(n_max)
    w_ab = _split_weights(graph, A, vals, table)
    w_xor = _split_weights(graph, a_xor_b, vals, table)
    if values_fn is not None:
        f = np.asarray(values_fn(np.stack(vals).astype(np.int32)), float)
    elif trace is not None:
        f = np.asarray(trace, float)[smask]
    else:
        f = np.ones(len(vals[0]))
    fb = even_overlap_trace(graph, B)[smask]

    lhs = float(np.sum(w * w_ab * f))
    rhs = float(np.sum(w * w_xor * f * fb))
    tail = switching_tail_bound(graph, beta, n_max)
    gap = abs(lhs - rhs)
    scale = max(1.0, abs(lhs), abs(rhs))
    return {"lhs": lhs, "rhs": rhs, "gap": gap, "tail_bound": tail,
            "n_max": n_max, "ok": bool(gap <= 1e-12 * scale)}


def double_current_event(graph, B, beta, n_max=DEFAULT_N_MAX, trace=None):
    """P^B[event on the trace] for the two-current measure d(n1)=B, d(n2)=0.

    Returns (probability, tail_bound); trace None means the sure event.
    """
    tail = truncation_tail_bound(graph, beta, n_max)
    if trace is None:
        return 1.0, tail
    den = double_current_sum(graph, B, (), beta, n_max, None)
    num = double_current_sum(graph, B, (), beta, n_max, trace)
    return num / den, tail


def squared_correlation_gap(graph, x, y, beta, n_max=DEFAULT_N_MAX):
    """|mu^f[sigma_x sigma_y]^2 - P^0[x <-> y in the trace]|."""
    mu = ising_moment(graph, beta, [x, y])
    prob, tail = double_current_event(graph, (), beta, n_max,
                                      connected_trace(graph, x, y))
    return abs(mu * mu - prob), tail


# ---------------------------------------------------------------------------
# correlation inequalities via the spin oracle


def u4_value(graph, beta, xs):
    """Lebowitz's fourth Ursell combination, nonpositive for the Ising model.

    U4 = E[s1 s2 s3 s4] - E[s1 s2]E[s3 s4] - E[s1 s3]E[s2 s4]
         - E[s1 s4]E[s2 s3].
    """
    x1, x2, x3, x4 = [tuple(x) for x in xs]
    m = ising_moment
    return (m(graph, beta, [x1, x2, x3, x4])
            - m(graph, beta, [x1, x2]) * m(graph, beta, [x3, x4])
            - m(graph, beta, [x1, x3]) * m(graph, beta, [x2, x4])
            - m(graph, beta, [x1, x4]) * m(graph, beta, [x2, x3]))


def _separates(graph, S, x, z):
    """True when removing S disconnects x from z; else a path witness."""
    blocked = {graph.vertex_index[tuple(v)] for v in S}
    ix, iz = graph.vertex_index[tuple(x)], graph.vertex_index[tuple(z)]
    if ix in blocked or iz in blocked:
        raise ValueError("endpoints must lie outside the separating set")
    prev = {ix: None}
    stack = [ix]
    while stack:
        v = stack.pop()
        if v == iz:
            path = []
            while v is not None:
                path.append(graph.vertices[v])
                v = prev[v]
            return path[::-1]
        for w, _ in graph.adjacency[v]:
            if w not in blocked and w not in prev:
                prev[w] = v
                stack.append(w)
    return True


def simon_report(graph, beta, x, z, S):
    """Simon's inequality across a separating set S.

    mu[sigma_x sigma_z] <= sum_{y in S} mu[sigma_x sigma_y]
    mu[sigma_y sigma_z]; S must disconnect x from z in the graph.
    """
    sep = _separates(graph, S, x, z)
    if sep is not True:
        raise ValueError("S does not separate: open path %r" % (sep,))
    lhs = ising_moment(graph, beta, [x, z])
    rhs = sum(ising_moment(graph, beta, [x, y])
              * ising_moment(graph, beta, [y, z]) for y in S)
    return {"lhs": lhs, "rhs": rhs, "slack": rhs - lhs,
            "ok": bool(lhs <= rhs + 1e-12)}


def truncated_ineq_checks(graph, beta, quad, simon_args):
    """Combined U4 and Simon report (simon_args = (x, z, S))."""
    x, z, S = simon_args
    simon = simon_report(graph, beta, x, z, S)
    u4 = u4_value(graph, beta, quad)
    return {"u4": u4, "u4_ok": bool(u4 <= 1e-12), "simon": simon,
            "ok": bool(u4 <= 1e-12 and simon["ok"])}
