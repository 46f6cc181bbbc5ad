import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critlat.lattice import (
    LatticeGraph,
    PercolationConfig,
    UnionFind,
    RollbackUnionFind,
    boundary_arcs,
    boundary_cycle,
    build_box,
    build_rect,
    cluster_stats,
    crossing_detect,
    custom_bc,
    dobrushin_bc,
    dual_map,
    free_bc,
    medial_domain,
    read_graph,
    wired_bc,
    write_graph,
)


def all_configs(n_edges):
    return itertools.product((0, 1), repeat=n_edges)


# ---------------------------------------------------------------------------
# boxes, boundaries, clusters


def test_box_sizes():
    g = build_box(0, 2)
    assert g.n_vertices == 1 and g.n_edges == 0
    g = build_box(1, 2)
    assert g.n_vertices == 9 and g.n_edges == 12
    assert len(g.boundary()) == 8
    g = build_box(2, 2)
    assert g.n_vertices == 25 and g.n_edges == 40
    g = build_box(1, 3)
    assert g.n_vertices == 27 and g.n_edges == 54


def test_cluster_counts_lambda1():
    g = build_box(1, 2)
    closed = (0,) * g.n_edges
    k_free, labels = cluster_stats(g, closed, free_bc(g))
    assert k_free == 9
    assert len(set(labels)) == 9
    k_wired, _ = cluster_stats(g, closed, wired_bc(g))
    assert k_wired == 2


def test_cluster_labels_deterministic():
    g = build_box(1, 2)
    ones = (1,) * g.n_edges
    _, labels = cluster_stats(g, ones, free_bc(g))
    assert set(labels) == {0}


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 12 - 1), st.data())
def test_cluster_count_monotone_in_bc(mask, data):
    # wiring more can only merge clusters: k_wired <= k_xi <= k_free,
    # and the gap is at most |boundary| - 1
    g = build_box(1, 2)
    bits = tuple((mask >> k) & 1 for k in range(g.n_edges))
    k_free, _ = cluster_stats(g, bits, free_bc(g))
    k_wired, _ = cluster_stats(g, bits, wired_bc(g))
    bd = list(g.boundary())
    cut = data.draw(st.integers(min_value=1, max_value=len(bd)))
    k_mid, _ = cluster_stats(g, bits, custom_bc(g, (bd[:cut],)))
    assert k_wired <= k_mid <= k_free
    assert k_free - k_wired <= len(bd) - 1


def test_union_find_roots_are_minima():
    uf = UnionFind(6)
    uf.union(5, 3)
    uf.union(3, 4)
    assert uf.find(5) == 3 and uf.find(4) == 3
    uf.union(0, 5)
    assert uf.find(4) == 0
    assert uf.n_classes() == 3


def test_rollback_union_find():
    uf = RollbackUnionFind(5)
    assert uf.union(0, 1) and uf.n_classes == 4
    assert not uf.union(1, 0) and uf.n_classes == 4
    uf.union(2, 3)
    assert uf.n_classes == 3
    uf.undo()
    assert uf.n_classes == 4 and not uf.connected(2, 3)
    uf.undo()  # the failed union
    uf.undo()
    assert uf.n_classes == 5 and not uf.connected(0, 1)


def test_percolation_config_mask_roundtrip():
    c = PercolationConfig.from_mask(0b1011, 5)
    assert c.bits == (1, 1, 0, 1, 0)
    assert c.mask() == 0b1011
    assert c.n_open() == 3 and c.n_closed() == 2


# ---------------------------------------------------------------------------
# planar duality


def test_dual_unit_square():
    g = build_rect((0, 1), (0, 1))
    assert g.n_edges == 4
    dual, conf = dual_map(g, (1, 0, 0, 1))
    assert len(dual.edges) == 4
    assert conf.bits == (0, 1, 1, 0)
    # one bounded face plus the outer one
    assert len(dual.vertices) == 2


def test_dual_involution_and_euler_counts():
    import random

    rng = random.Random(7)
    g = build_box(2, 2)
    for _ in range(25):
        bits = tuple(rng.randint(0, 1) for _ in range(g.n_edges))
        dual, dconf = dual_map(g, bits)
        assert len(dual.edges) == g.n_edges
        assert sum(bits) + dconf.n_open() == g.n_edges
        back, bconf = dual_map(dual, dconf)
        assert back is g
        assert bconf.bits == bits


def test_dual_rejects_3d():
    g = build_box(1, 3)
    with pytest.raises(ValueError):
        dual_map(g, (0,) * g.n_edges)


# ---------------------------------------------------------------------------
# crossings and their duality


def dual_rect_config(n, graph, bits):
    """The dual of R_n = [0,n] x [0,n-1] for vertical dual crossings: faces
    (i,j) with 0 <= i <= n-1, -1 <= j <= n-1; strips j = -1 and j = n-1 are
    the split outer face and connect horizontally for free."""
    verts = [(i, j) for i in range(n) for j in range(-1, n)]
    edges, state = [], {}
    for i in range(n):
        for j in range(-1, n - 1):
            e = ((i, j), (i, j + 1))
            edges.append(e)
            k = graph.edge_index[((i, j + 1), (i + 1, j + 1))]
            state[e] = 1 - bits[k]
    for i in range(n - 1):
        for j in range(-1, n):
            e = ((i, j), (i + 1, j))
            edges.append(e)
            if j in (-1, n - 1):
                state[e] = 1
            else:
                k = graph.edge_index[((i + 1, j), (i + 1, j + 1))]
                state[e] = 1 - bits[k]
    dg = LatticeGraph(verts, edges)
    conf = [0] * dg.n_edges
    for e, b in state.items():
        conf[dg.edge_index[tuple(sorted(e))]] = b
    return dg, tuple(conf)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_crossing_duality_exhaustive(n):
    # a horizontal open crossing of [0,n] x [0,n-1] exists iff no vertical
    # dual-open crossing of the shifted rectangle does
    g = build_rect((0, n), (0, n - 1))
    rect = (0, 0, n, n - 1)
    for bits in all_configs(g.n_edges):
        h = crossing_detect(g, bits, rect, "horizontal")
        dg, dconf = dual_rect_config(n, g, bits)
        v = crossing_detect(dg, dconf, (0, -1, n - 1, n - 1), "vertical")
        assert h != v


def test_crossing_rect_rounding():
    g = build_rect((0, 2), (0, 1))
    ladder = tuple(1 if u[1] == v[1] == 0 else 0
                   for u, v in g.edges)
    assert crossing_detect(g, ladder, (0, 0, 2, 1), "horizontal")
    assert crossing_detect(g, ladder, (0.0, 1.4, 2.0, 1.9), "horizontal") is False
    assert not crossing_detect(g, ladder, (0, 0, 2, 1), "vertical")


# ---------------------------------------------------------------------------
# Dobrushin domains: the diamond fixtures, traced by hand

# the 2x2 block [0,1] x [-1,0]; in the diagonal embedding its four vertices
# become the black diamond P1=(0,0), P2=(1,1), P3=(2,0), P4=(1,-1)
DIAMOND = build_rect((0, 1), (-1, 0))
P1, P2, P3, P4 = (0, 0), (1, 0), (1, -1), (0, -1)


def test_diamond_walk_is_ccw():
    walk = boundary_cycle(DIAMOND)
    verts = [DIAMOND.vertices[u] for u, _ in walk]
    i = verts.index(P1)
    assert verts[i:] + verts[:i] == [P1, P4, P3, P2]


def test_domain_fixture_one_arc_edge():
    # a = P1, b = P4: one free edge P1-P4, wired arc P4-P3-P2-P1
    dom = medial_domain(DIAMOND, P1, P4)
    assert dom.rotation == 0
    assert [DIAMOND.edges[k] for k in dom.free_edges] == [(P4, P1)]
    assert dom.medial_of_edge[dom.free_edges[0]] == (1, 0)
    assert dom.forced_primal == {(2, 0), (2, 1), (1, 1)}
    assert dom.forced_dual == {(0, 0), (1, -1)}
    assert dom.abstar_whites == ((-1, 0), (0, -1), (1, -2))
    assert dom.e_a == ((0, 1), (0, 0))
    assert dom.e_b == ((1, -1), (2, -1))
    assert dom.v_count() == 1


def test_domain_fixture_two_arc_edges():
    # a = P1, b = P3: free edges P1-P4 and P4-P3, wired arc P3-P2-P1
    dom = medial_domain(DIAMOND, P1, P3)
    assert dom.rotation == 3
    assert dom.e_b[1][0] - dom.e_b[0][0] == 1 and dom.e_b[0][1] == dom.e_b[1][1]
    assert dom.e_b == ((0, -2), (1, -2))
    assert dom.e_a == ((1, 1), (0, 1))
    assert dom.forced_primal == {(1, -1), (1, 0)}
    assert dom.forced_dual == {(0, 1), (-1, 0), (-1, -1), (0, -2)}
    assert len(dom.abstar_whites) == 5
    assert dom.v_count() == 2


def test_domain_degenerate_marked_point():
    # a = b: no wired edges, the hugging arc wraps the boundary but leaves
    # the side of black(a) facing the two missing neighbours open, so the
    # marked edges are anti-parallel on the flanking sides
    square = build_rect((0, 1), (0, 1))
    dom = medial_domain(square, (0, 0), (0, 0))
    assert dom.ba_edges == ()
    assert len(dom.free_edges) == 4
    assert dom.rotation == 1
    assert dom.e_b == ((0, 0), (1, 0))
    assert dom.e_a == ((1, 1), (0, 1))
    assert len(dom.abstar_whites) == 7
    assert len(dom.forced_dual) == 6
    assert dom.forced_primal == frozenset()
    assert dom.v_count() == 4


def half_diamond(n):
    vs = [(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)
          if abs(x) + abs(y) <= n and x + y <= 0]
    vset = set(vs)
    es = [(v, (v[0] + dx, v[1] + dy)) for v in vs for dx, dy in ((1, 0), (0, 1))
          if (v[0] + dx, v[1] + dy) in vset]
    return LatticeGraph(vs, es)


def test_boundary_walk_with_leaves():
    # the half-diamond has degree-1 tips; the outer walk traverses their
    # edges twice, which the arc split must tolerate when a and b are
    # unambiguous
    g = half_diamond(3)
    ab_v, ba_v, ab_e, ba_e = boundary_arcs(g, (0, 0), (0, 0))
    assert ba_e == ()
    assert len(ab_e) == 16
    assert ab_v[0] == ab_v[-1] == (0, 0)
    assert ab_v.count((0, -2)) == 2  # leaf neighbour revisited

    dom = medial_domain(g, (0, 0), (0, 0))
    assert len(dom.free_edges) == 18
    assert dom.e_a == ((1, 1), (0, 1))
    assert dom.e_b == ((0, 0), (1, 0))
    assert dom.v_count() == 14


def test_domain_rejects_bad_input():
    with pytest.raises(ValueError):
        medial_domain(DIAMOND, (5, 5), P1)
    # a domain with a hole has a disconnected complement
    ring = [(x, y) for x in range(3) for y in range(3) if (x, y) != (1, 1)]
    edges = [(u, v) for u in ring for v in ring
             if u < v and abs(u[0] - v[0]) + abs(u[1] - v[1]) == 1]
    with pytest.raises(ValueError):
        medial_domain(LatticeGraph(ring, edges), (0, 0), (2, 2))


def test_dobrushin_bc_wires_ba_arc():
    bc = dobrushin_bc(DIAMOND, P1, P4)
    sizes = sorted(len(b) for b in bc.blocks)
    assert sizes == [4]
    bc = dobrushin_bc(DIAMOND, P1, P3)
    assert sorted(len(b) for b in bc.blocks) == [1, 3]


def test_boundary_arcs_box():
    g = build_box(2, 2)
    ab_v, ba_v, ab_e, ba_e = boundary_arcs(g, (-2, -2), (2, 2))
    assert len(ab_e) + len(ba_e) == 16
    assert ab_v[0] == (-2, -2) and ab_v[-1] == (2, 2)
    assert ba_v[0] == (2, 2) and ba_v[-1] == (-2, -2)
    assert len(ab_e) == 8 and len(ba_e) == 8


# ---------------------------------------------------------------------------
# file format


def test_graph_file_roundtrip(tmp_path):
    path = tmp_path / "dom.graph"
    write_graph(path, DIAMOND, a=P1, b=P3)
    g, a, b = read_graph(path)
    assert g.vertices == DIAMOND.vertices
    assert g.edges == DIAMOND.edges
    assert (a, b) == (P1, P3)
