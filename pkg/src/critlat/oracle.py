"""Exact enumeration oracles for random-cluster and Potts measures.

Everything here is brute force over all 2^|E| edge configurations (or q^|V|
spin configurations) with exact bookkeeping; it is the ground truth that the
samplers, observables and transfer matrices are tested against. The
configuration tree is walked with a rollback union-find so cluster counts are
maintained incrementally instead of being recomputed at every leaf.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .lattice import RollbackUnionFind, UnionFind, free_bc

# hard cap on enumerable edge sets; 2^26 leaves is already minutes of work
MAX_ENUM_EDGES = 26

# above this many edges the weights p^o (1-p)^c q^k can leave double range,
# so accumulation switches to log space by default
LOG_DOMAIN_EDGE_THRESHOLD = 20


def scan_configs(graph, bc, leaf):
    """Depth-first walk over all 2^|E| configurations.

    leaf(mask, uf) is called once per configuration; bit k of mask is the
    state of edge k and uf is a rollback union-find over vertex indices with
    the open edges and the bc blocks merged.
    """
    n = graph.n_edges
    if n > MAX_ENUM_EDGES:
        raise ValueError("refusing to enumerate more than %d edges" % MAX_ENUM_EDGES)
    uf = RollbackUnionFind(graph.n_vertices)
    for block in bc.blocks:
        for i in block[1:]:
            uf.union(block[0], i)
    ends = [(graph.vertex_index[u], graph.vertex_index[v]) for u, v in graph.edges]

    def rec(k, mask):
        if k == n:
            leaf(mask, uf)
            return
        rec(k + 1, mask)
        uf.union(*ends[k])
        rec(k + 1, mask | (1 << k))
        uf.undo()

    rec(0, 0)


def cluster_count_array(graph, bc):
    """k(omega^xi) for every configuration mask."""
    out = np.zeros(1 << graph.n_edges, dtype=np.int32)

    def leaf(mask, uf):
        out[mask] = uf.n_classes

    scan_configs(graph, bc, leaf)
    return out


def open_count_array(n_edges):
    if n_edges > MAX_ENUM_EDGES:
        raise ValueError("refusing to enumerate more than %d edges" % MAX_ENUM_EDGES)
    masks = np.arange(1 << n_edges, dtype=np.int64)
    o = np.zeros(1 << n_edges, dtype=np.int32)
    for b in range(n_edges):
        o += ((masks >> b) & 1).astype(np.int32)
    return o


def log_weight_array(graph, p, q, bc):
    """log of p^o(w) (1-p)^c(w) q^k(w^xi) for every mask."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0,1)")
    if q <= 0:
        raise ValueError("q must be positive")
    o = open_count_array(graph.n_edges)
    k = cluster_count_array(graph, bc)
    return (o * math.log(p) + (graph.n_edges - o) * math.log1p(-p)
            + k * math.log(q))


def weight_array(graph, p, q, bc):
    o = open_count_array(graph.n_edges)
    k = cluster_count_array(graph, bc)
    return (np.power(p, o, dtype=float) * np.power(1.0 - p, graph.n_edges - o)
            * np.power(float(q), k))


def partition_function(graph, p, q, bc, log_domain=None):
    """Z = sum_w p^o (1-p)^c q^k; log_domain=None switches on |E|."""
    if log_domain is None:
        log_domain = graph.n_edges > LOG_DOMAIN_EDGE_THRESHOLD
    if log_domain:
        return math.exp(log_partition_function(graph, p, q, bc))
    return float(weight_array(graph, p, q, bc).sum())


def log_partition_function(graph, p, q, bc):
    lw = log_weight_array(graph, p, q, bc)
    m = float(lw.max())
    return m + math.log(np.exp(lw - m).sum())


def probability_array(graph, p, q, bc, log_domain=None):
    """Normalized random-cluster probabilities of all configurations."""
    if log_domain is None:
        log_domain = graph.n_edges > LOG_DOMAIN_EDGE_THRESHOLD
    if log_domain:
        lw = log_weight_array(graph, p, q, bc)
        w = np.exp(lw - lw.max())
    else:
        w = weight_array(graph, p, q, bc)
    return w / w.sum()


def rc_expectation(graph, p, q, bc, values, log_domain=None):
    return float(probability_array(graph, p, q, bc, log_domain) @ values)


def rc_probability(graph, p, q, bc, event, log_domain=None):
    return rc_expectation(graph, p, q, bc, np.asarray(event, dtype=float),
                          log_domain)


def rc_distribution(graph, p, q, bc, log_domain=None):
    """Exact probability table over all masks and the partition function Z.

    Handles p = 0 and p = 1 (point masses), where the log-domain path is
    unavailable.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0,1]")
    if p == 0.0 or p == 1.0:
        w = weight_array(graph, p, q, bc)
        z = float(w.sum())
        return w / z, z
    prob = probability_array(graph, p, q, bc, log_domain)
    return prob, partition_function(graph, p, q, bc, log_domain)


def rc_conditional(graph, p, q, bc, edge_k, rest_mask):
    """Closed-form P[w_e = 1 | rest] for the configuration rest_mask off e.

    p when the endpoints of edge_k are connected in rest_mask^xi without e,
    p/(p + q(1-p)) otherwise.
    """
    u, v = graph.edges[edge_k]
    uf = UnionFind(graph.n_vertices)
    for block in bc.blocks:
        for i in block[1:]:
            uf.union(block[0], i)
    for k, (a, b) in enumerate(graph.edges):
        if k != edge_k and rest_mask & (1 << k):
            uf.union(graph.vertex_index[a], graph.vertex_index[b])
    if uf.find(graph.vertex_index[u]) == uf.find(graph.vertex_index[v]):
        return p
    return p / (p + q * (1.0 - p))


# ---------------------------------------------------------------------------
# event arrays


def connectivity_event(graph, bc, x, y):
    """Bool array over masks: x and y in one cluster of omega^xi."""
    ix, iy = graph.vertex_index[tuple(x)], graph.vertex_index[tuple(y)]
    out = np.zeros(1 << graph.n_edges, dtype=bool)

    def leaf(mask, uf):
        out[mask] = uf.connected(ix, iy)

    scan_configs(graph, bc, leaf)
    return out


def boundary_connection_event(graph, bc, x):
    """Bool array over masks: x is connected to some boundary vertex."""
    ix = graph.vertex_index[tuple(x)]
    bd = [graph.vertex_index[v] for v in graph.boundary()]
    out = np.zeros(1 << graph.n_edges, dtype=bool)

    def leaf(mask, uf):
        rx = uf.find(ix)
        out[mask] = any(uf.find(b) == rx for b in bd)

    scan_configs(graph, bc, leaf)
    return out


def crossing_event(graph, rect, direction):
    """Bool array over masks: open crossing of rect (no boundary wiring).

    Requires every edge of the graph to lie inside rect, which is the case
    for the crossing rectangles used here.
    """
    x0, y0, x1, y1 = (int(math.floor(c)) for c in rect)
    inside = [i for i, v in enumerate(graph.vertices)
              if x0 <= v[0] <= x1 and y0 <= v[1] <= y1]
    if len(inside) != graph.n_vertices:
        raise ValueError("crossing_event expects the graph inside rect")
    axis = 0 if direction == "horizontal" else 1
    lo, hi = (x0, x1) if axis == 0 else (y0, y1)
    left = [i for i in inside if graph.vertices[i][axis] == lo]
    right = [i for i in inside if graph.vertices[i][axis] == hi]
    out = np.zeros(1 << graph.n_edges, dtype=bool)

    def leaf(mask, uf):
        roots = {uf.find(i) for i in left}
        out[mask] = any(uf.find(j) in roots for j in right)

    scan_configs(graph, free_bc(graph), leaf)
    return out


def cylinder_event(graph, open_edges):
    """All edges of open_edges (edge indices) open."""
    need = 0
    for k in open_edges:
        need |= 1 << k
    masks = np.arange(1 << graph.n_edges, dtype=np.int64)
    return (masks & need) == need


def all_pairs_connectivity(graph, bc):
    """One scan; returns (pairs, events) with events[i] the bool array of
    the event that pairs[i] = (x, y) lie in one cluster of omega^xi."""
    n = graph.n_vertices
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = np.zeros((len(pairs), 1 << graph.n_edges), dtype=bool)

    def leaf(mask, uf):
        roots = [uf.find(i) for i in range(n)]
        for r, (i, j) in enumerate(pairs):
            out[r, mask] = roots[i] == roots[j]

    scan_configs(graph, bc, leaf)
    return pairs, out


def all_boundary_connection(graph, bc):
    """One scan; row x is the event that vertex index x touches a cluster
    containing a boundary vertex of omega^xi."""
    n = graph.n_vertices
    bd = [graph.vertex_index[v] for v in graph.boundary()]
    out = np.zeros((n, 1 << graph.n_edges), dtype=bool)

    def leaf(mask, uf):
        broots = {uf.find(b) for b in bd}
        for i in range(n):
            out[i, mask] = uf.find(i) in broots

    scan_configs(graph, bc, leaf)
    return out


def all_even_overlap(graph, bc, subsets):
    """One scan; row r is the event that every cluster of omega^xi meets
    subsets[r] (a vertex tuple) an even number of times."""
    idx = [[graph.vertex_index[tuple(x)] for x in A] for A in subsets]
    out = np.zeros((len(subsets), 1 << graph.n_edges), dtype=bool)

    def leaf(mask, uf):
        for r, ids in enumerate(idx):
            parity = {}
            for i in ids:
                root = uf.find(i)
                parity[root] = parity.get(root, 0) ^ 1
            out[r, mask] = not any(parity.values())

    scan_configs(graph, bc, leaf)
    return out


# ---------------------------------------------------------------------------
# single-edge conditionals


def edge_conditional_gap(graph, p, q, bc, edge_k):
    """Worst deviation of P[w_e = 1 | rest] from its closed form.

    The conditional is p when the endpoints of e are connected off e
    (including bc wiring), p/(p + q(1-p)) otherwise; returns the max abs
    error over all 2^(|E|-1) rest configurations.
    """
    w = weight_array(graph, p, q, bc)
    u, v = graph.edges[edge_k]
    iu, iv = graph.vertex_index[u], graph.vertex_index[v]
    ends = [(graph.vertex_index[a], graph.vertex_index[b]) for a, b in graph.edges]
    bit = 1 << edge_k
    worst = 0.0
    for mask in range(1 << graph.n_edges):
        if mask & bit:
            continue
        uf = UnionFind(graph.n_vertices)
        for block in bc.blocks:
            for i in block[1:]:
                uf.union(block[0], i)
        for k in range(graph.n_edges):
            if mask & (1 << k) and k != edge_k:
                uf.union(*ends[k])
        expected = p if uf.find(iu) == uf.find(iv) else p / (p + q * (1.0 - p))
        cond = w[mask | bit] / (w[mask | bit] + w[mask])
        worst = max(worst, abs(cond - expected))
    return worst


# ---------------------------------------------------------------------------
# Potts spins and the Edwards-Sokal correspondence


def es_p_from_beta(beta, q):
    """Edge weight of the FK expansion of exp(beta sigma_x . sigma_y)."""
    return 1.0 - math.exp(-q * beta / (q - 1.0))


def es_beta_from_p(p, q):
    return -(q - 1.0) / q * math.log1p(-p)


def potts_beta_c(q):
    """Self-dual point transported to the spin normalization."""
    return (q - 1.0) / q * math.log(1.0 + math.sqrt(q))


def _color_table(graph, q, fixed=None):
    """All q^(free vertices) colorings and their summed simplex dots.

    Returns (colors, dots): colors is a (configs, |V|) int8 array, dots[c] is
    sum_e sigma_u . sigma_v for coloring c. The Gibbs weight at inverse
    temperature beta is exp(beta * dots).
    """
    n = graph.n_vertices
    fixed = fixed or {}
    free = [i for i in range(n) if i not in fixed]
    m = q ** len(free)
    colors = np.zeros((m, n), dtype=np.int8)
    for i, c in fixed.items():
        colors[:, i] = c
    base = np.arange(m, dtype=np.int64)
    for j, i in enumerate(free):
        colors[:, i] = (base // (q ** j)) % q
    dots = np.zeros(m)
    off = -1.0 / (q - 1.0)
    for u, v in graph.edges:
        iu, iv = graph.vertex_index[u], graph.vertex_index[v]
        dots += np.where(colors[:, iu] == colors[:, iv], 1.0, off)
    return colors, dots


def spin_ensemble(graph, q, beta, fixed=None):
    """All q^(free vertices) Potts colorings and their Gibbs weights."""
    colors, dots = _color_table(graph, q, fixed)
    return colors, np.exp(beta * dots)


def simplex_dot(c1, c2, q):
    """Inner product of unit simplex spins: 1 if equal, -1/(q-1) otherwise."""
    return 1.0 if c1 == c2 else -1.0 / (q - 1.0)


def _wired_fix(graph, color=0):
    return {graph.vertex_index[v]: color for v in graph.boundary()}


def potts_two_point(graph, q, beta, x, y, wired_color=None):
    """mu[sigma_x . sigma_y]; wired_color fixes all boundary spins."""
    fixed = None if wired_color is None else _wired_fix(graph, wired_color)
    colors, w = spin_ensemble(graph, q, beta, fixed)
    ix, iy = graph.vertex_index[tuple(x)], graph.vertex_index[tuple(y)]
    dot = np.where(colors[:, ix] == colors[:, iy], 1.0, -1.0 / (q - 1.0))
    return float(w @ dot) / float(w.sum())


def potts_one_point_wired(graph, q, beta, x):
    """mu^b[sigma_x . b] with boundary spins wired to the color b = 0."""
    colors, w = spin_ensemble(graph, q, beta, _wired_fix(graph))
    ix = graph.vertex_index[tuple(x)]
    dot = np.where(colors[:, ix] == 0, 1.0, -1.0 / (q - 1.0))
    return float(w @ dot) / float(w.sum())


def ising_moment(graph, beta, A, plus_boundary=False):
    """E[prod_{x in A} sigma_x] for q = 2 spins in {-1, +1}."""
    fixed = _wired_fix(graph) if plus_boundary else None
    colors, w = spin_ensemble(graph, 2, beta, fixed)
    s = np.ones(len(w))
    for x in A:
        s *= 1.0 - 2.0 * colors[:, graph.vertex_index[tuple(x)]]
    return float(w @ s) / float(w.sum())


def even_overlap_event(graph, bc, A):
    """Every cluster of omega^xi meets A an even number of times."""
    idx = [graph.vertex_index[tuple(x)] for x in A]
    out = np.zeros(1 << graph.n_edges, dtype=bool)

    def leaf(mask, uf):
        parity = {}
        for i in idx:
            r = uf.find(i)
            parity[r] = parity.get(r, 0) ^ 1
        out[mask] = not any(parity.values())

    scan_configs(graph, bc, leaf)
    return out


def verify_es_coupling(graph, ps, qs, tol=1e-10, products=None):
    """Spin-side vs cluster-side expectations across a (p, q) grid.

    For every p in ps (strictly inside (0,1)), integer q in qs and vertex
    pair x, y, compares mu^f[sigma_x . sigma_y] with phi^0[x <-> y] and
    mu^b[sigma_x . b] with phi^1[x <-> boundary] at the matching beta.
    products, if given, is a list of vertex tuples A; for q = 2 the moment
    E[prod_A sigma_x] is compared with the probability that every cluster
    meets A evenly. Returns a report dict; report["ok"] is the verdict.
    """
    from .lattice import wired_bc

    bc0, bc1 = free_bc(graph), wired_bc(graph)
    o = open_count_array(graph.n_edges)
    k0 = cluster_count_array(graph, bc0)
    k1 = cluster_count_array(graph, bc1)
    pairs, conn = all_pairs_connectivity(graph, bc0)
    bconn = all_boundary_connection(graph, bc1)
    prod_events = None
    if products:
        prod_events = all_even_overlap(graph, free_bc(graph), products)
    n = graph.n_vertices
    wired = _wired_fix(graph)
    report = {"pair_max_err": 0.0, "wired_max_err": 0.0,
              "product_max_err": 0.0, "tol": tol, "cases": 0}
    tables = {}
    for q in qs:
        if q != int(q) or q < 2:
            raise ValueError("spin side needs integer q >= 2")
        q = int(q)
        if q not in tables:
            colors, dots = _color_table(graph, q)
            colors_b, dots_b = _color_table(graph, q, wired)
            eq = np.stack([colors[:, i] == colors[:, j] for i, j in pairs])
            eq0 = (colors_b == 0).T.copy()
            spins = 1.0 - 2.0 * colors if q == 2 else None
            tables[q] = (dots, dots_b, eq, eq0, spins)
        dots, dots_b, eq, eq0, spins = tables[q]
        off = -1.0 / (q - 1.0)
        for p in ps:
            beta = es_beta_from_p(p, q)
            w0 = np.power(p, o) * np.power(1.0 - p, graph.n_edges - o)
            prob0 = w0 * np.power(float(q), k0)
            prob0 /= prob0.sum()
            prob1 = w0 * np.power(float(q), k1)
            prob1 /= prob1.sum()
            w = np.exp(beta * dots)
            wb = np.exp(beta * dots_b)
            same = (eq @ w) / w.sum()
            mu_pair = off + (1.0 - off) * same
            rc_pair = conn @ prob0
            report["pair_max_err"] = max(report["pair_max_err"],
                                         float(np.abs(mu_pair - rc_pair).max()))
            aligned = (eq0 @ wb) / wb.sum()
            mu_bd = off + (1.0 - off) * aligned
            rc_bd = bconn @ prob1
            report["wired_max_err"] = max(report["wired_max_err"],
                                          float(np.abs(mu_bd - rc_bd).max()))
            if prod_events is not None and q == 2:
                wsum = w.sum()
                for r, A in enumerate(products):
                    s = np.ones(len(w))
                    for x in A:
                        s *= spins[:, graph.vertex_index[tuple(x)]]
                    mu_a = float(w @ s) / wsum
                    rc_a = float(prod_events[r] @ prob0)
                    report["product_max_err"] = max(report["product_max_err"],
                                                    abs(mu_a - rc_a))
            report["cases"] += 1
    report["ok"] = (report["pair_max_err"] <= tol
                    and report["wired_max_err"] <= tol
                    and report["product_max_err"] <= tol)
    return report


# ---------------------------------------------------------------------------
# planar duality of the weights


def p_dual(p, q):
    """The dual edge weight: p p* / ((1-p)(1-p*)) = q."""
    return q * (1.0 - p) / (q * (1.0 - p) + p)


def p_self_dual(q):
    """Fixed point of p_dual: sqrt(q)/(1+sqrt(q))."""
    r = math.sqrt(q)
    return r / (1.0 + r)


def count_dual_clusters(dual, bits):
    """Cluster count of a dual configuration (single outer vertex)."""
    index = {v: i for i, v in enumerate(dual.vertices)}
    uf = UnionFind(len(dual.vertices))
    for k, (f, g) in enumerate(dual.edges):
        if bits[k]:
            uf.union(index[f], index[g])
    return uf.n_classes()


def dual_cluster_count_array(graph):
    """kstar[mask] = clusters of the dual of primal mask (open iff e closed)."""
    from .lattice import dual_map

    dual, _ = dual_map(graph, (0,) * graph.n_edges)
    index = {v: i for i, v in enumerate(dual.vertices)}
    ends = [(index[f], index[g]) for f, g in dual.edges]
    n = graph.n_edges
    out = np.zeros(1 << n, dtype=np.int32)
    for mask in range(1 << n):
        uf = UnionFind(len(dual.vertices))
        for k in range(n):
            if not mask & (1 << k):
                uf.union(*ends[k])
        out[mask] = uf.n_classes()
    return out


def duality_check(graph, p, q):
    """Per-configuration Euler identity and the partition function relation.

    Checks k0(w) = |V| - o(w) + k*(w*) - 1 for every configuration and
    returns (Z1_dual, Z0 * q^f_b * ((1-p*)/p)^|E|), which must agree:
    Z^1_{G*,p*,q} = Z^0_{G,p,q} q^{f_b} ((1-p*)/p)^{|E|} with f_b the number
    of bounded faces.
    """
    p_star = p_dual(p, q)
    k0 = cluster_count_array(graph, free_bc(graph))
    o = open_count_array(graph.n_edges)
    kstar = dual_cluster_count_array(graph)
    n = graph.n_edges
    bad = np.nonzero(k0 != graph.n_vertices - o + kstar - 1)[0]
    if bad.size:
        raise AssertionError("Euler cluster identity failed at %d" % bad[0])
    ostar = n - o
    z1 = float((np.power(p_star, ostar) * np.power(1.0 - p_star, o)
                * np.power(float(q), kstar)).sum())
    z0 = partition_function(graph, p, q, free_bc(graph), log_domain=False)
    f_bounded = 1 + graph.n_edges - graph.n_vertices
    predicted = z0 * q ** f_bounded * ((1.0 - p_star) / p) ** n
    return z1, predicted


def verify_duality(graph, p, q, tol=1e-10):
    """Configuration-by-configuration duality of the measures.

    Asserts phi^0_{G,p,q}[w] = phi^1_{G*,p*,q}[w*] for every configuration
    (the dual graph carries the outer face as an ordinary vertex, which is
    the wired count) plus the partition-function relation; returns a report.
    """
    z1, predicted = duality_check(graph, p, q)
    p_star = p_dual(p, q)
    o = open_count_array(graph.n_edges)
    kstar = dual_cluster_count_array(graph)
    prob0 = probability_array(graph, p, q, free_bc(graph))
    ostar = graph.n_edges - o
    w_dual = (np.power(p_star, ostar) * np.power(1.0 - p_star, o)
              * np.power(float(q), kstar))
    prob1_dual = w_dual / w_dual.sum()
    config_err = float(np.abs(prob0 - prob1_dual).max())
    z_rel = abs(z1 - predicted) / z1
    return {"p_star": p_star, "config_max_err": config_err,
            "z_rel_err": z_rel, "tol": tol,
            "ok": config_err <= tol and z_rel <= tol}


# ---------------------------------------------------------------------------
# FKG, monotonicity and boundary-comparison scans


_INCREASING_CACHE = {}


def increasing_events(n_edges):
    """All nonempty increasing events over n_edges, as bool arrays.

    Full enumeration of upward-closed subsets of {0,1}^E; feasible only for
    very few edges (167 events at 4), larger scans use cylinder_events.
    """
    if n_edges > 4:
        raise ValueError("full increasing-event enumeration is limited to "
                         "4 edges; use cylinder_events beyond that")
    if n_edges in _INCREASING_CACHE:
        return _INCREASING_CACHE[n_edges]
    size = 1 << n_edges
    out = []
    for cand in range(1, 1 << size):
        ok = True
        for m in range(size):
            if not (cand >> m) & 1:
                continue
            for b in range(n_edges):
                if not (cand >> (m | (1 << b))) & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            arr = np.zeros(size, dtype=bool)
            for m in range(size):
                if (cand >> m) & 1:
                    arr[m] = True
            out.append(arr)
    _INCREASING_CACHE[n_edges] = out
    return out


def cylinder_events(n_edges):
    """The events [all edges of F open] for nonempty F, ordered by F mask."""
    masks = np.arange(1 << n_edges, dtype=np.int64)
    return [(masks & f) == f for f in range(1, 1 << n_edges)]


def cylinder_probabilities(prob):
    """cp[f] = probability that all edges of f are open, all f at once.

    Superset-sum transform of the configuration probabilities (cp[0] = 1).
    """
    cp = np.array(prob, dtype=float)
    size = len(cp)
    n = size.bit_length() - 1
    masks = np.arange(size)
    for b in range(n):
        lower = np.nonzero(((masks >> b) & 1) == 0)[0]
        cp[lower] += cp[lower | (1 << b)]
    return cp


def fkg_gap(graph, p, q, bc, ev_a, ev_b):
    """phi[A and B] - phi[A] phi[B] for increasing events A, B."""
    prob = probability_array(graph, p, q, bc)
    pa = float(prob[ev_a].sum())
    pb = float(prob[ev_b].sum())
    pab = float(prob[ev_a & ev_b].sum())
    return pab - pa * pb


def fkg_scan(graph, p, q, mode="verify", bc=None, tol=1e-12):
    """Positive-association scan over increasing events.

    verify: requires q >= 1 and |E| <= 8; checks phi[A and B] >= phi[A]phi[B]
    for every pair from the event class (all increasing events up to 4 edges,
    all open-cylinder events beyond) and reports the minimal gap.
    search: scans subgraphs by edge count, then cylinder-event pairs in
    lexicographic order, and reports the first violating witness (the q < 1
    counterexample hunt).
    """
    if graph.n_edges > 8:
        raise ValueError("event scan limited to 8 edges")
    if mode == "verify":
        if q < 1.0:
            raise ValueError("verify mode requires q >= 1")
        if bc is None:
            bc = free_bc(graph)
        prob = probability_array(graph, p, q, bc)
        if graph.n_edges <= 4:
            events = np.array(increasing_events(graph.n_edges))
            pe = events @ prob
            inter = (events * prob) @ events.T
            gaps = inter - np.outer(pe, pe)
            return {"mode": mode, "event_class": "increasing",
                    "n_events": len(events),
                    "min_gap": float(gaps.min()), "tol": tol,
                    "ok": bool(gaps.min() >= -tol)}
        cp = cylinder_probabilities(prob)
        f = np.arange(1, len(cp))
        inter = cp[np.bitwise_or.outer(f, f)]
        gaps = inter - np.outer(cp[f], cp[f])
        return {"mode": mode, "event_class": "cylinder",
                "n_events": len(f), "min_gap": float(gaps.min()), "tol": tol,
                "ok": bool(gaps.min() >= -tol)}
    if mode != "search":
        raise ValueError("mode must be verify or search")
    witness = _fkg_search(graph, p, q, tol)
    return {"mode": mode, "witness": witness, "tol": tol,
            "ok": witness is not None}


def _fkg_search(graph, p, q, tol=1e-12):
    """First cylinder-pair FKG violation over subgraphs of graph.

    Subgraphs are scanned by edge count then lexicographic edge subset;
    within a subgraph, pairs (F1, F2) in lexicographic mask order. Returns
    {edges, f1, f2, gap} or None.
    """
    from .lattice import LatticeGraph

    for n_sub in range(1, graph.n_edges + 1):
        for subset in itertools.combinations(range(graph.n_edges), n_sub):
            edges = [graph.edges[k] for k in subset]
            verts = sorted({v for e in edges for v in e})
            g = LatticeGraph(verts, edges, graph.ambient_dim)
            cp = cylinder_probabilities(
                probability_array(g, p, q, free_bc(g)))
            for f1 in range(1, 1 << g.n_edges):
                for f2 in range(f1, 1 << g.n_edges):
                    gap = float(cp[f1 | f2] - cp[f1] * cp[f2])
                    if gap < -tol:
                        return {"edges": tuple(g.edges), "f1": f1, "f2": f2,
                                "gap": gap}
    return None


def fkg_witness_q_below_one(p=0.5, q=0.5):
    """First FKG violation for q < 1 on subgraphs of the unit square."""
    from .lattice import build_rect

    return _fkg_search(build_rect((0, 1), (0, 1)), p, q)


def mon_scan(graph, q, ps, bcs=None, tol=1e-12):
    """Monotonicity in p of every open-cylinder probability.

    For each boundary condition and each ordered pair p < p' from ps, the
    minimum of phi_{p'}[A] - phi_p[A] over cylinder events A; q >= 1.
    """
    from .lattice import wired_bc

    if q < 1.0:
        raise ValueError("monotonicity in p needs q >= 1")
    if bcs is None:
        bcs = [free_bc(graph), wired_bc(graph)]
    ps = sorted(ps)
    worst = np.inf
    for bc in bcs:
        cps = [cylinder_probabilities(probability_array(graph, p, q, bc))[1:]
               for p in ps]
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                worst = min(worst, float((cps[j] - cps[i]).min()))
    return {"min_gap": worst, "tol": tol, "ok": bool(worst >= -tol)}


def set_partitions(items):
    """All partitions of a list into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def cbc_scan(graph, p, q, tol=1e-12):
    """Comparison between boundary conditions over all boundary partitions.

    For every partition xi of the boundary and every cylinder event A,
    phi^0[A] <= phi^xi[A] <= phi^1[A]; q >= 1. Returns the worst gaps.
    """
    from .lattice import custom_bc, wired_bc

    if q < 1.0:
        raise ValueError("boundary comparison needs q >= 1")
    cp0 = cylinder_probabilities(
        probability_array(graph, p, q, free_bc(graph)))[1:]
    cp1 = cylinder_probabilities(
        probability_array(graph, p, q, wired_bc(graph)))[1:]
    boundary = list(graph.boundary())
    lower = upper = np.inf
    n_parts = 0
    for blocks in set_partitions(boundary):
        cpx = cylinder_probabilities(
            probability_array(graph, p, q, custom_bc(graph, blocks)))[1:]
        lower = min(lower, float((cpx - cp0).min()))
        upper = min(upper, float((cp1 - cpx).min()))
        n_parts += 1
    return {"min_above_free": lower, "min_below_wired": upper,
            "n_partitions": n_parts, "tol": tol,
            "ok": bool(lower >= -tol and upper >= -tol)}


# ---------------------------------------------------------------------------
# the percolation pivotality sum phi_p(S)


def phi_sum(S, p, d=2, interior_graph=None):
    """phi_p(S) = p sum_{x in S, y ~ x, y not in S} P_p[0 <-> x inside S].

    S is a set of d-dimensional integer points containing the origin; the
    connection probabilities use only edges with both endpoints in S.
    """
    from .lattice import LatticeGraph

    S = {tuple(v) for v in S}
    origin = (0,) * d
    if origin not in S:
        raise ValueError("S must contain the origin")
    edges = []
    for v in S:
        for axis in range(d):
            w = list(v)
            w[axis] += 1
            w = tuple(w)
            if w in S:
                edges.append((v, w))
    g = LatticeGraph(S, edges, d)
    bc = free_bc(g)
    # P[0 <-> x in S] for all x, from one enumeration
    conn = {x: connectivity_event(g, bc, origin, x) for x in S}
    prob = probability_array(g, p, 1.0, bc)
    total = 0.0
    for x in S:
        n_out = 0
        for axis in range(d):
            for s in (1, -1):
                y = list(x)
                y[axis] += s
                if tuple(y) not in S:
                    n_out += 1
        if n_out:
            total += n_out * float(prob[conn[x]].sum())
    return p * total
