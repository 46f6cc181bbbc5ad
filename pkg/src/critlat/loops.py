"""Loop representation and parafermionic observables on Dobrushin domains.

A configuration on the free edges of a Dobrushin domain decomposes the
medial lattice into closed loops plus one exploration path gamma from e_a
to e_b: at each medial vertex the two quarter-turn arcs avoid the open
diagonal (open primal edge or dual complement, wired arc forced open,
dual arc forced closed). The loop count obeys l = 2k + o - v exactly,
with k the cluster count under Dobrushin wiring, o the number of open
free edges and v the marked vertex count of the domain; it is asserted
on every trace.

The observable F(e) = E[exp(i sigma W(e, e_b)) 1(e in gamma)] is computed
by exact enumeration, with winding summed over the +-pi/2 turns strictly
after e up to arrival at e_b (left turn = +pi/2) and spin sigma solving
sin(sigma pi/2) = sqrt(q)/2 (real for q <= 4, 1 + i R for q > 4). Medial
edges carry the canonical orientation counterclockwise around their black
face; the q = 2 projections and line membership are stated through that
orientation, squared to stay branch-free.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

from .lattice import (
    CCW_SIDES,
    DobrushinDomain,
    cluster_stats,
    dobrushin_bc,
    oriented_segment,
    segment_black,
)
from .oracle import p_self_dual

SQRT2 = math.sqrt(2.0)


def sigma_obs(q):
    """The observable spin: sin(sigma pi/2) = sqrt(q)/2.

    Real in [0, 1] for q <= 4; on the branch 1 + iR for q > 4.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    s = math.sqrt(q) / 2.0
    if q <= 4.0:
        return 2.0 / math.pi * math.asin(s)
    return complex(1.0, 2.0 / math.pi * math.acosh(s))


@dataclass(frozen=True)
class LoopConfig:
    """Loops plus the exploration path of one configuration."""

    loops: tuple        # each loop a tuple of medial vertices in cycle order
    exploration: tuple  # directed medial segments from e_a to e_b inclusive

    @property
    def ell(self):
        # the exploration path counts as one loop
        return len(self.loops) + 1


def _pairings(domain, bits):
    """Arc pairing (side -> side) at every status vertex for this config."""
    pair = {}
    for z, (kind, k) in domain.status.items():
        if kind == "free":
            open_primal = bool(bits[domain.free_pos[k]])
        else:
            open_primal = kind == "primal"
        table = {}
        for d1, d2 in DobrushinDomain.arcs_at(z, open_primal,
                                              domain.blacks_ne_sw(z)):
            table[d1] = d2
            table[d2] = d1
        pair[z] = table
    return pair


def _explore(domain, pair):
    """Directed segments of gamma from e_a to e_b plus the used sides."""
    status = domain.status
    z = domain.e_a[1]
    tail = domain.e_a[0]
    d_in = (tail[0] - z[0], tail[1] - z[1])
    steps = [domain.e_a]
    used = set()
    while True:
        d_out = pair[z][d_in]
        used.add((z, d_in))
        used.add((z, d_out))
        nxt = (z[0] + d_out[0], z[1] + d_out[1])
        steps.append((z, nxt))
        if nxt not in status:
            if (z, nxt) != domain.e_b:
                raise AssertionError("exploration exited off e_b at %s" % (z,))
            return tuple(steps), used
        d_in = (-d_out[0], -d_out[1])
        z = nxt


def loop_encode(domain, bits):
    """Trace the loop decomposition; l = 2k + o - v asserted exactly."""
    bits = tuple(int(b) for b in bits)
    if len(bits) != len(domain.free_edges):
        raise ValueError("expected one bit per free edge")
    pair = _pairings(domain, bits)
    steps, used = _explore(domain, pair)
    status = domain.status
    loops = []
    for z in status:
        for d in CCW_SIDES:
            if (z, d) in used:
                continue
            if not domain.curve_segment(z, (z[0] + d[0], z[1] + d[1])):
                # dead slots: exterior corners, the outside of the wired
                # arc, wrap-to-exterior contacts
                continue
            cycle = []
            cz, cd = z, d
            while (cz, cd) not in used:
                used.add((cz, cd))
                nxt = (cz[0] + cd[0], cz[1] + cd[1])
                used.add((nxt, (-cd[0], -cd[1])))
                cycle.append(nxt)
                cz = nxt
                cd = pair[cz][(-cd[0], -cd[1])]
            loops.append(tuple(cycle))
    config = LoopConfig(tuple(loops), steps)

    full = [0] * domain.primal.n_edges
    for t, k in enumerate(domain.free_edges):
        full[k] = bits[t]
    bc = dobrushin_bc(domain.primal, domain.a, domain.b)
    k_clusters, _ = cluster_stats(domain.primal, tuple(full), bc)
    expect = 2 * k_clusters + sum(bits) - domain.v_count()
    if config.ell != expect:
        raise AssertionError("loop count %d != 2k + o - v = %d"
                             % (config.ell, expect))
    return config


def medial_edges(domain):
    """Canonically oriented curve-carrying medial edges (incl. e_a, e_b)."""
    status = domain.status
    out = set()
    for z in status:
        for d in CCW_SIDES:
            w = (z[0] + d[0], z[1] + d[1])
            if w in status and domain.curve_segment(z, w):
                out.add(oriented_segment(z, w))
    out.add(domain.e_a)
    out.add(domain.e_b)
    return out


def edge_direction(edge):
    """Unit complex direction of a canonically oriented medial edge."""
    (tx, ty), (hx, hy) = edge
    return complex(hx - tx, hy - ty)


def winding_profile(steps):
    """Winding to e_b for every edge on gamma, keyed by canonical edge.

    The turn directly after each traversed segment through arrival at e_b
    is counted, +pi/2 per left turn; the final segment e_b winds 0.
    """
    dirs = [complex(h[0] - t[0], h[1] - t[1]) for t, h in steps]
    wind = {}
    acc = 0.0
    for i in range(len(steps) - 1, -1, -1):
        if i < len(steps) - 1:
            cross = (dirs[i].real * dirs[i + 1].imag
                     - dirs[i].imag * dirs[i + 1].real)
            acc += math.pi / 2.0 if cross > 0 else -math.pi / 2.0
        t, h = steps[i]
        wind[oriented_segment(t, h)] = acc
    return wind


def _config_weights(domain, p, q):
    """Dobrushin random-cluster weights over free-edge configurations."""
    n_free = len(domain.free_edges)
    bc = dobrushin_bc(domain.primal, domain.a, domain.b)
    weights = []
    for bits in itertools.product((0, 1), repeat=n_free):
        full = [0] * domain.primal.n_edges
        for t, k in enumerate(domain.free_edges):
            full[k] = bits[t]
        k_clusters, _ = cluster_stats(domain.primal, tuple(full), bc)
        o = sum(bits)
        weights.append((bits, p ** o * (1.0 - p) ** (n_free - o)
                        * q ** k_clusters))
    return weights


@dataclass
class ObservableField:
    """F per medial edge, f per medial vertex (q=2 only), and the spin."""

    edge_values: dict
    vertex_values: dict
    sigma: complex
    domain: DobrushinDomain
    p: float
    q: float


def edge_observable(domain, p, q):
    """F(e) = E[exp(i sigma W(e, e_b)) 1(e in gamma)] by enumeration."""
    sigma = sigma_obs(q)
    total = {e: 0.0 + 0.0j for e in medial_edges(domain)}
    z = 0.0
    for bits, w in _config_weights(domain, p, q):
        steps, _ = _explore(domain, _pairings(domain, bits))
        z += w
        for key, wind in winding_profile(steps).items():
            total[key] += w * cmath.exp(1j * sigma * wind)
    return ObservableField({e: v / z for e, v in total.items()}, {},
                           sigma, domain, p, q)


def contour_residuals(field):
    """|F(e1) - F(e3) + i F(e2) - i F(e4)| at interior medial vertices.

    e1..e4 are the four incident edges in counterclockwise compass order
    (east, north, west, south). The relation is invariant under rotating
    the labels; the sign of i is pinned by requiring the residual to vanish
    at the self-dual point, which it does to machine precision for all
    q > 0 tested.
    """
    domain = field.domain
    status = domain.status
    res = {}
    for v in status:
        nbrs = [(v[0] + d[0], v[1] + d[1]) for d in CCW_SIDES]
        if not all(w in status and domain.curve_segment(v, w) for w in nbrs):
            continue
        e1, e2, e3, e4 = (field.edge_values[oriented_segment(v, w)]
                          for w in nbrs)
        res[v] = abs(e1 - e3 + 1j * e2 - 1j * e4)
    return res


def contour_check(domain, q, p=None):
    """Max vertex residual of the contour relation; p defaults to p_c."""
    p_used = p_self_dual(q) if p is None else p
    field = edge_observable(domain, p_used, q)
    res = contour_residuals(field)
    worst = max(res.values()) if res else 0.0
    return {"p": p_used, "q": q, "max_residual": worst,
            "n_vertices": len(res), "ok": bool(worst <= 1e-10)}


# ---------------------------------------------------------------------------
# q = 2: s-holomorphicity, vertex observable, and the H field


def project_line(edge, x):
    """P_e[x] = (x + conj(e) conj(x)) / 2, the projection on sqrt(conj e)R."""
    e = edge_direction(edge)
    return 0.5 * (x + e.conjugate() * complex(x).conjugate())


def _incident_edges(domain, z):
    """Curve-carrying medial edges at vertex z, marked half-edges included."""
    out = []
    for d in CCW_SIDES:
        w = (z[0] + d[0], z[1] + d[1])
        if w in domain.status and domain.curve_segment(z, w):
            out.append(oriented_segment(z, w))
        else:
            for marked in (domain.e_a, domain.e_b):
                if z in marked and w in marked:
                    out.append(marked)
    return out


def vertex_observable(field):
    """f(v) from the incident F values, with the boundary weight 2/(2+s2).

    Asserts s-holomorphicity: P_e[f(u)] = P_e[f(v)] = F(e) across every
    medial edge, within 1e-10. Only q = 2 admits the construction.
    """
    if abs(field.q - 2.0) > 1e-12:
        raise ValueError("vertex observable requires q = 2")
    domain = field.domain
    f = {}
    for z in domain.status:
        inc = _incident_edges(domain, z)
        s = sum(field.edge_values[e] for e in inc)
        f[z] = 0.5 * s if len(inc) == 4 else 2.0 / (2.0 + SQRT2) * s
    worst = 0.0
    for e in medial_edges(domain):
        for z in e:
            if z in f:
                worst = max(worst, abs(project_line(e, f[z])
                                       - field.edge_values[e]))
    if worst > 1e-10:
        raise AssertionError("s-holomorphicity violated: %.3e" % worst)
    field.vertex_values = f
    return field


def sholo_report(domain, p=None):
    """All q = 2 edge/vertex identities with their worst residuals."""
    q = 2.0
    p_used = p_self_dual(q) if p is None else p
    field = vertex_observable(edge_observable(domain, p_used, q))
    fv = field.vertex_values
    line = 0.0
    for e, val in field.edge_values.items():
        # F in sqrt(conj e) R  <=>  F^2 / conj(e) = F^2 e lands in [0, inf)
        ratio = val * val * edge_direction(e)
        line = max(line, abs(ratio.imag), max(0.0, -ratio.real))
    square = 0.0
    for v in fv:
        nbrs = [(v[0] + d[0], v[1] + d[1]) for d in CCW_SIDES]
        if not all(w in domain.status for w in nbrs):
            continue
        e1, e2, e3, e4 = (field.edge_values[oriented_segment(v, w)]
                          for w in nbrs)
        fval = abs(fv[v]) ** 2
        square = max(square,
                     abs(abs(e1) ** 2 + abs(e3) ** 2 - fval),
                     abs(abs(e2) ** 2 + abs(e4) ** 2 - fval))
    # nu_v = e + e', the two incident directions summed; the canonical
    # orientations already run along the boundary from a to b, so no sign
    # fixups are needed
    tangent = 0.0
    for v, fval in fv.items():
        inc = _incident_edges(domain, v)
        if len(inc) != 2:
            continue
        nu = sum(edge_direction(e) for e in inc)
        znu = nu * fval * fval
        tangent = max(tangent, abs(znu.imag), max(0.0, -znu.real))
    cr = _cauchy_riemann_residual(domain, fv)
    exit_proj = abs(project_line(domain.e_b, fv[domain.e_b[0]]) - 1.0)
    return {"p": p_used, "field": field, "line_membership": line,
            "square_split": square, "boundary_tangent": tangent,
            "cauchy_riemann": cr, "exit_projection": exit_proj,
            "ok": bool(max(line, square, tangent, exit_proj) <= 1e-10
                       and cr <= 1e-9)}


def _cauchy_riemann_residual(domain, fv):
    """Worst discrete contour integral of f around a single lattice face.

    Faces of the medial graph are the primal/dual faces; f being
    s-holomorphic makes the sum of f(corner) * (next - corner) vanish
    around each face whose corners all carry f.
    """
    worst = 0.0
    for face in list(domain.blacks) + list(domain.whites):
        x, y = face
        corners = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
        if not all(c in fv for c in corners):
            continue
        acc = 0.0 + 0.0j
        for t in range(4):
            z, w = corners[t], corners[(t + 1) % 4]
            acc += fv[z] * (complex(*w) - complex(*z))
        worst = max(worst, abs(acc))
    return worst


def _edge_faces(edge):
    """(black, white) faces flanking a medial segment."""
    (zx, zy), (wx, wy) = edge
    if zx == wx:
        y = min(zy, wy)
        cands = [(zx, y), (zx - 1, y)]
    else:
        x = min(zx, wx)
        cands = [(x, zy), (x, zy - 1)]
    black = segment_black(edge[0], edge[1])
    white = cands[0] if cands[1] == black else cands[1]
    return black, white


def build_H(field):
    """Integrate |F|^2 into the face function H.

    H(black) - H(white) = |F(e)|^2 across every medial edge; anchored at
    H = 1 on the black face of b. Asserts path independence, the boundary
    values (1 on the wired-arc blacks, 0 on the dual-arc whites) and the
    increment rule through f(v)^2 at interior vertices, all within 1e-10.
    """
    domain = field.domain
    if not field.vertex_values:
        raise ValueError("vertex observable required; run sholo first")
    relations = []
    for e in medial_edges(domain):
        black, white = _edge_faces(e)
        relations.append((black, white, abs(field.edge_values[e]) ** 2))

    anchor = domain.black[domain.b]
    H = {anchor: 1.0}
    queue = [anchor]
    adj = {}
    for black, white, inc in relations:
        adj.setdefault(black, []).append((white, -inc))
        adj.setdefault(white, []).append((black, inc))
    while queue:
        face = queue.pop()
        for other, delta in adj.get(face, ()):
            if other not in H:
                H[other] = H[face] + delta
                queue.append(other)
    worst_path = 0.0
    for black, white, inc in relations:
        worst_path = max(worst_path, abs(H[black] - H[white] - inc))
    if worst_path > 1e-10:
        raise AssertionError("H is path dependent: %.3e" % worst_path)

    wired = {domain.black[v] for v in domain.ba_vertices}
    bvals = [abs(H[b] - 1.0) for b in wired]
    bvals += [abs(H[w]) for w in domain.abstar_whites]
    worst_boundary = max(bvals)

    worst_image = 0.0
    for v, fval in field.vertex_values.items():
        nbrs = [(v[0] + d[0], v[1] + d[1]) for d in CCW_SIDES]
        if not all(w in domain.status for w in nbrs):
            continue
        black, white = _edge_faces(oriented_segment(v, nbrs[0]))
        other = (2 * v[0] - 1 - black[0], 2 * v[1] - 1 - black[1])
        dz = (complex(*black) - complex(*other))
        lhs = H[black] - H[other]
        rhs = 0.5 * (fval * fval * dz).imag
        worst_image = max(worst_image, abs(lhs - rhs))

    return {"H": H, "path_residual": worst_path,
            "boundary_residual": worst_boundary,
            "image_residual": worst_image,
            "ok": bool(max(worst_path, worst_boundary,
                           worst_image) <= 1e-10)}


def laplacian_signs(field, H):
    """(min primal Laplacian, max dual Laplacian) over interior faces.

    Interior primal faces are vertices of the domain with all four lattice
    neighbors present; interior dual faces are whites flanked on all four
    diagonal sides by whites of the domain.
    """
    domain = field.domain
    vset = set(domain.primal.vertices)
    min_primal = math.inf
    for x in domain.primal.vertices:
        nbrs = [(x[0] + d[0], x[1] + d[1]) for d in CCW_SIDES]
        if not all(w in vset for w in nbrs):
            continue
        hx = H[domain.black[x]]
        lap = sum(H[domain.black[w]] - hx for w in nbrs)
        min_primal = min(min_primal, lap)
    max_dual = -math.inf
    whites = domain.whites
    for y in whites:
        nbrs = [(y[0] + dx, y[1] + dy)
                for dx, dy in ((1, 1), (-1, 1), (-1, -1), (1, -1))]
        if not all(w in whites for w in nbrs):
            continue
        hy = H[y]
        lap = sum(H[w] - hy for w in nbrs)
        max_dual = max(max_dual, lap)
    return min_primal, max_dual
