"""Measure degenerate-domain marked edges and windings after the wrap fix."""
import itertools
import numpy as np

from critlat.lattice import LatticeGraph, build_rect, medial_domain
from critlat.loops import loop_encode, winding_profile


def induced(pred, span):
    vs = [v for v in itertools.product(span, span) if pred(v)]
    vset = set(vs)
    es = []
    for v in vs:
        for d in ((1, 0), (0, 1)):
            w = (v[0] + d[0], v[1] + d[1])
            if w in vset:
                es.append((v, w))
    return LatticeGraph(vs, es)


def half_diamond(n):
    # tips (-n,0) and (0,-n) are leaves; drop them to keep the boundary
    # walk a simple cycle
    return induced(lambda v: abs(v[0]) + abs(v[1]) <= n and v[0] + v[1] <= 0
                   and v not in ((-n, 0), (0, -n)),
                   range(-n, n + 1))


CASES = [
    ("unit square corner", build_rect((0, 1), (0, 1)), (0, 0)),
    ("half-diamond n=3", half_diamond(3), (0, 0)),
    ("rect NE corner", build_rect((0, 2), (0, 1)), (2, 1)),
    ("rect flat bottom", build_rect((0, 2), (0, 1)), (1, 0)),
]

rng = np.random.default_rng(7)
for name, g, a in CASES:
    dom = medial_domain(g, a, a)
    m = len(dom.free_edges)
    wa = set()
    wb = set()
    boundary_w = {}  # oriented segment -> set of windings seen
    if m <= 12:
        pool = range(2 ** m)
    else:
        pool = rng.integers(0, 2 ** m, size=400)
    for bits in pool:
        bits = int(bits)
        cfg = [(bits >> t) & 1 for t in range(m)]
        lc = loop_encode(dom, cfg)
        prof = winding_profile(lc.exploration)
        wa.add(prof.get(dom.e_a))
        wb.add(prof.get(dom.e_b))
        for e, w in prof.items():
            boundary_w.setdefault(e, set()).add(w)
    # boundary medial edges: white side of the segment is a wrap white
    from critlat.lattice import segment_black
    wrapset = set(dom.abstar_whites)
    bnd = []
    for e in boundary_w:
        z, w = e
        bf = segment_black(z, w)
        lo = (min(z[0], w[0]), min(z[1], w[1]))
        faces = [(lo[0] - 1, lo[1]), (lo[0], lo[1] - 1)] if z[0] != w[0] else []
        if z[0] == w[0]:
            faces = [(z[0] - 1, min(z[1], w[1])), (z[0], min(z[1], w[1]))]
        else:
            faces = [(min(z[0], w[0]), z[1] - 1), (min(z[0], w[0]), z[1])]
        white = [f for f in faces if f != bf]
        assert len(white) == 1
        if white[0] in wrapset:
            bnd.append(e)
    bset = sorted({w / np.pi for e in bnd for w in boundary_w[e] if w is not None})
    det = all(len({w for w in boundary_w[e] if w is not None}) <= 1 for e in bnd)
    print("%-20s m=%2d rot=%d e_a=%s e_b=%s" % (name, m, dom.rotation, dom.e_a, dom.e_b))
    print("   W(e_a)/pi=%s W(e_b)/pi=%s  boundary W/pi=%s deterministic=%s"
          % (sorted(w / np.pi for w in wa), sorted(w / np.pi for w in wb), bset, det))
