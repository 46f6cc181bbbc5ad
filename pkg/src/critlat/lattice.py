"""Finite subgraphs of Z^d: boxes, boundary conditions, duality, medial geometry.

Conventions used throughout the package:

* Vertices are integer coordinate tuples; edges are unordered nearest-neighbor
  pairs, indexed lexicographically by (min endpoint, max endpoint).
* The planar dual of a full rectangular domain lives on the shifted lattice:
  the unit face with south-west corner (i,j) gets the integer label (i,j); the
  unbounded face gets the label OUTER.
* Dobrushin domains are re-embedded diagonally so the medial lattice becomes
  the standard grid Z^2: primal vertex (x,y) becomes the unit square labelled
  (x-y, x+y) (a "black" face, coordinate sum even; whites have odd sum).
  Medial vertices are the integer corner points, medial edges the unit
  segments, each oriented counterclockwise around the black face it borders.
  A global quarter-turn rotation is applied at construction so that the exit
  edge e_b points in the +x direction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

OUTER = "outer"

# compass offsets in ccw order starting east, used when walking around a face
CCW_SIDES = ((1, 0), (0, 1), (-1, 0), (0, -1))


class UnionFind:
    """Union-find with path compression.

    The root of every class is its smallest element, so cluster labellings
    are deterministic and reproducible across runs.
    """

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True

    def n_classes(self):
        return sum(1 for x, p in enumerate(self.parent) if x == p)


class RollbackUnionFind:
    """Union by size without path compression, with an undo stack.

    The enumeration oracles walk the binary tree of edge configurations and
    need cluster counts that can be updated and reverted in O(log n) per edge.
    """

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n
        self.n_classes = n
        self._trail = []

    def find(self, x):
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            self._trail.append(-1)
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        self.n_classes -= 1
        self._trail.append(ry)
        return True

    def undo(self):
        """Revert the most recent union() call (successful or not)."""
        ry = self._trail.pop()
        if ry >= 0:
            rx = self.parent[ry]
            self.parent[ry] = ry
            self.size[rx] -= self.size[ry]
            self.n_classes += 1

    def connected(self, x, y):
        return self.find(x) == self.find(y)


class LatticeGraph:
    """Immutable finite graph with integer coordinates and unit-step edges.

    Vertex and edge indices are deterministic: both lists are sorted
    lexicographically, edges as (min endpoint, max endpoint) pairs.
    """

    def __init__(self, vertices, edges, ambient_dim=None):
        self.vertices = tuple(sorted({tuple(v) for v in vertices}))
        if ambient_dim is None:
            ambient_dim = len(self.vertices[0]) if self.vertices else 2
        self.ambient_dim = ambient_dim
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        norm = set()
        for u, v in edges:
            u, v = tuple(u), tuple(v)
            if v < u:
                u, v = v, u
            if sum(abs(a - b) for a, b in zip(u, v)) != 1:
                raise ValueError("not a nearest-neighbor edge: %s-%s" % (u, v))
            if u not in self.vertex_index or v not in self.vertex_index:
                raise ValueError("edge endpoint not a vertex: %s-%s" % (u, v))
            norm.add((u, v))
        self.edges = tuple(sorted(norm))
        self.edge_index = {e: k for k, e in enumerate(self.edges)}
        adj = [[] for _ in self.vertices]
        for k, (u, v) in enumerate(self.edges):
            adj[self.vertex_index[u]].append((self.vertex_index[v], k))
            adj[self.vertex_index[v]].append((self.vertex_index[u], k))
        self.adjacency = tuple(tuple(sorted(a)) for a in adj)
        self._boundary = None

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    def boundary(self):
        """Vertices x for which some ambient-lattice edge xy is missing from E
        (y ranges over all 2d unit-step neighbors of x, inside or outside V)."""
        if self._boundary is None:
            out = []
            for v in self.vertices:
                for axis in range(self.ambient_dim):
                    done = False
                    for s in (1, -1):
                        w = list(v)
                        w[axis] += s
                        w = tuple(w)
                        e = (v, w) if v < w else (w, v)
                        if e not in self.edge_index:
                            out.append(v)
                            done = True
                            break
                    if done:
                        break
            self._boundary = tuple(out)
        return self._boundary

    def is_connected(self):
        if not self.vertices:
            return True
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y, _ in self.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n_vertices

    def complement_connected(self):
        """True iff Z^2 minus the vertex set is connected (no holes).

        Flood-fills the complement inside a margin-2 bounding box; any
        complement cell not reached from the outside witnesses a hole.
        """
        if self.ambient_dim != 2:
            raise ValueError("complement check only implemented for d=2")
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        x0, x1 = min(xs) - 2, max(xs) + 2
        y0, y1 = min(ys) - 2, max(ys) + 2
        vset = set(self.vertices)
        seen = {(x0, y0)}
        stack = [(x0, y0)]
        while stack:
            x, y = stack.pop()
            for dx, dy in CCW_SIDES:
                w = (x + dx, y + dy)
                if x0 <= w[0] <= x1 and y0 <= w[1] <= y1 and w not in vset and w not in seen:
                    seen.add(w)
                    stack.append(w)
        total = (x1 - x0 + 1) * (y1 - y0 + 1) - len(
            [v for v in vset if x0 <= v[0] <= x1 and y0 <= v[1] <= y1])
        return len(seen) == total


def build_box(n, d=2):
    """The box Lambda_n = [-n,n]^d with all nearest-neighbor edges."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if d not in (2, 3):
        raise ValueError("d must be 2 or 3")
    rng = range(-n, n + 1)
    vertices = list(itertools.product(rng, repeat=d))
    edges = []
    for v in vertices:
        for axis in range(d):
            w = list(v)
            w[axis] += 1
            if w[axis] <= n:
                edges.append((v, tuple(w)))
    return LatticeGraph(vertices, edges, d)


def build_rect(x_range, y_range):
    """Rectangle [x0,x1] x [y0,y1] in Z^2 with all nearest-neighbor edges."""
    x0, x1 = x_range
    y0, y1 = y_range
    vertices = [(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1)]
    edges = []
    for x, y in vertices:
        if x + 1 <= x1:
            edges.append(((x, y), (x + 1, y)))
        if y + 1 <= y1:
            edges.append(((x, y), (x, y + 1)))
    return LatticeGraph(vertices, edges, 2)


@dataclass(frozen=True)
class PercolationConfig:
    """One bit per edge index: 1 = open, 0 = closed."""

    bits: tuple

    @classmethod
    def from_mask(cls, mask, n_edges):
        return cls(tuple((mask >> k) & 1 for k in range(n_edges)))

    def mask(self):
        m = 0
        for k, b in enumerate(self.bits):
            if b:
                m |= 1 << k
        return m

    def n_open(self):
        return sum(self.bits)

    def n_closed(self):
        return len(self.bits) - sum(self.bits)


@dataclass(frozen=True)
class BoundaryCondition:
    """Partition of the boundary into wired blocks (singletons = free)."""

    kind: str
    blocks: tuple  # tuple of tuples of vertex indices


def free_bc(graph):
    bd = [graph.vertex_index[v] for v in graph.boundary()]
    return BoundaryCondition("free", tuple((i,) for i in sorted(bd)))


def wired_bc(graph):
    bd = sorted(graph.vertex_index[v] for v in graph.boundary())
    blocks = (tuple(bd),) if bd else ()
    return BoundaryCondition("wired", blocks)


def custom_bc(graph, blocks):
    """Wire the given blocks (vertex coordinate lists); the rest of the
    boundary stays free. Blocks must be disjoint subsets of the boundary."""
    bd = {graph.vertex_index[v] for v in graph.boundary()}
    out, used = [], set()
    for block in blocks:
        idx = tuple(sorted(graph.vertex_index[tuple(v)] for v in block))
        if not set(idx) <= bd:
            raise ValueError("boundary-condition block not inside the boundary")
        if set(idx) & used:
            raise ValueError("boundary-condition blocks overlap")
        used |= set(idx)
        out.append(idx)
    out.extend((i,) for i in sorted(bd - used))
    return BoundaryCondition("custom", tuple(sorted(out)))


def dobrushin_bc(graph, a, b):
    """Wire the counterclockwise boundary arc from b to a; the rest is free."""
    _, ba_vertices, _, _ = boundary_arcs(graph, a, b)
    return BoundaryCondition(
        "dobrushin", custom_bc(graph, (ba_vertices,)).blocks)


def cluster_stats(graph, config, bc):
    """Cluster count and labels of the configuration with bc blocks wired.

    Returns (k, labels): k clusters after contracting every block of bc;
    labels[i] = smallest vertex index in the cluster of vertex i.
    """
    uf = UnionFind(graph.n_vertices)
    bits = config.bits if isinstance(config, PercolationConfig) else config
    for k, (u, v) in enumerate(graph.edges):
        if bits[k]:
            uf.union(graph.vertex_index[u], graph.vertex_index[v])
    for block in bc.blocks:
        for i in block[1:]:
            uf.union(block[0], i)
    labels = tuple(uf.find(i) for i in range(graph.n_vertices))
    return len(set(labels)), labels


def crossing_detect(graph, config, rect, direction):
    """Open crossing of the rectangle rect = (x0, y0, x1, y1).

    Only edges with both endpoints inside the (floored) rectangle count.
    direction "horizontal" joins x = x0 to x = x1, "vertical" joins
    y = y0 to y = y1.
    """
    import math

    x0, y0, x1, y1 = (int(math.floor(c)) for c in rect)
    if direction not in ("horizontal", "vertical"):
        raise ValueError("direction must be horizontal or vertical")
    inside = [i for i, v in enumerate(graph.vertices)
              if x0 <= v[0] <= x1 and y0 <= v[1] <= y1]
    if not inside:
        return False
    pos = {i: j for j, i in enumerate(inside)}
    uf = UnionFind(len(inside))
    bits = config.bits if isinstance(config, PercolationConfig) else config
    for k, (u, v) in enumerate(graph.edges):
        if not bits[k]:
            continue
        iu, iv = graph.vertex_index[u], graph.vertex_index[v]
        if iu in pos and iv in pos:
            uf.union(pos[iu], pos[iv])
    axis = 0 if direction == "horizontal" else 1
    lo, hi = (x0, x1) if axis == 0 else (y0, y1)
    left = {uf.find(pos[i]) for i in inside if graph.vertices[i][axis] == lo}
    right = {uf.find(pos[i]) for i in inside if graph.vertices[i][axis] == hi}
    return bool(left & right)


# ---------------------------------------------------------------------------
# planar faces and duality


def _ccw_neighbor_order(graph):
    """Neighbors of every vertex sorted counterclockwise starting east."""
    order = []
    rank = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}
    for i, v in enumerate(graph.vertices):
        nbrs = []
        for j, _ in graph.adjacency[i]:
            w = graph.vertices[j]
            nbrs.append((rank[(w[0] - v[0], w[1] - v[1])], j))
        order.append([j for _, j in sorted(nbrs)])
    return order


def _face_orbits(graph):
    """Faces of the planar embedding as orbits of directed edges.

    next(u->v) = (v->w) with w the predecessor of u in the ccw neighbor
    order at v; bounded faces come out counterclockwise, the outer face
    clockwise.
    """
    order = _ccw_neighbor_order(graph)
    succ = {}
    for v, nbrs in enumerate(order):
        for t, u in enumerate(nbrs):
            w = nbrs[(t - 1) % len(nbrs)]
            succ[(u, v)] = (v, w)
    faces = []
    seen = set()
    for start in succ:
        if start in seen:
            continue
        orbit = []
        cur = start
        while cur not in seen:
            seen.add(cur)
            orbit.append(cur)
            cur = succ[cur]
        faces.append(tuple(orbit))
    return faces


def _signed_area(graph, orbit):
    s = 0
    for u, v in orbit:
        pu, pv = graph.vertices[u], graph.vertices[v]
        s += pu[0] * pv[1] - pv[0] * pu[1]
    return s / 2.0


def boundary_cycle(graph):
    """Counterclockwise outer boundary walk as a list of directed edges
    (vertex-index pairs). Requires a connected planar graph with d=2."""
    if graph.ambient_dim != 2:
        raise ValueError("boundary cycle only for d=2")
    if not graph.is_connected():
        raise ValueError("graph must be connected")
    faces = _face_orbits(graph)
    outer = min(faces, key=lambda orb: _signed_area(graph, orb))
    return [(v, u) for (u, v) in reversed(outer)]


def boundary_arcs(graph, a, b):
    """Split the ccw boundary walk at a and b.

    Returns (ab_vertices, ba_vertices, ab_edges, ba_edges): the ccw arc from
    a to b and from b to a, vertices inclusive of both endpoints, edges as
    edge-index lists. a == b gives the degenerate split ((whole cycle), (a,)).
    """
    a, b = tuple(a), tuple(b)
    walk = boundary_cycle(graph)
    verts = [graph.vertices[u] for u, _ in walk]
    # leaves and bridges repeat vertices on the outer walk; only the split
    # points must be unambiguous
    if verts.count(a) != 1 or (b != a and verts.count(b) != 1):
        raise ValueError("a and b must appear exactly once on the outer boundary")
    ia = verts.index(a)
    walk = walk[ia:] + walk[:ia]
    verts = verts[ia:] + verts[:ia]
    ib = verts.index(b)

    def to_edge_indices(dir_edges):
        out = []
        for u, v in dir_edges:
            e = tuple(sorted((graph.vertices[u], graph.vertices[v])))
            out.append(graph.edge_index[e])
        return tuple(out)

    ab_vertices = tuple(verts[:ib + 1])
    ba_vertices = tuple(verts[ib:]) + (a,)
    if a == b:
        ab_vertices = tuple(verts) + (a,)
        ba_vertices = (a,)
        return ab_vertices, ba_vertices, to_edge_indices(walk), ()
    return (ab_vertices, ba_vertices,
            to_edge_indices(walk[:ib]), to_edge_indices(walk[ib:]))


@dataclass(frozen=True)
class DualGraph:
    """Planar dual: one vertex per face (bounded faces labelled by their
    south-west corner, unbounded face by OUTER); edges[k] crosses primal
    edge k."""

    vertices: tuple
    edges: tuple
    primal: LatticeGraph


def dual_map(graph, config):
    """Dual graph and dual configuration, omega*_{e*} = 1 - omega_e.

    Applied to a DualGraph it returns the stored primal back (the pairing
    e <-> e* is an involution; labels translate accordingly).
    """
    bits = config.bits if isinstance(config, PercolationConfig) else config

    if isinstance(graph, DualGraph):
        flipped = PercolationConfig(tuple(1 - b for b in bits))
        return graph.primal, flipped

    if graph.ambient_dim != 2:
        raise ValueError("duality only for d=2")
    faces = _face_orbits(graph)
    outer = min(faces, key=lambda orb: _signed_area(graph, orb))
    face_of_directed = {}
    labels = []
    for orb in faces:
        if orb == outer:
            lab = OUTER
        else:
            if len(orb) != 4:
                raise ValueError("bounded faces must be unit squares")
            xs = [graph.vertices[u] for u, _ in orb]
            lab = (min(p[0] for p in xs), min(p[1] for p in xs))
        labels.append(lab)
        for de in orb:
            face_of_directed[de] = lab
    dual_edges = []
    for u, v in graph.edges:
        iu, iv = graph.vertex_index[u], graph.vertex_index[v]
        dual_edges.append((face_of_directed[(iu, iv)], face_of_directed[(iv, iu)]))
    dual = DualGraph(tuple(sorted(set(labels), key=str)), tuple(dual_edges), graph)
    flipped = PercolationConfig(tuple(1 - b for b in bits))
    return dual, flipped


# ---------------------------------------------------------------------------
# Dobrushin domains and the diagonal (medial = Z^2) embedding


def to_black(v):
    """Primal vertex (x,y) -> black face label in the diagonal embedding."""
    return (v[0] - v[1], v[0] + v[1])


def face_center(f):
    return complex(f[0] + 0.5, f[1] + 0.5)


def shared_corner(f, g):
    """The medial vertex (integer corner) shared by two diagonally adjacent
    faces; this is the midpoint of the primal or dual edge f-g."""
    if abs(f[0] - g[0]) != 1 or abs(f[1] - g[1]) != 1:
        raise ValueError("faces are not diagonal neighbors")
    return (max(f[0], g[0]), max(f[1], g[1]))


def segment_faces(z, w):
    """(black face, white face) bordering the unit medial segment z-w."""
    (zx, zy), (wx, wy) = z, w
    if zx == wx:  # vertical segment, faces east/west
        y = min(zy, wy)
        cands = [(zx, y), (zx - 1, y)]
    elif zy == wy:
        x = min(zx, wx)
        cands = [(x, zy), (x, zy - 1)]
    else:
        raise ValueError("not a unit medial segment")
    if (cands[0][0] + cands[0][1]) % 2 == 0:
        return cands[0], cands[1]
    return cands[1], cands[0]


def segment_black(z, w):
    """The black face bordering the unit medial segment z-w."""
    return segment_faces(z, w)[0]


def oriented_segment(z, w):
    """Orient the medial segment z-w counterclockwise around its black face.

    Returns (tail, head); the direction head - tail equals i*(mid - center)
    up to the positive scale, center being the black face center.
    """
    black = segment_black(z, w)
    c = face_center(black)
    mid = complex(z[0] + w[0], z[1] + w[1]) / 2
    d = 1j * (mid - c)
    head = (round(mid.real + d.real), round(mid.imag + d.imag))
    tail = w if head == z else z
    if head not in (z, w):
        raise AssertionError
    return tail, head


def rotate_point(p, k):
    """Quarter-turn p by k*90 degrees ccw about (1/2, 1/2); integer-exact."""
    x, y = p
    for _ in range(k % 4):
        x, y = 1 - y, x
    return (x, y)


def rotate_face(f, k):
    """Rotate a face label by k*90 degrees ccw about (1/2, 1/2); the face
    center (i+1/2, j+1/2) maps to (-j+1/2, i+1/2), so parity is preserved."""
    i, j = f
    for _ in range(k % 4):
        i, j = -j, i
    return (i, j)


class DobrushinDomain:
    """A primal domain with two marked boundary points and all the medial
    structure the loop representation needs.

    All geometry below is in the diagonal embedding, already rotated so the
    exit edge e_b points east.
    """

    def __init__(self, primal, a, b):
        if primal.ambient_dim != 2:
            raise ValueError("Dobrushin domains are two-dimensional")
        if not primal.is_connected():
            raise ValueError("domain must be connected")
        if not primal.complement_connected():
            raise ValueError("domain complement must be connected")
        induced = {tuple(sorted((u, w)))
                   for u in primal.vertices for w in primal.vertices
                   if sum(abs(x - y) for x, y in zip(u, w)) == 1}
        if set(primal.edges) != induced:
            raise ValueError("domain must contain all induced edges")
        a, b = tuple(a), tuple(b)
        bd = set(primal.boundary())
        if a not in bd or b not in bd:
            raise ValueError("a and b must be boundary vertices")

        self.primal = primal
        self.a, self.b = a, b
        ab_v, ba_v, ab_e, ba_e = boundary_arcs(primal, a, b)
        self.ab_vertices, self.ba_vertices = ab_v, ba_v
        self.ab_edges, self.ba_edges = ab_e, ba_e
        ba_set = set(ba_e)
        self.free_edges = tuple(k for k in range(primal.n_edges)
                                if k not in ba_set)

        # unrotated diagonal geometry
        black = {v: to_black(v) for v in primal.vertices}
        blacks = set(black.values())
        mid = {}
        for k, (u, w) in enumerate(primal.edges):
            mid[k] = shared_corner(black[u], black[w])

        whites = self._hugging_whites(primal, black)
        forced_dual_mid = [shared_corner(whites[i], whites[i + 1])
                           for i in range(len(whites) - 1)]

        status = {}
        for k in self.free_edges:
            status[mid[k]] = ("free", k)
        for k in self.ba_edges:
            status[mid[k]] = ("primal", k)
        for z in forced_dual_mid:
            status[z] = ("dual", None)
        if len(status) != len(self.free_edges) + len(self.ba_edges) + len(forced_dual_mid):
            raise AssertionError("medial status vertices collide")

        # whites the curve can hug: the (ab)* wrap plus the flanks of every
        # free edge; segments whose white side lies elsewhere (outside the
        # wired arc, or across a degenerate slit) carry no curve
        in_play = set(whites)
        for k in self.free_edges:
            u, w = primal.edges[k]
            in_play.update(self._flanking_whites(black[u], black[w]))

        e_a, e_b = self._find_marked_edges(status, blacks, in_play)

        # global rotation: make e_b point east
        tail, head = e_b
        d = (head[0] - tail[0], head[1] - tail[1])
        k_rot = {(1, 0): 0, (0, 1): 3, (-1, 0): 2, (0, -1): 1}[d]
        self.rotation = k_rot
        rp = lambda p: rotate_point(p, k_rot)
        rf = lambda f: rotate_face(f, k_rot)

        self.black = {v: rf(black[v]) for v in primal.vertices}
        self.blacks = frozenset(rf(f) for f in blacks)
        self.medial_of_edge = {k: rp(z) for k, z in mid.items()}
        self.abstar_whites = tuple(rf(w) for w in whites)
        self.forced_dual = frozenset(rp(z) for z in forced_dual_mid)
        self.forced_primal = frozenset(rp(mid[k]) for k in self.ba_edges)
        self.status = {rp(z): s for z, s in status.items()}
        self.e_a = (rp(e_a[0]), rp(e_a[1]))
        self.e_b = (rp(e_b[0]), rp(e_b[1]))
        self.free_pos = {k: t for t, k in enumerate(self.free_edges)}

        # whites of the dual domain: flanks of free edges plus the (ab)* arc
        dual_edges = {}
        for k in self.free_edges:
            u, w = primal.edges[k]
            z = self.medial_of_edge[k]
            f1, f2 = self._flanking_whites(self.black[u], self.black[w])
            dual_edges[k] = (f1, f2)
        self.dual_edge_of_free_edge = dual_edges
        self.whites = frozenset(itertools.chain(
            self.abstar_whites, *dual_edges.values()))

    @staticmethod
    def _flanking_whites(bf, bg):
        """The two whites at the medial vertex of the primal edge bf-bg."""
        z = shared_corner(bf, bg)
        cands = [(z[0] - 1, z[1] - 1), (z[0], z[1] - 1),
                 (z[0] - 1, z[1]), (z[0], z[1])]
        whites = [f for f in cands if (f[0] + f[1]) % 2 == 1]
        if len(whites) != 2:
            raise AssertionError
        return tuple(whites)

    def _hugging_whites(self, primal, black):
        """Exterior whites along the (ab) arc, wrap whites at a and b
        included; consecutive entries are dual-adjacent.

        Each directed (ab) edge contributes the white on its exterior
        (right-of-travel) side; at every vertex in between, and in the wrap
        sectors at a and b bounded by the adjacent (ba) edges, the side
        whites of the black face fill the exterior corner gaps.
        """
        walkv = list(self.ab_vertices)
        n = len(walkv)

        def flank_white(p, q):
            # exterior white at the medial vertex of p-q, right of travel
            bp, bq = black[p], black[q]
            cp = face_center(bp)
            d = face_center(bq) - cp
            out = []
            for w in self._flanking_whites(bp, bq):
                cr = face_center(w) - cp
                if d.real * cr.imag - d.imag * cr.real < 0:
                    out.append(w)
            if len(out) != 1:
                raise AssertionError
            return out[0]

        def gap_whites(q, w_in, w_out):
            # side whites of black[q] strictly between w_in and w_out, ccw
            if w_in == w_out:
                return []
            bq = black[q]
            sides = [(bq[0] + dx, bq[1] + dy) for dx, dy in CCW_SIDES]
            out = []
            t = (sides.index(w_in) + 1) % 4
            while sides[t] != w_out:
                out.append(sides[t])
                t = (t + 1) % 4
            return out

        flanks = [flank_white(walkv[t], walkv[t + 1]) for t in range(n - 1)]
        if self.ba_edges:
            # sectors at a and b are bounded by the neighboring (ba) flanks
            w_in_a = flank_white(self.ba_vertices[-2], self.a)
            w_out_b = flank_white(self.b, self.ba_vertices[1])
        else:
            # degenerate a == b: no wrap sector at a, so the chain stays
            # open across the side of black(a) facing the two missing
            # neighbors; both marked edges dangle into that slit and are
            # anti-parallel, which makes the exploration wind by pi
            # between them
            w_in_a = flanks[0]
            w_out_b = None

        seq = list(gap_whites(walkv[0], w_in_a, flanks[0]))
        for t in range(n - 1):
            seq.append(flanks[t])
            if t + 1 < n - 1:
                seq.extend(gap_whites(walkv[t + 1], flanks[t], flanks[t + 1]))
        if w_out_b is not None:
            seq.extend(gap_whites(walkv[-1], flanks[-1], w_out_b))

        out = [seq[0]]
        for w in seq[1:]:
            if w != out[-1]:
                out.append(w)
        for w1, w2 in zip(out, out[1:]):
            if abs(w1[0] - w2[0]) != 1 or abs(w1[1] - w2[1]) != 1:
                raise AssertionError("hugging whites not dual-adjacent")
        return out

    # arc pairing: at a status vertex the two arcs avoid the open diagonal
    @staticmethod
    def arcs_at(z, open_primal, blacks_ne_sw):
        """The two arcs at medial vertex z as ((in,out),(in,out)) compass
        pairs; open diagonal NE-SW pairs (N,W),(S,E), NW-SE pairs (N,E),(S,W).

        blacks_ne_sw: True when the blacks at z sit NE and SW (even corner).
        open_primal: True when the primal edge through z is open.
        """
        diag_ne_sw = blacks_ne_sw if open_primal else not blacks_ne_sw
        if diag_ne_sw:
            return (((0, 1), (-1, 0)), ((0, -1), (1, 0)))
        return (((0, 1), (1, 0)), ((0, -1), (-1, 0)))

    def blacks_ne_sw(self, z):
        """True when the two black faces at corner z are its NE and SW
        quadrant faces (corner parity even)."""
        return (z[0] + z[1]) % 2 == 0

    def curve_segment(self, z, w):
        """True when the unit medial segment z-w carries curve: its black
        side is a face of the domain and its white side is a wrap white or
        a flank of a free edge.

        Segments failing this (outside the wired arc, across a degenerate
        slit, between a wrap white and the exterior) are dead even when
        both endpoints are status vertices.
        """
        bf, wf = segment_faces(z, w)
        return bf in self.blacks and wf in self.whites

    def _find_marked_edges(self, status, blacks, in_play):
        """Locate e_a and e_b, the only two medial half-edges carrying curve
        whose far end is not a status vertex.

        A slot carries curve when its black side is a domain face and its
        white side is in play. At forced vertices the arc pairing is fixed;
        at free vertices it depends on the edge state, so a dangling slot is
        only allowed when both pairings pair it with live slots, making the
        dangling half-edge configuration-independent (this happens next to
        a degenerate marked point a = b).
        """
        def curve(z, d):
            w = (z[0] + d[0], z[1] + d[1])
            bf, wf = segment_faces(z, w)
            return bf in blacks and wf in in_play

        dangling = []
        for z, (kind, _) in status.items():
            ne_sw = (z[0] + z[1]) % 2 == 0
            live = {d: curve(z, d) and
                    (z[0] + d[0], z[1] + d[1]) in status for d in CCW_SIDES}
            dang = {d: curve(z, d) and
                    (z[0] + d[0], z[1] + d[1]) not in status for d in CCW_SIDES}
            if kind == "free":
                for d in CCW_SIDES:
                    if not dang[d]:
                        continue
                    partners = []
                    for open_primal in (False, True):
                        for d1, d2 in self.arcs_at(z, open_primal, ne_sw):
                            if d == d1:
                                partners.append(d2)
                            elif d == d2:
                                partners.append(d1)
                    if not all(live[p] for p in partners):
                        raise AssertionError(
                            "configuration-dependent dangling edge at %s" % (z,))
                    dangling.append((z, (z[0] + d[0], z[1] + d[1])))
                continue
            for d1, d2 in self.arcs_at(z, kind == "primal", ne_sw):
                if live[d1] and dang[d2]:
                    dangling.append((z, (z[0] + d2[0], z[1] + d2[1])))
                elif live[d2] and dang[d1]:
                    dangling.append((z, (z[0] + d1[0], z[1] + d1[1])))
        if len(dangling) != 2:
            raise AssertionError("expected exactly 2 dangling half-edges, got %d"
                                 % len(dangling))
        marked = []
        for z, dead in dangling:
            tail, head = oriented_segment(z, dead)
            marked.append((tail, head, head == z))
        (t1, h1, in1), (t2, h2, in2) = marked
        if in1 == in2:
            raise AssertionError("marked edges do not form an entry/exit pair")
        e_a = (t1, h1) if in1 else (t2, h2)
        e_b = (t2, h2) if in1 else (t1, h1)
        return e_a, e_b

    # quantities entering the loop count identity
    def v_count(self):
        """|V(Omega)| - |(ba)| + 1, the vertex count entering l = 2k + o - v."""
        return self.primal.n_vertices - len(set(self.ba_vertices)) + 1


def medial_domain(primal, a, b):
    """Construct the Dobrushin domain (primal, a, b) with its medial data."""
    return DobrushinDomain(primal, a, b)


# ---------------------------------------------------------------------------
# graph file format: `v x y` / `e x1 y1 x2 y2` / `a x y` / `b x y`


def write_graph(path, graph, a=None, b=None):
    with open(path, "w") as fh:
        for v in graph.vertices:
            fh.write("v %s\n" % " ".join(map(str, v)))
        for u, w in graph.edges:
            fh.write("e %s %s\n" % (" ".join(map(str, u)), " ".join(map(str, w))))
        if a is not None:
            fh.write("a %s\n" % " ".join(map(str, a)))
        if b is not None:
            fh.write("b %s\n" % " ".join(map(str, b)))


def read_graph(path):
    """Returns (graph, a, b); a and b are None when absent."""
    vertices, edges = [], []
    a = b = None
    with open(path) as fh:
        for line in fh:
            line = line.split("#")[0].strip()
            if not line:
                continue
            tok = line.split()
            kind, nums = tok[0], [int(t) for t in tok[1:]]
            if kind == "v":
                vertices.append(tuple(nums))
            elif kind == "e":
                d = len(nums) // 2
                edges.append((tuple(nums[:d]), tuple(nums[d:])))
            elif kind == "a":
                a = tuple(nums)
            elif kind == "b":
                b = tuple(nums)
            else:
                raise ValueError("unknown record %r" % kind)
    return LatticeGraph(vertices, edges), a, b
