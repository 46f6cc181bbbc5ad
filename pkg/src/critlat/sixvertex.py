"""Six-vertex model on a torus and its random-cluster correspondence.

Torus geometry.  In the rotated coordinates u = x1 + x2, v = x1 - x2 the
diagonal torus {0 <= x1+x2 <= M, |x1-x2| <= N} of Z^2 (opposite boundaries
glued at equal u, respectively equal v) becomes a plain doubly periodic
grid: sites are the pairs (u, v) with u + v even, u mod M, v mod 2N, and
every site carries two eastward bonds, to (u+1, v+1) and to (u+1, v-1).
Site parity closes up only for M even; the six-vertex model itself lives on
the medial graph, which is the ordinary M x 2N square-lattice torus with
vertices at the bond midpoints (i + 1/2, j + 1/2), and makes sense for all
M, N >= 1.

Arrows and weights.  A six-vertex configuration orients every medial edge.
Horizontal medial edges point towards +u (north-east in the original frame,
bit 1) or -u; vertical edges point towards +v (bit 1).  The ice rule (two
arrows in, two out at every medial vertex) reads W + S = E + N in bits, so
the number of +u arrows crossing a cut u = k is the same for every k; the
state at the cut u = 0 is the conserved "arrow line" and its popcount is
written |w|.  At weights a = b = 1 only the two vertex types where the
horizontal arrow flips are charged, each with weight c, so a configuration
weighs c^{#flips}.

Transfer matrix.  States are bitmasks of the 2N arrows crossing a cut.  The
column-to-column operator V conserves popcount.  Within a block the entry
V[W, E] is c^{#flips} times the number of vertical completions of the
column, which is 2 for W = E, 1 if the flip positions alternate in sign
around the column and 0 otherwise (the vertical arrows perform a {0,1}
walk whose steps are W_j - E_j).  Z(N, M) = tr(V^M), and the restricted
trace Zt over the popcount N-1 block decays like exp(-M * rate).  For
c = sqrt(2 + sqrt(q)) > 2 the Bethe ansatz value of the limiting rate is

    rate(q) = lambda + 2 sum_{k>=1} (-1)^k tanh(k lambda) / k,
    cosh(lambda) = sqrt(q) / 2,

which vanishes as q -> 4+ like 8 exp(-pi^2 / sqrt(q-4)) (note that
sqrt(q-4) = 2 sinh(lambda)).

Random-cluster side.  TorusRc holds the primal torus, its dual (sites of
odd parity) and the medial loop structure.  Cluster homology is computed by
lifting clusters to the universal cover: a cycle closing with displacement
(alpha*M, beta*2N) contributes the winding class (alpha, beta).  A cluster
is non-retractible if its winding subgroup of Z^2 is nonzero, and "winds
north-east" if some class has alpha != 0.  Loops of the interface between
primal and dual clusters are traced on the medial torus; orienting them
with weight exp(+-mu) per retractible loop, e^mu + e^-mu = sqrt(q), and
reading each oriented loop configuration as an arrow configuration
reproduces the six-vertex sector sums exactly (oriented_sector_sums), which
is the mechanism behind rc6v_verify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import logsumexp

from .oracle import MAX_ENUM_EDGES, p_self_dual

# dense-block transfer matrices stay cheap up to C(14, 7) = 3432 states
MAX_TRANSFER_N = 7


def c_from_q(q):
    """Six-vertex c-weight coupled to the cluster weight q."""
    if q <= 0:
        raise ValueError("cluster weight q must be positive")
    return math.sqrt(2.0 + math.sqrt(q))


def block_states(n_arrows, m):
    """All arrow-line bitmasks of length n_arrows with popcount m, sorted."""
    return tuple(s for s in range(1 << n_arrows) if bin(s).count("1") == m)


def transfer_block(N, c, m):
    """Dense popcount-m block of the column-to-column transfer operator."""
    states = block_states(2 * N, m)
    bits = np.array([[(s >> j) & 1 for j in range(2 * N)] for s in states],
                    dtype=np.int8)
    B = len(states)
    V = np.empty((B, B))
    for lo in range(0, B, 256):
        d = bits[lo:lo + 256, None, :] - bits[None, :, :]
        # vertical arrows walk S_{j+1} = S_j + (W_j - E_j) on {0,1}; the
        # number of valid starting values is 2 minus the cumulative range
        cum = np.cumsum(d, axis=2)
        spread = np.maximum(cum.max(axis=2), 0) - np.minimum(cum.min(axis=2), 0)
        count = np.clip(2 - spread, 0, None)
        V[lo:lo + 256] = count * c ** np.abs(d).sum(axis=2)
    return V


class TransferMatrix:
    """Popcount-blocked row-to-row operator of the toroidal six-vertex model."""

    def __init__(self, N, c):
        if not 1 <= N <= MAX_TRANSFER_N:
            raise ValueError("transfer matrix limited to 1 <= N <= %d" % MAX_TRANSFER_N)
        if c <= 0:
            raise ValueError("c-weight must be positive")
        self.N = N
        self.c = float(c)
        self.blocks = tuple(transfer_block(N, c, m) for m in range(2 * N + 1))
        self._eigs = None

    @property
    def eigs(self):
        """Per-block spectra; blocks are symmetric so eigvalsh applies."""
        if self._eigs is None:
            self._eigs = tuple(np.linalg.eigvalsh(b) for b in self.blocks)
        return self._eigs

    def full(self):
        """Dense 4^N operator assembled from the blocks (cross-checks only)."""
        if self.N > 4:
            raise ValueError("full matrix materialized only for N <= 4")
        dim = 1 << (2 * self.N)
        out = np.zeros((dim, dim))
        for m, block in enumerate(self.blocks):
            idx = np.array(block_states(2 * self.N, m), dtype=np.intp)
            out[np.ix_(idx, idx)] = block
        return out

    def apply(self, vec):
        """Matrix-free product vec @ V via the local vertex rule.

        The column is contracted as a product of one two-state auxiliary
        tensor per row: R[s, w, s', e] is nonzero when s' = s + w - e lies
        in {0,1}, with weight c when w != e, and the auxiliary index is
        traced at the end.
        """
        n = 2 * self.N
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (1 << n,):
            raise ValueError("state vector must have length 4^N")
        R = np.zeros((2, 2, 2, 2))
        R[0, 0, 0, 0] = R[0, 1, 0, 1] = R[1, 0, 1, 0] = R[1, 1, 1, 1] = 1.0
        R[0, 1, 1, 0] = R[1, 0, 0, 1] = self.c
        A = np.zeros((2, 2, 1 << n))
        A[0, 0] = A[1, 1] = vec
        for j in range(n):
            A = A.reshape(2, 2, 1 << (n - 1 - j), 2, 1 << j)
            A = np.einsum("swte,ashwl->athel", R, A).reshape(2, 2, 1 << n)
        return A[0, 0] + A[1, 1]

    def sector_trace(self, M, m):
        """tr restricted to the popcount-m block of the M-th power."""
        return float(np.sum(self.eigs[m] ** M))

    def trace_power(self, M):
        return sum(self.sector_trace(M, m) for m in range(2 * self.N + 1))

    def log_sector_trace(self, M, m):
        """(log |tr|, sign) of the restricted trace, safe for large M."""
        lam = self.eigs[m]
        nz = np.abs(lam) > 0
        if not nz.any():
            return -math.inf, 0.0
        return logsumexp(M * np.log(np.abs(lam[nz])), b=np.sign(lam[nz]) ** M,
                         return_sign=True)

    def log_trace_power(self, M):
        parts = [self.log_sector_trace(M, m) for m in range(2 * self.N + 1)]
        vals = np.array([p[0] for p in parts])
        signs = np.array([p[1] for p in parts])
        return logsumexp(vals, b=signs, return_sign=True)


def transfer_matrix(N, c):
    return TransferMatrix(N, c)


def sector_traces(N, M, c):
    """(Z, Zt): full trace of V^M and its popcount N-1 restriction."""
    V = TransferMatrix(N, c)
    return V.trace_power(M), V.sector_trace(M, N - 1)


def spectral_rate(N, M, c):
    """-(1/M) log(Zt / Z), evaluated in log space."""
    V = TransferMatrix(N, c)
    lzt, st = V.log_sector_trace(M, N - 1)
    lz, sz = V.log_trace_power(M)
    if st <= 0 or sz <= 0:
        raise ArithmeticError("restricted traces must be positive")
    return -(lzt - lz) / M


def gap_rate(N, c):
    """log of the ratio of the two dominant block eigenvalues, the M -> oo
    limit of spectral_rate at fixed N."""
    V = TransferMatrix(N, c)
    top = max(e[-1] for e in V.eigs)
    return math.log(top / V.eigs[N - 1][-1])


# ---------------------------------------------------------------------------
# closed-form rate


def closed_form_rate(q):
    """lambda + 2 sum (-1)^k tanh(k lambda)/k at cosh(lambda) = sqrt(q)/2.

    Rewritten through tanh(x) = 1 - 2/(e^{2x}+1) as

        lambda - 2 log 2 - 4 sum_{k>=1} (-1)^k / (k (e^{2 k lambda} + 1)),

    whose tail is alternating with geometrically decaying terms, so the
    remainder is bounded by the first omitted term.  The value is smaller
    than the summands by a factor ~ exp(-pi^2/(2 sinh lambda)), so the
    working precision is raised to absorb that cancellation.
    """
    if q <= 4:
        raise ValueError("closed-form rate defined for q > 4 only")
    lam_f = math.acosh(math.sqrt(q) / 2.0)
    cancel_digits = math.pi ** 2 / (2.0 * math.sinh(lam_f)) / math.log(10.0)
    with mpmath.workdps(int(cancel_digits) + 30):
        lam = mpmath.acosh(mpmath.sqrt(q) / 2)
        target = mpmath.mpf(10) ** (-(int(cancel_digits) + 22))
        total = mpmath.mpf(0)
        k = 1
        while True:
            term = mpmath.mpf(-1) ** k / (k * (mpmath.exp(2 * k * lam) + 1))
            total += term
            if abs(term) < target:
                break
            k += 1
        rate = lam - 2 * mpmath.log(2) - 4 * total
        return float(rate)


def asymptotic_rate(q):
    """Leading small-(q-4) form of the rate, 8 exp(-pi^2 / sqrt(q-4))."""
    if q <= 4:
        raise ValueError("asymptotic form defined for q > 4 only")
    return 8.0 * math.exp(-math.pi ** 2 / math.sqrt(q - 4.0))


def rate_report(q, Ns=(2, 3, 4, 5), M=256):
    """Closed form vs finite-N spectral gaps and the q -> 4 asymptote."""
    closed = closed_form_rate(q)
    c = c_from_q(q)
    rows = []
    for N in Ns:
        g = gap_rate(N, c)
        rows.append({"N": N, "gap_rate": g, "spectral_rate_M": spectral_rate(N, M, c),
                     "abs_error": abs(g - closed)})
    return {"q": q, "c": c, "closed_form": closed,
            "asymptotic": asymptotic_rate(q),
            "ratio_to_asymptotic": closed / asymptotic_rate(q), "per_N": rows}


# ---------------------------------------------------------------------------
# brute-force oracle over arrow configurations

# the six ice vertices keyed by (W, E, S, N) bits; 1/2 straight, 3/4 turned,
# 5/6 charged (horizontal flip)
_VERTEX_TYPE = {(1, 1, 1, 1): 1, (0, 0, 0, 0): 2, (1, 1, 0, 0): 3,
                (0, 0, 1, 1): 4, (1, 0, 0, 1): 5, (0, 1, 1, 0): 6}


def _medial_slots(N, M):
    """Per-vertex slots (edge id, bit value meaning inward).

    Horizontal edge (i, j), id i*2N + j, runs east from vertex (i, j); bit 1
    points +u.  Vertical edge (i, j), id offset by M*2N, runs north from
    (i, j); bit 1 points +v.
    """
    P = 2 * N
    nh = M * P
    slots = {}
    for i in range(M):
        for j in range(P):
            w = ((i - 1) % M) * P + j
            e = i * P + j
            s = nh + i * P + (j - 1) % P
            n = nh + i * P + j
            slots[(i, j)] = ((w, 1), (e, 0), (s, 1), (n, 0))
    return slots


def brute_force_census(N, M, c):
    """Depth-first enumeration of all ice configurations on the M x 2N torus.

    Independent of the transfer matrix: edges are assigned one by one with
    local in/out pruning at the medial vertices.  Returns total weight,
    per-|w| sector weights and the configuration count.
    """
    P = 2 * N
    nh = M * P
    n_edges = 2 * nh
    slots = _medial_slots(N, M)
    # backrefs: which (vertex, inward-bit) pairs each edge participates in
    refs = [[] for _ in range(n_edges)]
    for v, four in slots.items():
        for eid, pol in four:
            refs[eid].append((v, pol))
    # assignment order: a column of horizontal edges, then the vertical
    # column to its west, so vertices complete as early as possible
    order = [0 * P + j for j in range(P)]
    for i in range(1, M):
        order += [i * P + j for j in range(P)]
        order += [nh + (i - 1) * P + j for j in range(P)]
    order += [nh + (M - 1) * P + j for j in range(P)]
    assert sorted(order) == list(range(n_edges))

    bits = [0] * n_edges
    n_set = dict.fromkeys(slots, 0)
    n_in = dict.fromkeys(slots, 0)
    cut = [(M - 1) * P + j for j in range(P)]  # horizontal edges across u = 0
    sectors = {}
    count = 0
    total = 0.0

    def weight_and_sector():
        flips = 0
        for four in slots.values():
            wesn = (bits[four[0][0]], bits[four[1][0]],
                    bits[four[2][0]], bits[four[3][0]])
            # KeyError here would mean the pruning let an ice violation through
            if _VERTEX_TYPE[wesn] >= 5:
                flips += 1
        return c ** flips, sum(bits[e] for e in cut)

    def rec(k):
        nonlocal count, total
        if k == len(order):
            w, sec = weight_and_sector()
            count += 1
            total += w
            sectors[sec] = sectors.get(sec, 0.0) + w
            return
        eid = order[k]
        for b in (0, 1):
            bits[eid] = b
            ok = True
            touched = []
            for v, pol in refs[eid]:
                n_set[v] += 1
                n_in[v] += b == pol
                touched.append((v, b == pol))
                if n_in[v] > 2 or n_set[v] - n_in[v] > 2 or \
                        (n_set[v] == 4 and n_in[v] != 2):
                    ok = False
            if ok:
                rec(k + 1)
            for v, inw in touched:
                n_set[v] -= 1
                n_in[v] -= inw
        bits[eid] = 0

    rec(0)
    return {"Z": total, "sectors": sectors, "configs": count}


def brute_force_Z(N, M, c):
    return brute_force_census(N, M, c)["Z"]


# ---------------------------------------------------------------------------
# random-cluster torus


def _winding_subgroup(gens):
    """Hermite form of the subgroup of Z^2 spanned by the winding classes.

    Canonical: ((a, b), (0, d)) with a > 0, d > 0, 0 <= b < d, degenerate
    rows dropped, so any two generator lists of the same subgroup agree.
    """
    rows = [g for g in gens if g != (0, 0)]
    if not rows:
        return ()
    lead = None
    tail = 0
    for a, b in rows:
        if lead is None:
            lead = (a, b)
        else:
            a1, b1 = lead
            while a:
                (a1, b1), (a, b) = (a, b), (a1 - (a1 // a) * a, b1 - (a1 // a) * b)
            lead = (a1, b1)
            tail = math.gcd(tail, b)
    a, b = lead
    if a == 0:
        tail = math.gcd(tail, b)
        return ((0, tail),) if tail else ()
    if a < 0:
        a, b = -a, -b
    if tail:
        b %= tail
        return ((a, b), (0, tail))
    return ((a, b),)


@dataclass(frozen=True)
class ClusterCensus:
    count: int            # all clusters, isolated sites included
    subgroups: tuple      # canonical winding subgroup per cluster

    @property
    def n_nonretractible(self):
        return sum(1 for h in self.subgroups if h)

    @property
    def n_winding_ne(self):
        # winds around the torus with a nonzero u-component
        return sum(1 for h in self.subgroups if any(r[0] for r in h))


# loop pairing at a medial vertex, keyed (slope is +1, primal edge open);
# slots 0=E 1=N 2=W 3=S
_PAIRS = {
    (True, True): {2: 1, 1: 2, 3: 0, 0: 3},
    (True, False): {2: 3, 3: 2, 1: 0, 0: 1},
    (False, True): {1: 0, 0: 1, 3: 2, 2: 3},
    (False, False): {2: 1, 1: 2, 3: 0, 0: 3},
}
_STEP = ((1, 0), (0, 1), (-1, 0), (0, -1))  # E N W S
_OPPOSITE = (2, 3, 0, 1)


class TorusRc:
    """Random-cluster torus with homology and medial-loop bookkeeping.

    Primal sites have even u + v parity, dual sites odd; bond k sits under
    the medial vertex (i, j) = divmod(k, 2N) and has slope +1 (towards
    north-east) when i + j is even.  Dual bond k crosses primal bond k.
    """

    def __init__(self, N, M):
        if N < 1 or M < 2 or M % 2:
            raise ValueError("torus needs N >= 1 and even M >= 2")
        self.N = N
        self.M = M
        self.P = 2 * N
        P = self.P
        self.sites = [(i, j) for i in range(M) for j in range(P) if (i + j) % 2 == 0]
        self.dual_sites = [(i, j) for i in range(M) for j in range(P) if (i + j) % 2]
        self.site_id = {s: k for k, s in enumerate(self.sites)}
        self.dual_id = {s: k for k, s in enumerate(self.dual_sites)}
        self.edges = []
        self.dual_edges = []
        for i in range(M):
            for j in range(P):
                if (i + j) % 2 == 0:
                    a, b = (i, j), ((i + 1) % M, (j + 1) % P)
                    self.edges.append((self.site_id[a], self.site_id[b], 1, 1))
                    da, db = ((i + 1) % M, j), (i, (j + 1) % P)
                    self.dual_edges.append((self.dual_id[da], self.dual_id[db], -1, 1))
                else:
                    a, b = (i, (j + 1) % P), ((i + 1) % M, j)
                    self.edges.append((self.site_id[a], self.site_id[b], 1, -1))
                    da, db = (i, j), ((i + 1) % M, (j + 1) % P)
                    self.dual_edges.append((self.dual_id[da], self.dual_id[db], 1, 1))
        self.n_edges = len(self.edges)
        self.n_sites = len(self.sites)

    def _census(self, edges, n_sites, mask, reverse=False):
        adj = [[] for _ in range(n_sites)]
        for k, (a, b, du, dv) in enumerate(edges):
            if mask >> k & 1:
                adj[a].append((b, du, dv))
                adj[b].append((a, -du, -dv))
        if reverse:
            adj = [list(reversed(x)) for x in adj]
        roots = range(n_sites - 1, -1, -1) if reverse else range(n_sites)
        lift = [None] * n_sites
        subs = []
        for root in roots:
            if lift[root] is not None:
                continue
            lift[root] = (0, 0)
            stack = [root]
            gens = []
            while stack:
                x = stack.pop()
                lx, ly = lift[x]
                for y, du, dv in adj[x]:
                    pos = (lx + du, ly + dv)
                    if lift[y] is None:
                        lift[y] = pos
                        stack.append(y)
                    else:
                        gu, gv = pos[0] - lift[y][0], pos[1] - lift[y][1]
                        if gu or gv:
                            # a cycle closed; its displacement is a full
                            # period multiple by construction
                            assert gu % self.M == 0 and gv % self.P == 0
                            gens.append((gu // self.M, gv // self.P))
            subs.append(_winding_subgroup(gens))
        return ClusterCensus(len(subs), tuple(subs))

    def clusters(self, mask, reverse=False):
        """Primal cluster census of the open bonds in mask."""
        return self._census(self.edges, self.n_sites, mask, reverse)

    def dual_clusters(self, mask, reverse=False):
        """Dual cluster census; dual bond k is open iff primal bond k is closed."""
        dual_mask = ~mask & ((1 << self.n_edges) - 1)
        return self._census(self.dual_edges, len(self.dual_sites), dual_mask, reverse)

    def all_dual_retractible(self, mask):
        """1 iff every dual cluster is retractible."""
        return int(self.dual_clusters(mask).n_nonretractible == 0)

    def one_winding_pair(self, mask):
        """Exactly one primal and one dual cluster wind north-east."""
        return self.clusters(mask).n_winding_ne == 1 and \
            self.dual_clusters(mask).n_winding_ne == 1

    def loop_census(self, mask):
        """Interface loops on the medial torus.

        Returns a list of (n_medial_edges, cut_visits, alpha, beta) with
        (alpha, beta) the winding class and cut_visits the number of
        horizontal medial edges the loop uses across the cut u = 0; the
        signed crossing count always equals alpha.
        """
        M, P = self.M, self.P
        seen = set()
        out = []
        for i0 in range(M):
            for j0 in range(P):
                for s0 in (0, 1):
                    if ((i0, j0), s0) in seen:
                        continue
                    v, slot = (i0, j0), s0
                    du = dv = 0
                    length = 0
                    cut = 0
                    signed = 0
                    while True:
                        seen.add((v, slot))
                        dx, dy = _STEP[slot]
                        if slot == 0 and v[0] == M - 1:
                            cut += 1
                            signed += 1
                        if slot == 2 and v[0] == 0:
                            cut += 1
                            signed -= 1
                        du += dx
                        dv += dy
                        length += 1
                        v = ((v[0] + dx) % M, (v[1] + dy) % P)
                        enter = _OPPOSITE[slot]
                        seen.add((v, enter))
                        k = v[0] * P + v[1]
                        pairs = _PAIRS[((v[0] + v[1]) % 2 == 0, bool(mask >> k & 1))]
                        slot = pairs[enter]
                        if v == (i0, j0) and slot == s0:
                            break
                    assert du % M == 0 and dv % P == 0
                    alpha, beta = du // M, dv // P
                    assert signed == alpha
                    out.append((length, cut, alpha, beta))
        # every medial edge lies on exactly one loop
        assert sum(l for l, _, _, _ in out) == 2 * M * P
        return out

    def loop_counts(self, mask):
        """(total loops, non-retractible loops)."""
        census = self.loop_census(mask)
        return len(census), sum(1 for _, _, a, b in census if a or b)


def _orientation_shifts(alphas):
    """Counts of the total signed cut shift over the 2^len orientations.

    Each loop contributes +alpha or -alpha to the shift of the +u arrow
    count at the cut (times 1/2), depending on its orientation.
    """
    shifts = {0: 1}
    for a in alphas:
        nxt = {}
        for d, n in shifts.items():
            for dd in (d + a, d - a):
                nxt[dd] = nxt.get(dd, 0) + n
        shifts = nxt
    return shifts


def loop_weight_constant(rc, q, p):
    """(min, max) over configurations of sqrt(q)^{l + 2s} / w_RC.

    l is the medial loop count, s the all-dual-clusters-retractible
    indicator and w_RC = p^open (1-p)^closed q^clusters; the ratio is
    configuration independent, which pins the loop tracer, the homology
    lift and the torus Euler relation at once.
    """
    sq = math.sqrt(q)
    lo = hi = None
    for mask in range(1 << rc.n_edges):
        o = bin(mask).count("1")
        w = p ** o * (1 - p) ** (rc.n_edges - o) * q ** rc.clusters(mask).count
        l, _ = rc.loop_counts(mask)
        s = rc.all_dual_retractible(mask)
        val = sq ** (l + 2 * s) / w
        lo = val if lo is None else min(lo, val)
        hi = val if hi is None else max(hi, val)
    return lo, hi


def oriented_sector_sums(rc, q):
    """Arrow-sector weights rebuilt from oriented interface loops.

    Every loop of every bond configuration is oriented; a retractible loop
    carries weight exp(+-mu) with e^mu + e^-mu = sqrt(q) (so the pair sums
    to sqrt(q)) and shifts nothing, while a loop of winding class
    (alpha, beta) carries weight 1 and shifts the +u arrow count at the cut
    by +-alpha.  The resulting map onto arrow configurations is weight
    preserving, so the totals must match the transfer-matrix sector traces
    at c = sqrt(2 + sqrt(q)) exactly.
    """
    if q <= 0:
        raise ValueError("cluster weight q must be positive")
    sq = math.sqrt(q)
    sectors = {}
    for mask in range(1 << rc.n_edges):
        census = rc.loop_census(mask)
        base = sq ** sum(1 for _, _, a, b in census if a == 0 and b == 0)
        shifts = _orientation_shifts([a for _, _, a, b in census if a or b])
        for d, n in shifts.items():
            assert d % 2 == 0
            m = rc.N + d // 2
            if not 0 <= m <= 2 * rc.N:
                raise AssertionError("cut shift outside arrow range")
            sectors[m] = sectors.get(m, 0.0) + n * base
    return sectors


def rc6v_verify(N, M, q, p=None, tol=1e-8):
    """Torus correspondence report between random-cluster and six-vertex sums.

    All quantities come from exact enumeration of the 2^(2MN) bond
    configurations plus the transfer matrix.  The report covers:
      * loop_constant_spread: relative spread of sqrt(q)^{l+2s} / w_RC,
        which a correct loop/homology bookkeeping forces to zero;
      * partition_identity_gap: Z6V against c0 * sum of
        (2/sqrt(q))^{l0} q^{-s} w_RC, the orientation sum over loops;
      * oriented_sector_gap: worst relative mismatch between oriented loop
        sector sums and the transfer sector traces;
      * rel_gap / identity_pass: the cluster identity
        phi[A] = q (Zt/Z) phi[(4/q)^{k_nc}], with A the event that exactly
        one primal and one dual cluster wind north-east and k_nc the number
        of non-retractible primal clusters;
      * zt_from_A / zt_leak: how much of the restricted trace Zt is fed by
        configurations in A versus outside it.
    """
    if N % 2 or M % 2:
        raise ValueError("correspondence needs N and M even")
    if q <= 4:
        raise ValueError("correspondence stated for q > 4")
    rc = TorusRc(N, M)
    if rc.n_edges > MAX_ENUM_EDGES:
        raise ValueError("refusing to enumerate more than %d edges" % MAX_ENUM_EDGES)
    if p is None:
        p = p_self_dual(q)
    sq = math.sqrt(q)
    E = rc.n_edges
    Ztot = 0.0
    wA = 0.0
    e_knc = 0.0
    e_knc_s = 0.0
    e_loops = 0.0
    zt_from_A = 0.0
    c0_lo = c0_hi = None
    sectors = {}
    for mask in range(1 << E):
        prim = rc.clusters(mask)
        dual = rc.dual_clusters(mask)
        o = bin(mask).count("1")
        w = p ** o * (1 - p) ** (E - o) * q ** prim.count
        census = rc.loop_census(mask)
        l = len(census)
        alphas = [a for _, _, a, b in census if a or b]
        l0 = len(alphas)
        s = int(dual.n_nonretractible == 0)
        val = sq ** (l + 2 * s) / w
        c0_lo = val if c0_lo is None else min(c0_lo, val)
        c0_hi = val if c0_hi is None else max(c0_hi, val)
        Ztot += w
        e_knc += w * (4.0 / q) ** prim.n_nonretractible
        e_knc_s += w * (4.0 / q) ** prim.n_nonretractible * q ** (-s)
        e_loops += w * (2.0 / sq) ** l0 * q ** (-s)
        base = sq ** (l - l0)
        shifts = _orientation_shifts(alphas)
        for d, n in shifts.items():
            m = rc.N + d // 2
            sectors[m] = sectors.get(m, 0.0) + n * base
        if prim.n_winding_ne == 1 and dual.n_winding_ne == 1:
            wA += w
            zt_from_A += shifts.get(-2, 0) * base
    c = c_from_q(q)
    V = TransferMatrix(N, c)
    Z6 = V.trace_power(M)
    Zt = V.sector_trace(M, N - 1)
    c0 = c0_hi
    phi_A = wA / Ztot
    rhs = q * (Zt / Z6) * (e_knc / Ztot)
    gap = abs(phi_A - rhs) / max(abs(rhs), 1e-300)
    # the orientation sum over loops IS the six-vertex weight, no constant
    sector_gap = max(abs(sectors.get(m, 0.0) - V.sector_trace(M, m))
                     / max(V.sector_trace(M, m), 1e-300)
                     for m in range(2 * N + 1))
    return {
        "N": N, "M": M, "q": q, "p": p, "c": c,
        "Z6V": Z6,
        "Zt6V": Zt,
        "Zt6V_plus": V.sector_trace(M, N + 1),
        "loop_constant": c0,
        "loop_constant_spread": c0_hi / c0_lo - 1.0,
        "partition_identity_gap": abs(c0 * e_loops / Z6 - 1.0),
        "knc_partition_gap": abs(c0 * e_knc_s / Z6 - 1.0),
        "oriented_sector_gap": sector_gap,
        "phi_A": phi_A,
        "expect_4q_knc": e_knc / Ztot,
        "rhs": rhs,
        "rel_gap": gap,
        "zt_from_A": zt_from_A,
        "zt_leak": Zt - zt_from_A,
        "A_slice_gap": abs(q * zt_from_A / (c0 * wA) - 1.0),
        "identity_pass": gap <= tol,
        "tol": tol,
    }
