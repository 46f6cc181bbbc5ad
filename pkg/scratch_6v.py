import math
import time

from critlat import sixvertex as sv

# 1. transfer vs brute force
for (N, M) in [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)]:
    for c in (1.7, 2.0, 2.5):
        t0 = time.time()
        cen = sv.brute_force_census(N, M, c)
        V = sv.TransferMatrix(N, c)
        Z = V.trace_power(M)
        ok = abs(Z - cen["Z"]) / cen["Z"]
        secs = {m: V.sector_trace(M, m) for m in range(2 * N + 1)}
        sgap = max(abs(secs[m] - cen["sectors"].get(m, 0.0)) / max(secs[m], 1e-300)
                   for m in range(2 * N + 1))
        print(f"N={N} M={M} c={c}: Z_bf={cen['Z']:.6f} Z_tm={Z:.6f} "
              f"rel={ok:.2e} sector_gap={sgap:.2e} configs={cen['configs']} "
              f"({time.time()-t0:.2f}s)")

# 2. frozen values for tests
for (N, M, c) in [(2, 2, 2.0), (3, 3, 2.5)]:
    cen = sv.brute_force_census(N, M, c)
    print(f"FREEZE N={N} M={M} c={c}: Z={cen['Z']!r} configs={cen['configs']} "
          f"sectors={ {m: round(v, 10) for m, v in sorted(cen['sectors'].items())} }")

# 3. apply vs full
import numpy as np
for N in (1, 2, 3):
    V = sv.TransferMatrix(N, 2.3)
    F = V.full()
    rng = np.random.default_rng(0)
    v = rng.standard_normal(1 << (2 * N))
    print(f"apply check N={N}: {np.max(np.abs(V.apply(v) - v @ F)):.3e}")

# 4. the correspondence at the smallest even torus
for (N, M, q) in [(2, 2, 5.0), (2, 2, 6.25), (2, 4, 5.0), (4, 2, 5.0)]:
    t0 = time.time()
    rep = sv.rc6v_verify(N, M, q)
    print(f"\n=== N={N} M={M} q={q} ({time.time()-t0:.1f}s)")
    for k in ("loop_constant", "loop_constant_spread", "partition_identity_gap",
              "knc_partition_gap", "oriented_sector_gap", "phi_A",
              "expect_4q_knc", "rhs", "rel_gap", "Zt6V", "Zt6V_plus",
              "zt_from_A", "zt_leak", "A_slice_gap", "identity_pass"):
        print(f"  {k:24s} {rep[k]}")
    # closed form of the constant
    pred = (1 - rep["p"]) ** (-2 * M * N) * q ** (-M * N / 2)
    print(f"  c0 predicted           {pred}  (ratio {rep['loop_constant']/pred})")

# 5. rates
for q in (4.5, 4.1, 4.01, 5.0, 9.0, 16.0, 25.0):
    r = sv.closed_form_rate(q)
    a = sv.asymptotic_rate(q)
    print(f"q={q}: closed={r!r} asym={a:.6e} ratio={r/a:.4f}")

for q in (5.0, 9.0):
    rep = sv.rate_report(q, Ns=(2, 3, 4, 5, 6), M=256)
    print(f"\nrate trend q={q}: closed={rep['closed_form']:.8f}")
    for row in rep["per_N"]:
        print(f"  N={row['N']}: gap={row['gap_rate']:.8f} "
              f"specM={row['spectral_rate_M']:.8f} err={row['abs_error']:.2e}")
