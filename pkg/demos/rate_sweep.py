"""Scaled execution time at the asymptotically optimal encoding rate.

Fixing the rate R = k/n at the root of (1-R) ln(1-R) = mu (1-R) - R and
growing n shows n*T approaching the MDS asymptote (1/R)(1 - ln(1-R)/mu),
with the binary-random ensemble tracking it to within a vanishing gap and
the polar/SC curve converging more slowly.
"""

from math import log

from cel.exectime import gap_bounds, solve_optimal_rate
from cel.reports import rate_sweep_rows

MU = 1.0
rate = solve_optimal_rate(MU)
asymptote = (1.0 - log(1.0 - rate) / MU) / rate
print(f"optimal rate R* = {rate:.6f}")
print(f"MDS asymptote of n*T = {asymptote:.4f}\n")

rows = rate_sweep_rows(n_list=(1024, 2048, 4096, 8192),
                       families=("mds", "binary-random", "polar-sc"), mu=MU)

print(f"{'n':>6} {'family':<14} {'k':>6} {'n*T_avg':>9}")
for r in rows:
    print(f"{r.n:>6} {r.family:<14} {r.k:>6} {r.n * r.t_avg:>9.4f}")

print("\nbinary-random gap to MDS vs the analytic bracket:")
for n in (1024, 2048, 4096, 8192):
    k = round(n * rate)
    mds = next(r for r in rows if r.n == n and r.family == "mds")
    brc = next(r for r in rows if r.n == n and r.family == "binary-random")
    gap = abs(n * brc.t_avg - n * mds.t_avg)
    v = max(2, min(2 * (n.bit_length() - 1), n - k))
    lo, hi = gap_bounds(n, k, MU, v)
    print(f"  n={n:>5}: gap={gap:.5f} in [{lo:.5f}, {hi:.5f}]")
