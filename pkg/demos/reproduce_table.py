"""Reproduce the headline execution-time table.

For each cluster size n and code family this prints the minimum average
execution time T, the task count k* achieving it, the percentage gap to
the MDS optimum (g_opt) and the percentage gain over running uncoded
(G_cod).  Closed forms cover uncoded/MDS/binary-random, quadrature covers
polar under successive cancellation, and Monte-Carlo failure profiles
cover the ML-decoded constructions.

Run time is dominated by the ML searches; trim N_LIST or TRIALS to taste.
"""

from cel.reports import table1_rows

N_LIST = (8, 16, 32, 64)
TRIALS = 2_000

rows = table1_rows(n_list=N_LIST, trials_per_i=TRIALS, seed=0)

print(f"{'n':>4} {'family':<14} {'T_avg':>9} {'k*':>4} {'g_opt%':>7} {'G_cod%':>7}")
current_n = None
for r in rows:
    if r.n != current_n and current_n is not None:
        print()
    current_n = r.n
    print(f"{r.n:>4} {r.family:<14} {r.t_avg:>9.4f} {r.k_star:>4} "
          f"{r.g_opt:>7.1f} {r.g_cod:>7.1f}")

print("\nNotes:")
print(" * MDS is the analytic optimum; g_opt measures distance from it.")
print(" * binary random coding is within 4% of optimal by n = 64.")
print(" * ML decoding closes most of the gap SC decoding leaves open.")
