"""Cross-validate the analytics with the stochastic straggler simulator.

Every analytic execution time in this package flows through one identity:
a node unfinished at time t looks like an erasure with probability
eps(t) = exp(-mu(kt-1)).  The simulator never uses that identity -- it
samples shifted-exponential finish times and watches for the first
decodable prefix -- so agreement here is a real check, not a tautology.
"""

import numpy as np

from cel.construct import build_polar, sample_random_full_rank
from cel.erasure import estimate_profile_mc
from cel.exectime import StragglerModel, t_avg_from_profile, t_avg_mds
from cel.sim import completion_times, run_simulation

TRIALS = 200_000
N, MU = 8, 1.0

print(f"{'case':<28} {'simulated':>10} {'analytic':>10} {'z':>6}")

cases = []
model = StragglerModel(mu=MU, n=N, k=N)
cases.append(("uncoded (k=n)", model, "mds", None, t_avg_mds(model)))
model = StragglerModel(mu=MU, n=N, k=6)
cases.append(("MDS (8,6)", model, "mds", None, t_avg_mds(model)))

g = sample_random_full_rank(N, 6, np.random.default_rng(3))
profile = estimate_profile_mc(g, "ml", 1)  # fully enumerated at n=8
model = StragglerModel(mu=MU, n=N, k=6)
cases.append(("random binary (8,6), ML", model, g, "ml",
              t_avg_from_profile(model, profile)))

for name, model, code, decoder, analytic in cases:
    if code == "mds":
        run = run_simulation(model, "mds", trials=TRIALS, seed=7)
    else:
        run = run_simulation(model, code, decoder, trials=TRIALS, seed=7)
    z = (run.mean_t - analytic) / run.std_err
    print(f"{name:<28} {run.mean_t:>10.5f} {analytic:>10.5f} {z:>6.2f}")

# same random draws, three decoders: the ordering holds trial by trial
gen, prof = build_polar(N, 5, 0.1)
model = StragglerModel(mu=MU, n=N, k=5)
t_mds = completion_times(model, "mds", "ml", 50_000, seed=2)
t_ml = completion_times(model, gen, "ml", 50_000, seed=2)
t_sc = completion_times(model, gen, "sc", 50_000, seed=2,
                        info_set=prof.info_set)
print("\nper-trial coupling on common draws, polar (8,5):")
print(f"  MDS <= ML  violations: {int((t_mds > t_ml).sum())}/50000")
print(f"  ML  <= SC  violations: {int((t_ml > t_sc).sum())}/50000")
print(f"  mean times: MDS {t_mds.mean():.5f}  ML {t_ml.mean():.5f}  "
      f"SC {t_sc.mean():.5f}")
