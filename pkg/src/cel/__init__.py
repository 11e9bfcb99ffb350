"""
coded-exec-lab: performance limits of coded distributed computing.

Builds binary linear codes (random full-rank, polar, Reed-Muller style),
computes their decoding-failure probability over erasure channels, converts
that into the mean execution time of a straggler-prone cluster, and
cross-validates the analytics with a stochastic simulator.
"""

from .construct import (BitChannelProfile, CodeFamily, build_polar,
                        build_reed_muller_like, kronecker_power,
                        polar_z_profile, sample_random_full_rank)
from .erasure import (ErasureFailureProfile, estimate_profile_mc, mds_profile,
                      ml_pattern_decodable, pe_from_profile, pe_mds,
                      pe_polar_sc, pf_random_ensemble, random_ensemble_profile,
                      sc_pattern_decodable)
from .exectime import (ExecTimeReport, QuadratureError, StragglerModel,
                       brc_mds_scaled_gap, find_k_star, gap_bounds, metrics,
                       optimality_score, solve_optimal_rate, t_avg_by_quadrature,
                       t_avg_from_profile, t_avg_mds, t_avg_uncoded)
from .gf2 import (Gf2Matrix, NotDecodable, column_submatrix_rank, null_space,
                  rank, solve_real_system)
from .sim import (InfeasibleCode, SimRun, completion_times, job_completion_time,
                  run_simulation, sample_finish_times)

__version__ = "0.1.0"
