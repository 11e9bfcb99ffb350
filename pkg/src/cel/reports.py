"""
High-level experiment drivers: the per-family execution-time table over a
list of cluster sizes, and fixed-rate sweeps of the scaled execution time.

Each family is evaluated by its prescribed method: closed forms for
uncoded/MDS/binary-random, vector quadrature of the SC failure formula for
polar-SC, and Monte-Carlo failure profiles plugged into the exact sum for
polar-ML and RM-ML.

The ML k* search prunes with the MDS curve (an analytic lower bound on any
linear code's execution time), scans the surviving candidates with a
reduced trial count, and re-estimates the near-optimal band at the full
trial count.  All candidates of one search share a common random
permutation stream, so the location of the minimum is driven by code
structure rather than sampling noise.
"""

from __future__ import annotations

import numpy as np

from .construct import build_polar, build_reed_muller_like
from .erasure import estimate_profile_mc
from .exectime import (ExecTimeReport, StragglerModel, brc_t_avg_all_k,
                       mds_t_avg_all_k, metrics, polar_sc_t_avg_all_k,
                       solve_optimal_rate, t_avg_from_profile, t_avg_uncoded)

__all__ = [
    "TABLE1_N_LIST",
    "SWEEP_N_LIST",
    "ALL_FAMILIES",
    "mc_t_avg",
    "search_k_star_mc",
    "table1_rows",
    "rate_sweep_rows",
    "sweep_rows_to_csv",
]

TABLE1_N_LIST = (8, 16, 32, 64, 128, 256, 512)
SWEEP_N_LIST = (1024, 2048, 4096, 8192)
ALL_FAMILIES = ("uncoded", "mds", "binary-random", "polar-sc", "polar-ml", "rm-ml")

_POW2_FAMILIES = {"polar-sc", "polar-ml", "rm-ml"}


def _check_pow2_families(families, n_list):
    bad = [n for n in n_list if (n & (n - 1)) and set(families) & _POW2_FAMILIES]
    if bad:
        raise ValueError(f"polar/RM families need power-of-two n, got {bad}")


def _build_generator(family: str, n: int, k: int, design_epsilon: float):
    if family == "polar-ml":
        return build_polar(n, k, design_epsilon)[0]
    if family == "rm-ml":
        return build_reed_muller_like(n, k)
    raise ValueError(f"{family} has no Monte-Carlo generator")


def _crn_rng(seed: int, n: int, trials: int) -> np.random.Generator:
    # shared across k on purpose: common random numbers stabilize the argmin
    return np.random.default_rng(np.random.SeedSequence([seed, n, trials]))


def mc_t_avg(family: str, n: int, k: int, mu: float, trials_per_i: int,
             seed: int, design_epsilon: float = 0.1) -> tuple[float, float]:
    """(T_avg, standard error) of an ML-decoded constructed code at fixed k."""
    g = _build_generator(family, n, k, design_epsilon)
    profile = estimate_profile_mc(g, "ml", trials_per_i, _crn_rng(seed, n, trials_per_i))
    t = t_avg_from_profile(StragglerModel(mu=mu, n=n, k=k), profile)
    i = np.arange(1, n - k + 1)
    se = 0.0
    if i.size and profile.std_err is not None:
        se = float(np.sqrt(np.sum((profile.std_err[1: n - k + 1] / i) ** 2)) / (mu * k))
    return t, se


def search_k_star_mc(family: str, n: int, mu: float, trials_per_i: int, seed: int,
                     design_epsilon: float = 0.1,
                     scan_trials: int | None = None) -> tuple[int, float, float]:
    """(k*, T_avg, std err) for a Monte-Carlo family, MDS-pruned search."""
    lower = mds_t_avg_all_k(n, mu)
    order = np.argsort(lower, kind="stable")
    scan_trials = scan_trials if scan_trials is not None else max(1, trials_per_i // 5)

    scanned: dict[int, tuple[float, float]] = {}
    best_t = np.inf
    best_se = 0.0
    for idx in order:
        k = int(idx) + 1
        if lower[idx] > best_t + 3.0 * best_se:
            break
        t, se = mc_t_avg(family, n, k, mu, scan_trials, seed, design_epsilon)
        scanned[k] = (t, se)
        if t < best_t:
            best_t, best_se = t, se

    shortlist = sorted(k for k, (t, se) in scanned.items()
                       if t <= best_t + max(3.0 * np.hypot(se, best_se), 0.003 * best_t))
    best_k, best_t, best_se = -1, np.inf, 0.0
    for k in shortlist:
        if scan_trials >= trials_per_i:
            t, se = scanned[k]
        else:
            t, se = mc_t_avg(family, n, k, mu, trials_per_i, seed, design_epsilon)
        if t < best_t:
            best_k, best_t, best_se = k, t, se
    return best_k, best_t, best_se


def table1_rows(n_list=TABLE1_N_LIST, families=ALL_FAMILIES, mu: float = 1.0,
                trials_per_i: int = 10_000, seed: int = 0,
                design_epsilon: float = 0.1) -> list[ExecTimeReport]:
    """One report row per (n, family): T_avg at the optimal k plus metrics."""
    _check_pow2_families(families, n_list)
    rows: list[ExecTimeReport] = []
    for n in n_list:
        t_unc = t_avg_uncoded(n, mu)
        mds_curve = mds_t_avg_all_k(n, mu)
        k_mds = int(np.argmin(mds_curve)) + 1
        t_mds = float(mds_curve[k_mds - 1])
        for family in families:
            se = None
            if family == "uncoded":
                k_star, t = n, t_unc
                method = "closed-form"
            elif family == "mds":
                k_star, t = k_mds, t_mds
                method = "closed-form"
            elif family == "binary-random":
                curve = brc_t_avg_all_k(n, mu)
                k_star = int(np.argmin(curve)) + 1
                t = float(curve[k_star - 1])
                method = "closed-form"
            elif family == "polar-sc":
                curve = polar_sc_t_avg_all_k(n, design_epsilon, mu)
                k_star = int(np.argmin(curve)) + 1
                t = float(curve[k_star - 1])
                method = "quadrature"
            elif family in {"polar-ml", "rm-ml"}:
                k_star, t, se = search_k_star_mc(family, n, mu, trials_per_i,
                                                seed, design_epsilon)
                method = "mc-profile"
            else:
                raise ValueError(f"unknown family {family!r}")
            g_opt, g_cod = metrics(t, t_mds, t_unc)
            decoder = {"polar-sc": "sc", "polar-ml": "ml", "rm-ml": "ml",
                       "binary-random": "ml"}.get(family, "-")
            rows.append(ExecTimeReport(
                family=family, decoder=decoder, n=n, k=k_star, mu=mu,
                t_avg=t, method=method, k_star=k_star, g_opt=g_opt,
                g_cod=g_cod, std_err=se))
    return rows


def rate_sweep_rows(n_list=SWEEP_N_LIST, families=("mds", "binary-random", "polar-sc"),
                    mu: float = 1.0, rate: float | None = None,
                    trials_per_i: int = 10_000, seed: int = 0,
                    design_epsilon: float | str = "auto") -> list[ExecTimeReport]:
    """Scaled execution time n*T_avg at a fixed encoding rate for each family.

    The rate defaults to the asymptotically optimal one for mu, and "auto"
    designs the polar code for the erasure probability 1 - rate.  The
    uncoded family has rate 1 by construction and is skipped.
    """
    families = [f for f in families if f != "uncoded"]
    _check_pow2_families(families, n_list)
    if rate is None:
        rate = solve_optimal_rate(mu)
    if not 0.0 < rate < 1.0:
        raise ValueError("rate must lie in (0, 1)")
    eps_d = (1.0 - rate) if design_epsilon == "auto" else float(design_epsilon)
    rows: list[ExecTimeReport] = []
    for n in n_list:
        k = int(round(n * rate))
        model = StragglerModel(mu=mu, n=n, k=k)
        for family in families:
            se = None
            if family == "mds":
                t = float(mds_t_avg_all_k(n, mu)[k - 1])
                method = "closed-form"
            elif family == "binary-random":
                from .erasure import random_ensemble_profile
                t = t_avg_from_profile(model, random_ensemble_profile(n, k))
                method = "closed-form"
            elif family == "polar-sc":
                t = float(polar_sc_t_avg_all_k(n, eps_d, mu)[k - 1])
                method = "quadrature"
            elif family in {"polar-ml", "rm-ml"}:
                t, se = mc_t_avg(family, n, k, mu, trials_per_i, seed, eps_d)
                method = "mc-profile"
            else:
                raise ValueError(f"unknown family {family!r}")
            decoder = {"polar-sc": "sc"}.get(family, "ml")
            rows.append(ExecTimeReport(
                family=family, decoder=decoder, n=n, k=k, mu=mu, t_avg=t,
                method=method, std_err=se))
    return rows


def sweep_rows_to_csv(rows: list[ExecTimeReport]) -> str:
    """Sweep CSV carries the scaled time n*T_avg plus its standard error."""
    lines = ["family,decoder,n,k,mu,nt_avg,method,std_err"]
    for r in rows:
        se = "" if r.std_err is None else f"{r.n * r.std_err:.10g}"
        lines.append(f"{r.family},{r.decoder},{r.n},{r.k},{r.mu:.10g},"
                     f"{r.n * r.t_avg:.10g},{r.method},{se}")
    return "\n".join(lines) + "\n"
