"""
From failure probabilities to average execution times.

The bridge: a node that has not finished by time t looks like an erasure
with probability eps(t) = exp(-mu(kt - 1)), so the mean job completion
time is 1/k + (1/(mu k)) * integral of P_e(eps)/eps over (0, 1].  For any
conditional failure profile p(i, k) that integral collapses to an exact
finite sum, which is the workhorse here; the quadrature route exists for
failure curves given only as functions (polar SC) and as a consistency
oracle for the sum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import log

import numpy as np

from .construct import CodeFamily, polar_z_profile
from .erasure import ErasureFailureProfile, random_ensemble_profile

__all__ = [
    "StragglerModel",
    "ExecTimeReport",
    "QuadratureError",
    "t_avg_from_profile",
    "t_avg_mds",
    "t_avg_uncoded",
    "t_avg_by_quadrature",
    "mds_t_avg_all_k",
    "brc_t_avg_all_k",
    "polar_sc_t_avg_all_k",
    "find_k_star",
    "metrics",
    "gap_bounds",
    "brc_mds_scaled_gap",
    "solve_optimal_rate",
    "optimality_score",
    "reports_to_csv",
    "reports_to_jsonl",
]


@dataclass(frozen=True)
class StragglerModel:
    """Shifted-exponential cluster: n nodes, job split k ways, tail rate mu.

    Per-node finish time is 1/k plus an exponential of rate mu scaled by
    1/k, so 1/k is the hard floor no schedule can beat.
    """

    mu: float
    n: int
    k: int

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("straggling rate mu must be positive")
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")


@dataclass(frozen=True)
class ExecTimeReport:
    """One evaluated (family, n, k) cell, with optional comparison metrics."""

    family: str
    decoder: str
    n: int
    k: int
    mu: float
    t_avg: float
    method: str  # "closed-form" | "quadrature" | "mc-profile" | "simulation"
    k_star: int | None = None
    g_opt: float | None = None
    g_cod: float | None = None
    std_err: float | None = None


class QuadratureError(Exception):
    """Adaptive integration failed to meet tolerance; carries the best estimate."""

    def __init__(self, estimate, error_bound):
        self.estimate = estimate
        self.error_bound = error_bound
        super().__init__(f"quadrature tolerance not reached (error ~ {error_bound:.3g})")


def _harmonic(n: int) -> float:
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def t_avg_from_profile(model: StragglerModel, profile: ErasureFailureProfile) -> float:
    """Exact mean execution time from a conditional failure profile."""
    n, k, mu = model.n, model.k, model.mu
    if profile.n != n or profile.k != k:
        raise ValueError("profile dimensions do not match the model")
    i_hi = np.arange(n - k + 1, n + 1)
    base = (1.0 + np.sum(1.0 / (i_hi * mu))) / k
    if n > k:
        i_lo = np.arange(1, n - k + 1)
        base += np.sum(profile.p[1: n - k + 1] / i_lo) / (mu * k)
    return float(base)


def t_avg_mds(model: StragglerModel) -> float:
    """Minimum mean execution time of any (n, k) linear code."""
    n, k, mu = model.n, model.k, model.mu
    i_hi = np.arange(n - k + 1, n + 1)
    return float((1.0 + np.sum(1.0 / i_hi) / mu) / k)


def t_avg_uncoded(n: int, mu: float) -> float:
    """k = n: every node must finish."""
    return t_avg_mds(StragglerModel(mu=mu, n=n, k=n))


# --------------------------------------------------------------------------
# adaptive quadrature of P_e(eps)/eps on (0, 1]
# --------------------------------------------------------------------------

def _adaptive_simpson_vec(f, a: float, b: float, tol: float, max_depth: int):
    """Adaptive Simpson for a vector-valued integrand; error in max norm."""
    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = np.zeros_like(np.atleast_1d(whole), dtype=np.float64)
    err_total = 0.0
    while stack:
        a0, b0, fa0, fm0, fb0, s0, tol0, depth = stack.pop()
        m = (a0 + b0) / 2
        lm, rm = (a0 + m) / 2, (m + b0) / 2
        flm, frm = f(lm), f(rm)
        s_left = (m - a0) / 6 * (fa0 + 4 * flm + fm0)
        s_right = (b0 - m) / 6 * (fm0 + 4 * frm + fb0)
        delta = (s_left + s_right) - s0
        err = float(np.max(np.abs(np.atleast_1d(delta))))
        if err <= 15 * tol0 or depth >= max_depth:
            total += np.atleast_1d(s_left + s_right + delta / 15)
            err_total += err / 15
            if depth >= max_depth and err > 15 * tol0:
                err_total += err
        else:
            stack.append((a0, m, fa0, flm, fm0, s_left, tol0 / 2, depth + 1))
            stack.append((m, b0, fm0, frm, fb0, s_right, tol0 / 2, depth + 1))
    return total, err_total


def _integrate_failure_over_eps(pe_vec, tol: float, eps_min: float, max_depth: int):
    """integral over (0, 1] of pe(eps)/eps d eps, via u = ln eps.

    The region below eps_min is not integrated; since full-rank codes have
    pe(eps) = O(eps), that tail is bounded by pe(eps_min), which is folded
    into the returned error bound.
    """
    def g(u):
        return np.asarray(pe_vec(float(np.exp(u))), dtype=np.float64)

    u_lo = log(eps_min)
    # one panel per decade keeps the waterfall region well separated
    edges = np.linspace(u_lo, 0.0, int(np.ceil(-u_lo / log(10.0))) + 1)
    panel_tol = tol / (len(edges) - 1)
    total = None
    err = float(np.max(np.atleast_1d(pe_vec(eps_min))))
    for lo, hi in zip(edges[:-1], edges[1:]):
        part, perr = _adaptive_simpson_vec(g, lo, hi, panel_tol, max_depth)
        total = part if total is None else total + part
        err += perr
    return total, err


def t_avg_by_quadrature(model: StragglerModel, pe, tol: float = 1e-9,
                        eps_min: float = 1e-12, max_depth: int = 48) -> float:
    """Mean execution time from a failure-probability function of epsilon."""
    integral, err = _integrate_failure_over_eps(
        lambda e: np.array([pe(e)], dtype=np.float64), tol, eps_min, max_depth)
    t = 1.0 / model.k + float(integral[0]) / (model.mu * model.k)
    if err > max(100 * tol, 1e-7):
        raise QuadratureError(t, err / (model.mu * model.k))
    return t


# --------------------------------------------------------------------------
# whole-k sweeps per family
# --------------------------------------------------------------------------

def mds_t_avg_all_k(n: int, mu: float) -> np.ndarray:
    """T_avg of the MDS optimum for every k = 1..n (index 0 -> k = 1)."""
    h = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, n + 1))])
    k = np.arange(1, n + 1)
    return (1.0 + (h[n] - h[n - k]) / mu) / k


def brc_t_avg_all_k(n: int, mu: float) -> np.ndarray:
    """Closed-form T_avg of the full-rank binary random ensemble, every k."""
    out = np.empty(n)
    for k in range(1, n + 1):
        profile = random_ensemble_profile(n, k)
        out[k - 1] = t_avg_from_profile(StragglerModel(mu=mu, n=n, k=k), profile)
    return out


def polar_sc_t_avg_all_k(n: int, design_epsilon: float, mu: float,
                         tol: float = 1e-9, eps_min: float = 1e-12) -> np.ndarray:
    """T_avg under SC decoding for every k = 1..n in one vector quadrature.

    The design-time bit-channel ordering is shared by all k (the size-k
    information set is the k best design channels), so each epsilon sample
    yields the SC failure probability of every k from one cumulative sum.
    """
    z_design = polar_z_profile(n, design_epsilon)
    order = np.argsort(z_design, kind="stable")

    def pe_all_k(eps: float) -> np.ndarray:
        from .construct import polar_z_profile_batch
        z = polar_z_profile_batch(n, np.array([eps]))[0][order]
        with np.errstate(divide="ignore"):
            cum = np.cumsum(np.log1p(-z))
        return -np.expm1(cum)

    integral, err = _integrate_failure_over_eps(pe_all_k, tol, eps_min, 48)
    k = np.arange(1, n + 1)
    t = 1.0 / k + integral / (mu * k)
    if err > max(100 * tol, 1e-7):
        raise QuadratureError(t, err)
    return t


def find_k_star(family: CodeFamily, n: int, mu: float, evaluator) -> tuple[int, float]:
    """Exhaustive scan of k = 1..n; smallest k wins exact ties.

    The uncoded family has no free k and returns (n, evaluator(n)).
    """
    if family.tag == "uncoded":
        return n, float(evaluator(n))
    best_k, best_t = 1, float(evaluator(1))
    for k in range(2, n + 1):
        t = float(evaluator(k))
        if t < best_t:
            best_k, best_t = k, t
    return best_k, best_t


def metrics(t_code: float, t_mds_opt: float, t_uncoded: float) -> tuple[float, float]:
    """(gap to the MDS optimum, gain over uncoded), both in percent."""
    if min(t_code, t_mds_opt, t_uncoded) <= 0:
        raise ValueError("execution times must be positive")
    g_opt = 100.0 * (t_code - t_mds_opt) / t_mds_opt
    g_cod = 100.0 * (t_uncoded - t_code) / t_uncoded
    return g_opt, g_cod


def gap_bounds(n: int, k: int, mu: float, v: int) -> tuple[float, float]:
    """Bounds on the scaled gap |n T_mds - n T_brc| for the random ensemble.

    The log term of the upper bound is dropped when its argument would be
    <= 1 (the bound is asymptotic and meaningless there).
    """
    if n == k:
        return 0.0, 0.0
    if not 0 <= v <= n - k:
        raise ValueError("need 0 <= v <= n - k")
    r = k / n
    lower = 1.0 / (3.0 * mu * r * (1.0 - r) * n)
    upper = v / (n - k - v + 1)
    if n - k - v > 1:
        upper += n * r * 2.0 ** (-v) * log(n - k - v)
    return lower, upper / (mu * r)


def brc_mds_scaled_gap(n: int, k: int, mu: float) -> float:
    """Exact |n T_mds - n T_brc| from the ensemble closed form."""
    profile = random_ensemble_profile(n, k)
    if n == k:
        return 0.0
    i = np.arange(1, n - k + 1)
    s = float(np.sum(profile.p[1: n - k + 1] / i))
    return s / (mu * k / n)


def solve_optimal_rate(mu: float, f_tol: float = 1e-12) -> float:
    """Root of (1 - R) ln(1 - R) = mu (1 - R) - R on (0, 1), by bisection."""
    if mu <= 0:
        raise ValueError("mu must be positive")

    def f(r: float) -> float:
        return (1.0 - r) * log(1.0 - r) - mu * (1.0 - r) + r

    lo, hi = 0.0, 1.0 - 1e-15
    # f(0) = -mu < 0 and f -> 1 as R -> 1, so the bracket is valid
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= f_tol:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimality_score(profile: ErasureFailureProfile, d_min: int) -> float:
    """sum of p[i]/i for i = d_min..n-k; ranks codes like T_avg does."""
    n, k = profile.n, profile.k
    if not 1 <= d_min <= n - k + 1:
        raise ValueError("need 1 <= d_min <= n - k + 1")
    i = np.arange(d_min, n - k + 1)
    if i.size == 0:
        return 0.0
    return float(np.sum(profile.p[d_min: n - k + 1] / i))


# --------------------------------------------------------------------------
# report serialization
# --------------------------------------------------------------------------

_CSV_COLUMNS = ["family", "decoder", "n", "k", "mu", "t_avg", "method",
                "k_star", "g_opt", "G_cod"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def reports_to_csv(reports: list[ExecTimeReport]) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for r in reports:
        lines.append(",".join(_fmt(v) for v in (
            r.family, r.decoder, r.n, r.k, r.mu, r.t_avg, r.method,
            r.k_star, r.g_opt, r.g_cod)))
    return "\n".join(lines) + "\n"


def reports_to_jsonl(reports: list[ExecTimeReport]) -> str:
    lines = []
    for r in reports:
        lines.append(json.dumps({
            "family": r.family, "decoder": r.decoder, "n": r.n, "k": r.k,
            "mu": r.mu, "t_avg": r.t_avg, "method": r.method,
            "k_star": r.k_star, "g_opt": r.g_opt, "G_cod": r.g_cod,
        }, sort_keys=False))
    return "\n".join(lines) + "\n"
