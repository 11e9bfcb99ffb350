"""
Decoding-failure probabilities over erasure channels.

Three routes to the failure curve P_e(epsilon):

  * exact closed forms -- MDS (binomial tail) and the full-rank binary
    random ensemble (product formula, evaluated in the log domain so the
    2^{j-1-n+i} factors survive n in the thousands);
  * the polar successive-cancellation formula, re-evaluating the
    bit-channel profile at the channel epsilon while keeping the
    information set frozen at design time;
  * conditional failure profiles p(i, k) -- the probability of decoding
    failure given i random erasures -- estimated per erasure count and
    combined through the binomial mixture.

Profiles are estimated with one coupled permutation stream: prefixes of a
uniform permutation are uniform i-subsets for every i simultaneously, and
failure is monotone in the erased set, so a single first-failure index per
trial serves all strata.  Strata whose subset count is small enough are
enumerated exhaustively instead.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import betainc, gammaln

from . import _kernels
from .construct import BitChannelProfile, polar_z_profile_batch
from .gf2 import Gf2Matrix, column_submatrix_rank, null_space, rank

__all__ = [
    "ErasureFailureProfile",
    "pf_random_ensemble",
    "random_ensemble_profile",
    "mds_profile",
    "pe_mds",
    "pe_from_profile",
    "pe_polar_sc",
    "sc_erasure_indicators",
    "sc_pattern_decodable",
    "ml_pattern_decodable",
    "estimate_profile_mc",
]


@dataclass(frozen=True)
class ErasureFailureProfile:
    """Conditional failure probabilities p[i] for i = 0..n erasures.

    ``source`` is "exact" or "monte-carlo"; Monte-Carlo profiles carry the
    per-stratum binomial standard errors (zero where a stratum was
    enumerated exhaustively).
    """

    n: int
    k: int
    p: np.ndarray
    source: str = "exact"
    trials_per_i: int | None = None
    std_err: np.ndarray | None = None

    def __post_init__(self):
        if self.p.shape != (self.n + 1,):
            raise ValueError("p must have one entry per erasure count 0..n")
        if np.any(self.p < 0) or np.any(self.p > 1):
            raise ValueError("failure probabilities must lie in [0, 1]")
        if self.source not in {"exact", "monte-carlo"}:
            raise ValueError(f"unknown profile source {self.source!r}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("i,p,std_err\n")
        se = self.std_err if self.std_err is not None else np.zeros(self.n + 1)
        for i in range(self.n + 1):
            buf.write(f"{i},{self.p[i]:.12g},{se[i]:.12g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, k: int, source: str = "monte-carlo",
                 trials_per_i: int | None = None) -> "ErasureFailureProfile":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if lines[0] != "i,p,std_err":
            raise ValueError("expected header 'i,p,std_err'")
        rows = [ln.split(",") for ln in lines[1:]]
        n = len(rows) - 1
        p = np.empty(n + 1)
        se = np.empty(n + 1)
        for row in rows:
            i = int(row[0])
            p[i], se[i] = float(row[1]), float(row[2])
        return cls(n=n, k=k, p=p, source=source, trials_per_i=trials_per_i, std_err=se)


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def pf_random_ensemble(n: int, k: int, i: int) -> float:
    """Probability that a full-rank random binary k x n generator loses rank
    after i uniformly random column erasures."""
    if not (1 <= k <= n and 0 <= i <= n):
        raise ValueError("need 1 <= k <= n and 0 <= i <= n")
    return float(random_ensemble_profile(n, k).p[i])


def random_ensemble_profile(n: int, k: int) -> ErasureFailureProfile:
    """The full p(i, k) vector of the full-rank random ensemble, exactly."""
    p = np.ones(n + 1)
    ln2 = np.log(2.0)
    j = np.arange(1, k + 1)
    # log prod_j (1 - 2^{j-1-n+i}) for i = 0..n-k; exponents stay <= -ln 2
    i = np.arange(0, n - k + 1)
    expo = (j[None, :] - 1 - n + i[:, None]) * ln2
    lognum = np.log1p(-np.exp(expo)).sum(axis=1)
    p[: n - k + 1] = -np.expm1(lognum - lognum[0])
    p[0] = 0.0
    np.clip(p, 0.0, 1.0, out=p)
    return ErasureFailureProfile(n=n, k=k, p=p, source="exact")


def mds_profile(n: int, k: int) -> ErasureFailureProfile:
    """MDS pseudo-family: failure exactly when more than n - k are erased."""
    p = np.zeros(n + 1)
    p[n - k + 1:] = 1.0
    return ErasureFailureProfile(n=n, k=k, p=p, source="exact")


def pe_mds(n: int, k: int, epsilon) -> float | np.ndarray:
    """Block failure probability of an (n, k) MDS code over BEC(epsilon)."""
    eps = np.asarray(epsilon, dtype=np.float64)
    if np.any(eps < 0) or np.any(eps > 1):
        raise ValueError("epsilon must lie in [0, 1]")
    # regularized incomplete beta = binomial upper tail Pr(X >= n-k+1)
    out = betainc(n - k + 1, k, eps) if k >= 1 else np.ones_like(eps)
    return float(out) if np.isscalar(epsilon) else out


def _log_binom_weights(n: int, eps: np.ndarray) -> np.ndarray:
    """log C(n,i) eps^i (1-eps)^{n-i}, shape (len(eps), n+1); log-domain so
    the weights stay finite at n in the thousands."""
    i = np.arange(n + 1, dtype=np.float64)
    lc = gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = lc[None, :] + i[None, :] * np.log(eps[:, None]) \
            + (n - i)[None, :] * np.log1p(-eps[:, None])
    # patch the 0*log(0) corners at eps = 0 and eps = 1
    logw = np.where(np.isnan(logw), -np.inf, logw)
    edge0 = eps == 0.0
    edge1 = eps == 1.0
    if edge0.any():
        logw[edge0] = -np.inf
        logw[edge0, 0] = 0.0
    if edge1.any():
        logw[edge1] = -np.inf
        logw[edge1, n] = 0.0
    return logw


def pe_from_profile(profile: ErasureFailureProfile, epsilon) -> float | np.ndarray:
    """Binomial mixture of the conditional failure profile."""
    eps = np.atleast_1d(np.asarray(epsilon, dtype=np.float64))
    if np.any(eps < 0) or np.any(eps > 1):
        raise ValueError("epsilon must lie in [0, 1]")
    w = np.exp(_log_binom_weights(profile.n, eps))
    out = w @ profile.p
    np.clip(out, 0.0, 1.0, out=out)
    return float(out[0]) if np.isscalar(epsilon) else out


def pe_polar_sc(profile: BitChannelProfile, epsilon) -> float | np.ndarray:
    """SC failure probability 1 - prod_{i in A}(1 - Z_i(epsilon)).

    The bit-channel values are recomputed at the channel epsilon; the
    information set stays frozen at its design-time choice.
    """
    eps = np.atleast_1d(np.asarray(epsilon, dtype=np.float64))
    if np.any(eps < 0) or np.any(eps > 1):
        raise ValueError("epsilon must lie in [0, 1]")
    z = polar_z_profile_batch(profile.n, eps)[:, list(profile.info_set)]
    with np.errstate(divide="ignore"):
        logs = np.log1p(-z).sum(axis=1)
    out = -np.expm1(logs)
    return float(out[0]) if np.isscalar(epsilon) else out


# --------------------------------------------------------------------------
# per-pattern decodability
# --------------------------------------------------------------------------

def sc_erasure_indicators(erased_mask: np.ndarray) -> np.ndarray:
    """Deterministic SC recursion on erasure indicators.

    Input rows are length-n 0/1 channel-erasure masks; output rows give,
    per synthesized bit-channel, whether SC fails to resolve that index.
    The degraded (OR) child occupies the first half of each index block and
    the upgraded (AND) child the second, matching the Z recursion.
    """
    e = np.atleast_2d(np.asarray(erased_mask, dtype=bool))
    m, n = e.shape
    if n & (n - 1):
        raise ValueError("pattern length must be a power of two")
    blocks, width = 1, n
    e = e.reshape(m, blocks, width)
    while width > 1:
        half = width // 2
        left, right = e[:, :, :half], e[:, :, half:]
        e = np.stack([left | right, left & right], axis=2).reshape(m, blocks * 2, half)
        blocks, width = blocks * 2, half
    return e.reshape(m, n)


def sc_pattern_decodable(n: int, info_set, erased) -> bool:
    """True iff SC resolves every information index under this erasure set."""
    erased = set(int(j) for j in erased)
    if erased and (min(erased) < 0 or max(erased) >= n):
        raise ValueError("erased index out of range")
    mask = np.zeros(n, dtype=bool)
    mask[list(erased)] = True
    ind = sc_erasure_indicators(mask)[0]
    return not bool(ind[list(info_set)].any())


def ml_pattern_decodable(g: Gf2Matrix, erased) -> bool:
    """True iff the unerased columns keep full row rank (MAP over erasures)."""
    erased = set(int(j) for j in erased)
    kept = [j for j in range(g.cols) if j not in erased]
    if not kept:
        return False
    return column_submatrix_rank(g, kept) == g.rows


# --------------------------------------------------------------------------
# Monte-Carlo / exhaustive profile estimation
# --------------------------------------------------------------------------

def _parity_dense(g: Gf2Matrix) -> np.ndarray:
    """Parity-check matrix of g as a dense 0/1 array ((n-k) x n; empty when k = n)."""
    h = null_space(g)
    if h is None:
        return np.zeros((0, g.cols), dtype=np.uint8)
    return h.to_dense()


def _columns_as_ints(hd: np.ndarray) -> list[int]:
    weights = 1 << np.arange(hd.shape[0], dtype=object)
    return [int((hd[:, j].astype(object) * weights).sum()) for j in range(hd.shape[1])]


def _dependent_int(cols: list[int]) -> bool:
    basis: dict[int, int] = {}
    for v in cols:
        while v:
            p = v.bit_length() - 1
            if p in basis:
                v ^= basis[p]
            else:
                basis[p] = v
                break
        else:
            return True
    return False


def _exact_stratum_ml(hcols_int: list[int], n: int, i: int) -> float:
    fails = 0
    total = 0
    for combo in itertools.combinations(range(n), i):
        fails += _dependent_int([hcols_int[j] for j in combo])
        total += 1
    return fails / total


def _exact_stratum_sc(n: int, info_idx: np.ndarray, i: int) -> float:
    combos = np.array(list(itertools.combinations(range(n), i)), dtype=np.int64)
    fails = 0
    for start in range(0, len(combos), 4096):
        chunk = combos[start:start + 4096]
        masks = np.zeros((len(chunk), n), dtype=bool)
        np.put_along_axis(masks, chunk, True, axis=1)
        ind = sc_erasure_indicators(masks)
        fails += int(ind[:, info_idx].any(axis=1).sum())
    return fails / len(combos)


def _sc_first_failure(perms: np.ndarray, info_idx: np.ndarray) -> np.ndarray:
    """Smallest prefix length of each permutation whose erasure set breaks SC.

    Failure is monotone in the erased set, so a per-trial binary search with
    batched SC evaluations suffices.
    """
    trials, n = perms.shape
    lo = np.zeros(trials, dtype=np.int64)       # decodable (empty set)
    hi = np.full(trials, n, dtype=np.int64)     # full erasure fails for k >= 1
    while np.any(lo + 1 < hi):
        mid = (lo + hi) // 2
        keep_mask = np.arange(n)[None, :] < mid[:, None]
        masks = np.zeros((trials, n), dtype=bool)
        np.put_along_axis(masks, perms, keep_mask, axis=1)
        fail = sc_erasure_indicators(masks)[:, info_idx].any(axis=1)
        hi = np.where(fail, mid, hi)
        lo = np.where(fail, lo, mid)
    return hi


def estimate_profile_mc(g: Gf2Matrix, decoder: str = "ml", trials_per_i: int = 10_000,
                        rng: np.random.Generator | None = None,
                        info_set=None,
                        exact_limit: int = 1_000_000) -> ErasureFailureProfile:
    """Estimate p(i, k) for i = 0..n under ML or SC pattern decodability.

    Strata with at most *exact_limit* erasure subsets are enumerated
    exhaustively (zero standard error); the rest share one coupled stream
    of *trials_per_i* random permutations, whose prefixes are uniform
    i-subsets for every i.  Results depend only on the generator, decoder,
    trial count, and the caller-owned rng state.
    """
    if trials_per_i < 1:
        raise ValueError("trials_per_i must be >= 1")
    if decoder not in {"ml", "sc"}:
        raise ValueError(f"unknown decoder {decoder!r}")
    if decoder == "sc" and info_set is None:
        raise ValueError("sc decoding needs the information set")
    rng = rng if rng is not None else np.random.default_rng(0)
    n, k = g.cols, g.rows

    p = np.ones(n + 1)
    se = np.zeros(n + 1)
    p[0] = 0.0

    mc_strata = [i for i in range(1, n - k + 1) if comb(n, i) > exact_limit]
    if mc_strata or decoder == "sc":
        perms = rng.permuted(np.tile(np.arange(n, dtype=np.int64), (trials_per_i, 1)), axis=1)
    if decoder == "ml":
        hd = _parity_dense(g)
        hcols_int = _columns_as_ints(hd)
        if mc_strata:
            hcols, words, nbits = _kernels.pack_columns(hd)
            first = _kernels.first_dependence_counts(hcols, words, nbits, perms)
    else:
        info_idx = np.asarray(sorted(int(j) for j in info_set), dtype=np.int64)
        first = _sc_first_failure(perms, info_idx)

    for i in range(1, n - k + 1):
        if i not in mc_strata and decoder == "ml":
            p[i] = _exact_stratum_ml(hcols_int, n, i)
        elif i not in mc_strata:
            p[i] = _exact_stratum_sc(n, info_idx, i)
        else:
            phat = float(np.mean(first <= i))
            p[i] = phat
            se[i] = np.sqrt(phat * (1.0 - phat) / trials_per_i)
    # SC can fail beyond the ML radius too, but never succeeds past n - k
    return ErasureFailureProfile(n=n, k=k, p=p, source="monte-carlo",
                                 trials_per_i=trials_per_i, std_err=se)
