"""
Generator-matrix construction for the code families under study.

Families:
  * uncoded           -- the k = n degenerate case, no redundancy.
  * MDS               -- analytic pseudo-family; no binary matrix exists in
                         general, so it is modelled by its erasure behaviour.
  * binary random     -- uniform k x n binary matrices conditioned on full
                         row rank, obtained by rejection sampling.
  * polar             -- rows of the Kronecker power of [[1,0],[1,1]] picked
                         by smallest bit-channel erasure probability at a
                         design parameter.
  * Reed-Muller style -- rows of the same Kronecker power picked by largest
                         Hamming weight.

The bit-channel recursion orders children as (2Z - Z^2, Z^2): the first
half of the index range takes the degraded child, the second half the
upgraded one.  No bit-reversal permutation is applied anywhere; the test
suite pins this index convention against empirical per-index erasure rates
of the deterministic SC recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import Gf2Matrix, rank

__all__ = [
    "CodeFamily",
    "BitChannelProfile",
    "kronecker_power",
    "sample_random_full_rank",
    "polar_z_profile",
    "build_polar",
    "build_reed_muller_like",
]

_KERNEL = np.array([[1, 0], [1, 1]], dtype=np.uint8)


@dataclass(frozen=True)
class CodeFamily:
    """Tagged code family; only polar carries a parameter (the design epsilon)."""

    tag: str  # "uncoded" | "mds" | "binary-random" | "polar" | "reed-muller"
    design_epsilon: float | None = None

    def __post_init__(self):
        if self.tag not in {"uncoded", "mds", "binary-random", "polar", "reed-muller"}:
            raise ValueError(f"unknown code family {self.tag!r}")
        if self.tag == "polar":
            if self.design_epsilon is None or not 0.0 < self.design_epsilon < 1.0:
                raise ValueError("polar design epsilon must lie in (0, 1)")
        elif self.design_epsilon is not None:
            raise ValueError(f"{self.tag} takes no design epsilon")


@dataclass(frozen=True)
class BitChannelProfile:
    """Per-index erasure probabilities of the polarized bit-channels.

    ``z`` is evaluated at the design epsilon; ``info_set`` holds the k
    indices with smallest z (ties broken toward the lower index).
    """

    n: int
    z: np.ndarray
    info_set: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.info_set)


def _check_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"n must be a power of two, got {n}")
    return n.bit_length() - 1


def kronecker_power(n: int) -> np.ndarray:
    """Dense n x n binary matrix [[1,0],[1,1]]^{tensor r}, n = 2^r."""
    r = _check_pow2(n)
    g = np.array([[1]], dtype=np.uint8)
    for _ in range(r):
        g = np.kron(_KERNEL, g)
    return g


def sample_random_full_rank(n: int, k: int, rng: np.random.Generator) -> Gf2Matrix:
    """Draw from the uniform full-row-rank ensemble by rejection sampling.

    Acceptance probability is prod_{i=1..k}(1 - 2^{i-1-n}) > 0.288, so the
    expected number of tries is small for every (n, k).
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    while True:
        m = Gf2Matrix.from_dense(rng.integers(0, 2, size=(k, n), dtype=np.uint8))
        if rank(m) == k:
            return m


def polar_z_profile(n: int, epsilon: float) -> np.ndarray:
    """Bit-channel erasure probabilities for the BEC polarization recursion.

    Each value Z expands in place into the pair (2Z - Z^2, Z^2), so after
    r doublings index i's value is the composition along i's binary path,
    most significant bit first.
    """
    r = _check_pow2(n)
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    return polar_z_profile_batch(n, np.array([epsilon]))[0]


def polar_z_profile_batch(n: int, epsilons: np.ndarray) -> np.ndarray:
    """Vectorized ``polar_z_profile``: one profile row per epsilon."""
    r = _check_pow2(n)
    z = np.asarray(epsilons, dtype=np.float64)[:, None]
    for _ in range(r):
        out = np.empty((z.shape[0], z.shape[1] * 2))
        out[:, 0::2] = 2.0 * z - z * z
        out[:, 1::2] = z * z
        z = out
    return z


def _smallest_z_indices(z: np.ndarray, k: int) -> tuple[int, ...]:
    # stable sort: exact ties (common at epsilon = 0.5) go to the lower index
    order = np.argsort(z, kind="stable")
    return tuple(sorted(int(i) for i in order[:k]))


def build_polar(n: int, k: int, design_epsilon: float) -> tuple[Gf2Matrix, BitChannelProfile]:
    """Polar generator: the k rows of the Kronecker power with smallest Z."""
    _check_pow2(n)
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    z = polar_z_profile(n, design_epsilon)
    info_set = _smallest_z_indices(z, k)
    gen = Gf2Matrix.from_dense(kronecker_power(n)[list(info_set)])
    return gen, BitChannelProfile(n=n, z=z, info_set=info_set)


def build_reed_muller_like(n: int, k: int) -> Gf2Matrix:
    """RM-style generator: the k heaviest rows of the Kronecker power.

    Weight ties at the selection boundary go to the lower row index; at the
    classical parameter points this reproduces the usual RM row sets.
    """
    _check_pow2(n)
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    g = kronecker_power(n)
    weights = g.sum(axis=1).astype(np.int64)
    order = np.argsort(-weights, kind="stable")
    keep = sorted(int(i) for i in order[:k])
    return Gf2Matrix.from_dense(g[keep])
