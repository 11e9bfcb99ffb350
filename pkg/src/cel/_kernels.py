"""
Numba kernels for the Monte-Carlo hot loop: incremental GF(2) independence
of parity-check columns added one at a time.

An erasure pattern is ML-decodable exactly when the parity-check columns at
the erased positions are linearly independent, so a single random column
permutation yields, via its prefixes, one coupled sample of the failure
indicator for every erasure count at once (failure is monotone in the
erased set).  The kernels return, per trial, the first prefix length at
which dependence appears.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# most-significant-bit lookup for 16-bit chunks; MSB16[0] unused
_MSB16 = np.zeros(1 << 16, dtype=np.uint8)
for _b in range(16):
    _MSB16[1 << _b: 1 << (_b + 1)] = _b
_MSB16.setflags(write=False)


@njit(cache=True, inline="always")
def _msb(v, words, msb16):
    for w in range(words - 1, -1, -1):
        x = v[w]
        if x != np.uint64(0):
            for sh in (48, 32, 16, 0):
                part = (x >> np.uint64(sh)) & np.uint64(0xFFFF)
                if part != np.uint64(0):
                    return w * 64 + sh + int(msb16[part])
    return -1


@njit(cache=True)
def first_dependence(perms, hcols, words, nbits, msb16, out):
    """For each permutation row, the 1-based index of the first column that
    is GF(2)-dependent on the earlier ones.  hcols[j] is the packed
    parity-check column j (nbits bits in *words* uint64 words).

    out[t] is set to n + 1 if no dependence occurs (only possible when the
    permutation is shorter than the rank budget allows, never for a real
    parity-check matrix scanned to the end).
    """
    trials, n = perms.shape
    basis = np.zeros((nbits, words), dtype=np.uint64)
    pivot_row = np.full(nbits, -1, dtype=np.int64)
    v = np.zeros(words, dtype=np.uint64)
    for t in range(trials):
        nstored = 0
        for i in range(nbits):
            pivot_row[i] = -1
        hit = n + 1
        for s in range(n):
            c = perms[t, s]
            for w in range(words):
                v[w] = hcols[c, w]
            while True:
                p = _msb(v, words, msb16)
                if p < 0:
                    hit = s + 1
                    break
                r = pivot_row[p]
                if r >= 0:
                    for w in range(words):
                        v[w] ^= basis[r, w]
                else:
                    for w in range(words):
                        basis[nstored, w] = v[w]
                    pivot_row[p] = nstored
                    nstored += 1
                    break
            if hit <= n:
                break
        out[t] = hit
    return out


def pack_columns(h_dense: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Pack the columns of a 0/1 matrix (nbits x n) into uint64 rows per column.

    Returns (hcols, words, nbits) with hcols shaped (n, words).
    """
    nbits, n = h_dense.shape
    words = max(1, (nbits + 63) >> 6)
    hcols = np.zeros((n, words), dtype=np.uint64)
    for b in range(nbits):
        w, sh = b >> 6, b & 63
        hcols[:, w] |= (h_dense[b].astype(np.uint64) << np.uint64(sh))
    return hcols, words, nbits


def first_dependence_counts(hcols: np.ndarray, words: int, nbits: int,
                            perms: np.ndarray) -> np.ndarray:
    """First-dependence index per permutation row (1-based; n+1 = never)."""
    out = np.empty(perms.shape[0], dtype=np.int64)
    if nbits == 0:
        # empty parity check (k = n): any nonempty erased set is fatal
        out[:] = 1
        return out
    return first_dependence(np.ascontiguousarray(perms, dtype=np.int64),
                            hcols, words, nbits, _MSB16, out)
