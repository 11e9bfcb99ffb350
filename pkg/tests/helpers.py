"""Independent oracles shared across test modules.

Everything here is written against plain Python data structures so it
cannot share a bug with the bit-packed implementations under test.
"""

import itertools

import numpy as np


def dense_rank_mod2(matrix) -> int:
    """Row rank over GF(2) by textbook integer elimination on lists."""
    a = [list(int(x) % 2 for x in row) for row in matrix]
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(rows):
            if i != r and a[i][c]:
                a[i] = [(x + y) % 2 for x, y in zip(a[i], a[r])]
        r += 1
    return r


def kron_f_power(r: int) -> np.ndarray:
    """[[1,0],[1,1]]^{kron r} as a dense 0/1 array (2^r x 2^r)."""
    f = np.array([[1, 0], [1, 1]], dtype=np.int64)
    out = np.array([[1]], dtype=np.int64)
    for _ in range(r):
        out = np.kron(out, f)
    return out


def exhaustive_failure_fraction(g_dense, i: int) -> float:
    """Fraction of i-column erasures that break ML decoding, by enumeration."""
    g = np.asarray(g_dense)
    k, n = g.shape
    fails = total = 0
    for erased in itertools.combinations(range(n), i):
        kept = [c for c in range(n) if c not in erased]
        fails += dense_rank_mod2(g[:, kept].tolist()) < k
        total += 1
    return fails / total
