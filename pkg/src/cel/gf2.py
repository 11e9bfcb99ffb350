"""
Bit-packed GF(2) matrix arithmetic.

Matrices are stored row-major with 64 columns per machine word, which makes
row elimination a handful of XORs on small uint64 arrays.  Rank checks
dominate the Monte-Carlo paths elsewhere in the package, so the packed
layout is load-bearing, not cosmetic.

Also hosts the real-valued decoder for binary-coded real data: the code is
binary but the payload is real, so recovery is ordinary Gaussian
elimination with partial pivoting on a 0/1 coefficient matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Gf2Matrix",
    "NotDecodable",
    "rank",
    "column_submatrix_rank",
    "null_space",
    "solve_real_system",
]


class NotDecodable(Exception):
    """Raised when a kept-column set is rank deficient and cannot be solved."""


def _words(cols: int) -> int:
    return (cols + 63) >> 6


def _pack(dense: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array of shape (rows, cols) into uint64 words, little-endian bits."""
    dense = np.asarray(dense, dtype=np.uint8) & 1
    rows, cols = dense.shape
    w = _words(cols)
    padded = np.zeros((rows, w * 64), dtype=np.uint8)
    padded[:, :cols] = dense
    # bit j of word w is column w*64 + j
    chunks = padded.reshape(rows, w, 64)
    weights = (np.uint64(1) << np.arange(64, dtype=np.uint64))
    return (chunks.astype(np.uint64) * weights).sum(axis=2, dtype=np.uint64)


def _unpack(data: np.ndarray, cols: int) -> np.ndarray:
    rows, w = data.shape
    bits = (data[:, :, None] >> np.arange(64, dtype=np.uint64)) & np.uint64(1)
    return bits.reshape(rows, w * 64)[:, :cols].astype(np.uint8)


@dataclass(frozen=True)
class Gf2Matrix:
    """A rows x cols binary matrix, rows bit-packed into uint64 words.

    Treat instances as immutable values: all operations copy before
    eliminating, so matrices are safe to share across workers.
    """

    rows: int
    cols: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix must have at least one row and column")
        if self.data.shape != (self.rows, _words(self.cols)):
            raise ValueError("packed data has wrong shape")

    @classmethod
    def from_dense(cls, dense) -> "Gf2Matrix":
        dense = np.atleast_2d(np.asarray(dense))
        return cls(dense.shape[0], dense.shape[1], _pack(dense))

    def to_dense(self) -> np.ndarray:
        return _unpack(self.data, self.cols)

    def get(self, i: int, j: int) -> int:
        return int((self.data[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def column_submatrix(self, kept) -> "Gf2Matrix":
        kept = _check_index_set(kept, self.cols)
        if len(kept) == 0:
            raise ValueError("kept column set must be nonempty")
        return Gf2Matrix.from_dense(self.to_dense()[:, kept])

    # --- textual interchange format: "k n" header then k rows of 0/1 chars ---

    def to_text(self) -> str:
        dense = self.to_dense()
        lines = [f"{self.rows} {self.cols}"]
        lines.extend("".join("1" if b else "0" for b in row) for row in dense)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Gf2Matrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        try:
            r, c = (int(x) for x in lines[0].split())
        except (IndexError, ValueError) as exc:
            raise ValueError("bad header line, expected 'k n'") from exc
        if len(lines) != r + 1:
            raise ValueError(f"expected {r} matrix rows, got {len(lines) - 1}")
        dense = np.zeros((r, c), dtype=np.uint8)
        for i, ln in enumerate(lines[1:]):
            if len(ln) != c or set(ln) - {"0", "1"}:
                raise ValueError(f"row {i} is not {c} characters of 0/1")
            dense[i] = np.frombuffer(ln.encode(), dtype=np.uint8) - ord("0")
        return cls.from_dense(dense)


def _check_index_set(kept, cols: int) -> list[int]:
    kept = sorted(set(int(j) for j in kept))
    if kept and (kept[0] < 0 or kept[-1] >= cols):
        raise ValueError(f"column index out of range 0..{cols - 1}")
    return kept


def _eliminate(data: np.ndarray, rows: int, cols: int, reduce_up: bool = False):
    """Destructive forward elimination on packed *data*.

    First-nonzero pivot per column, scanning columns left to right.
    Returns (rank, pivot_cols).  With reduce_up=True the result is in
    reduced row-echelon form.
    """
    r = 0
    pivot_cols = []
    one = np.uint64(1)
    for c in range(cols):
        w, b = c >> 6, np.uint64(c & 63)
        col = (data[r:, w] >> b) & one
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
        below = (data[r + 1:, w] >> b) & one
        hit = r + 1 + np.nonzero(below)[0]
        data[hit] ^= data[r]
        if reduce_up and r > 0:
            above = (data[:r, w] >> b) & one
            hit = np.nonzero(above)[0]
            data[hit] ^= data[r]
        pivot_cols.append(c)
        r += 1
        if r == rows:
            break
    return r, pivot_cols


def rank(m: Gf2Matrix) -> int:
    """GF(2) row rank, computed by forward elimination on an internal copy."""
    r, _ = _eliminate(m.data.copy(), m.rows, m.cols)
    return r


def column_submatrix_rank(m: Gf2Matrix, kept) -> int:
    """Rank of the matrix restricted to the *kept* columns."""
    kept = _check_index_set(kept, m.cols)
    if not kept:
        return 0
    return rank(m.column_submatrix(kept))


def null_space(m: Gf2Matrix) -> Gf2Matrix | None:
    """Basis of {h : m @ h^T = 0 over GF(2)} as rows of a (cols - rank) x cols matrix.

    Returns None when the null space is trivial (rank == cols).
    """
    data = m.data.copy()
    r, pivot_cols = _eliminate(data, m.rows, m.cols, reduce_up=True)
    free = [c for c in range(m.cols) if c not in set(pivot_cols)]
    if not free:
        return None
    rref = _unpack(data, m.cols)[:r]
    basis = np.zeros((len(free), m.cols), dtype=np.uint8)
    for idx, f in enumerate(free):
        basis[idx, f] = 1
        for row_i, p in enumerate(pivot_cols):
            basis[idx, p] = rref[row_i, f]
    return Gf2Matrix.from_dense(basis)


def _independent_row_subset(dense01: np.ndarray, need: int) -> list[int]:
    """Indices of *need* GF(2)-independent rows of a 0/1 matrix, greedy order.

    GF(2) independence of 0/1 rows implies independence over the reals, so
    the selected square system is invertible for the real solve.
    """
    basis: dict[int, int] = {}
    chosen = []
    for idx, row in enumerate(dense01):
        v = 0
        for j, b in enumerate(row):
            if b:
                v |= 1 << j
        while v:
            p = v.bit_length() - 1
            if p in basis:
                v ^= basis[p]
            else:
                basis[p] = v
                chosen.append(idx)
                break
        if len(chosen) == need:
            return chosen
    raise NotDecodable(f"kept columns have rank {len(chosen)} < {need}")


def solve_real_system(m: Gf2Matrix, kept, observed) -> list[np.ndarray]:
    """Recover the original real task vectors from a decodable kept-column set.

    Each kept column j carries the real vector sum of the task vectors x_i
    with m[i][j] = 1.  Requires the kept columns to have full rank; solving
    uses LAPACK partial-pivoted elimination on a 0/1 coefficient matrix.
    """
    kept = _check_index_set(kept, m.cols)
    observed = [np.asarray(v, dtype=np.float64) for v in observed]
    if len(observed) != len(kept):
        raise ValueError("need exactly one observed vector per kept column")
    if observed and any(v.shape != observed[0].shape for v in observed):
        raise ValueError("observed vectors must all have the same length")
    dense = m.to_dense()[:, kept].T  # one equation per kept column
    rows_idx = _independent_row_subset(dense, m.rows)
    a = dense[rows_idx].astype(np.float64)
    b = np.stack([observed[i] for i in rows_idx])
    x = np.linalg.solve(a, b)
    return [x[i] for i in range(m.rows)]
