"""Dense GF(2) linear algebra on numpy uint8 arrays.

Row-echelon form, rank, particular solutions and null spaces, all by
Gaussian elimination with XOR row operations.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

BitMatrix = NDArray[np.uint8]


def as_bits(a: ArrayLike) -> BitMatrix:
    """Return a copy of *a* reduced mod 2 as uint8."""
    return (np.asarray(a, dtype=np.int64) % 2).astype(np.uint8)


def row_echelon(M: ArrayLike, n_pivot_cols: int | None = None) -> tuple[BitMatrix, list[int]]:
    """Reduced row-echelon form over GF(2).

    Pivots are searched in the first *n_pivot_cols* columns only (all by
    default); row operations still act on the full width, so augmented
    columns are carried along.

    Returns ``(R, pivot_cols)``.
    """
    R = as_bits(M)
    if R.ndim != 2:
        raise ValueError("row_echelon expects a 2-D matrix")
    rows, cols = R.shape
    if n_pivot_cols is None:
        n_pivot_cols = cols

    pivot_cols: list[int] = []
    pivot_row = 0
    for col in range(n_pivot_cols):
        if pivot_row == rows:
            break
        hits = np.nonzero(R[pivot_row:, col])[0]
        if hits.size == 0:
            continue
        found = pivot_row + int(hits[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]
        for row in range(rows):
            if row != pivot_row and R[row, col]:
                R[row] ^= R[pivot_row]
        pivot_cols.append(col)
        pivot_row += 1
    return R, pivot_cols


def rank(M: ArrayLike) -> int:
    """GF(2) rank of a binary matrix."""
    M = as_bits(M)
    if M.size == 0:
        return 0
    _, pivots = row_echelon(M)
    return len(pivots)


def solve(A: ArrayLike, b: ArrayLike) -> BitMatrix | None:
    """One solution x of ``A x = b`` over GF(2), or None if inconsistent.

    Free variables are set to zero.
    """
    A = as_bits(A)
    b = as_bits(b).reshape(-1)
    rows, cols = A.shape
    if b.shape[0] != rows:
        raise ValueError(f"right-hand side has {b.shape[0]} entries, expected {rows}")
    x = np.zeros(cols, dtype=np.uint8)
    if rows == 0:
        return x
    R, pivots = row_echelon(np.hstack([A, b[:, None]]), n_pivot_cols=cols)
    # a pivot-free row with a 1 on the right means 0 = 1
    if np.any(R[len(pivots):, cols]):
        return None
    for r, c in enumerate(pivots):
        x[c] = R[r, cols]
    return x


def nullspace(A: ArrayLike) -> BitMatrix:
    """Basis of ``{x : A x = 0}`` as the rows of a (k, cols) matrix."""
    A = as_bits(A)
    rows, cols = A.shape
    if rows == 0:
        return np.eye(cols, dtype=np.uint8)
    R, pivots = row_echelon(A)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, c in enumerate(pivots):
            if R[r, f]:
                basis[i, c] = 1
    return basis


def span(basis: ArrayLike) -> BitMatrix:
    """All GF(2) combinations of the rows of *basis* (with duplicates removed)."""
    basis = as_bits(basis)
    width = basis.shape[1] if basis.ndim == 2 else 0
    vectors = {tuple([0] * width)}
    for row in basis:
        vectors |= {tuple(int(a) ^ int(b) for a, b in zip(v, row)) for v in vectors}
    return np.array(sorted(vectors), dtype=np.uint8).reshape(-1, width)
