"""Dense Gaussian elimination with partial pivoting.

The systems here stay small (one row per hop level), so a plain O(k^3)
elimination on float64 copies is the whole story.  Both entry points share
the same pivot tolerance so "singular" means the same thing everywhere.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularMatrixError

PIVOT_RTOL = 1e-12


def pivot_tolerance(a: np.ndarray) -> float:
    """Absolute pivot cutoff: PIVOT_RTOL scaled by the largest entry."""
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    return PIVOT_RTOL * (scale if scale > 0.0 else 1.0)


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b`` for square ``a``.

    Raises SingularMatrixError naming the first column without a usable
    pivot.  Inputs are copied, never modified.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"shape mismatch: a {a.shape}, b {b.shape}")
    tol = pivot_tolerance(a)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) <= tol:
            raise SingularMatrixError(col)
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        factors = a[col + 1 :, col] / a[col, col]
        a[col + 1 :, col:] -= np.outer(factors, a[col, col:])
        b[col + 1 :] -= factors * b[col]
    x = np.empty(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x


def determinant(a: np.ndarray) -> float:
    """Determinant by the same elimination; returns 0.0 on a dead pivot."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if n == 0:
        return 1.0
    tol = pivot_tolerance(a)
    sign = 1.0
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) <= tol:
            return 0.0
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            sign = -sign
        factors = a[col + 1 :, col] / a[col, col]
        a[col + 1 :, col:] -= np.outer(factors, a[col, col:])
    return sign * float(np.prod(np.diag(a)))
