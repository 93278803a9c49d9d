"""Cyclic Jacobi rotations for dense symmetric eigenproblems."""
from __future__ import annotations

import numpy as np

from .errors import DimensionError


def jacobi_eigenvalues(a, tol: float = 1e-13, max_sweeps: int = 100) -> np.ndarray:
    """All eigenvalues of the symmetric matrix ``a`` in ascending order.

    Sweeps over the strictly upper triangle in row order and annihilates each
    pivot with the numerically stable rotation (Golub and Van Loan, 8.5).  Stops
    once the off-diagonal Frobenius norm drops below ``tol`` times the matrix norm.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise DimensionError("expected a square matrix")
    if not np.allclose(a, a.T, atol=1e-12 * (np.abs(a).max() + 1.0)):
        raise DimensionError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-18 * abs(diff):
                    # rotation angle below rounding; eigenvalue shift is O(apq^2 / diff)
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = diff / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # A <- J^T A J acting on rows/columns p and q
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))
