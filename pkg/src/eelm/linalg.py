"""Dense real matrix utilities: two pseudoinverse paths and diagnostics.

Matrices are plain 2-D float64 ``numpy`` arrays. Two independent routes
to the Moore-Penrose generalized inverse are provided:

* :func:`pinv_svd` — singular value decomposition with a small-singular-
  value cutoff; valid for any rank.
* :func:`pinv_normal` — the orthogonal-projection form ``(AᵀA)⁻¹Aᵀ``
  via a Cholesky factorization of the Gram matrix; requires full column
  rank and fails loudly (never regularizes) when that is violated.

Keeping both paths separate matters: the training code uses the normal-
equation route precisely because the constructive weight selection
guarantees a full-column-rank hidden matrix, and silently patching a
rank problem would hide a violation of that guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, PreconditionError, RankDeficientError, ShapeError

__all__ = [
    "as_matrix",
    "pinv_svd",
    "pinv_normal",
    "numerical_rank",
    "DominanceReport",
    "strict_dominance_report",
]


def as_matrix(a, name: str = "matrix", allow_nonfinite: bool = False) -> np.ndarray:
    """Validate and convert ``a`` to a 2-D float64 array.

    Raises ShapeError for wrong dimensionality or empty axes and
    PreconditionError for NaN/Inf entries (unless ``allow_nonfinite``).
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must have at least one row and column, "
                         f"got shape {arr.shape}")
    if not allow_nonfinite and not np.isfinite(arr).all():
        raise PreconditionError(f"{name} contains non-finite entries")
    return arr


def _svd(a: np.ndarray):
    try:
        return np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc


def _default_tol(a: np.ndarray) -> float:
    # standard effective-rank cutoff relative to the largest singular value
    return max(a.shape) * np.finfo(np.float64).eps


def pinv_svd(a, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse by SVD, valid for any rank.

    Singular values at or below ``tol * sigma_max`` are treated as zero;
    ``tol`` defaults to ``max(rows, cols) * machine epsilon``.
    """
    a = as_matrix(a, "pinv_svd input")
    if tol is None:
        tol = _default_tol(a)
    elif tol < 0:
        raise PreconditionError(f"tol must be >= 0, got {tol}")
    u, s, vt = _svd(a)
    cutoff = tol * (s[0] if s.size else 0.0)
    inv = np.zeros_like(s)
    keep = s > cutoff
    inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T


def numerical_rank(a, tol: float | None = None) -> int:
    """Number of singular values above the ``pinv_svd`` cutoff."""
    a = as_matrix(a, "numerical_rank input")
    if tol is None:
        tol = _default_tol(a)
    s = _svd(a)[1]
    cutoff = tol * (s[0] if s.size else 0.0)
    return int(np.count_nonzero(s > cutoff))


def _cholesky_lower(g: np.ndarray) -> np.ndarray:
    """Cholesky factor of a symmetric matrix, pivot failures reported.

    A non-positive (or non-finite) pivot means ``g`` is not numerically
    positive definite; the failing zero-based pivot index is raised with
    RankDeficientError rather than patched over.
    """
    n = g.shape[0]
    low = np.zeros_like(g)
    for j in range(n):
        s = g[j, j] - low[j, :j] @ low[j, :j]
        if not (s > 0.0 and math.isfinite(s)):
            raise RankDeficientError(
                f"Gram matrix is not positive definite at pivot {j} "
                f"(leading minor of order {j + 1})", pivot=j)
        low[j, j] = math.sqrt(s)
        if j + 1 < n:
            low[j + 1:, j] = (g[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return low


def _cholesky_solve(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``(low @ low.T) x = b`` by forward/backward substitution."""
    n = low.shape[0]
    y = np.empty_like(b)
    for i in range(n):
        y[i] = (b[i] - low[i, :i] @ y[:i]) / low[i, i]
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - low[i + 1:, i] @ x[i + 1:]) / low[i, i]
    return x


def pinv_normal(a) -> np.ndarray:
    """Pseudoinverse of a full-column-rank matrix via the Gram system.

    Computes ``(AᵀA)⁻¹Aᵀ`` by forming the Gram matrix and solving the
    symmetric positive-definite system with a direct Cholesky
    factorization. Raises RankDeficientError (naming the failing pivot)
    when the Gram matrix is not numerically positive definite.
    """
    a = as_matrix(a, "pinv_normal input")
    gram = a.T @ a
    low = _cholesky_lower(gram)
    return _cholesky_solve(low, a.T)


@dataclass(frozen=True)
class DominanceReport:
    """Strict diagonal dominance diagnostics for a square matrix.

    ``row_dominant``: every |diagonal| exceeds the sum of |off-diagonal|
    entries in its own row. ``globally_dominant``: every diagonal entry
    exceeds the sum of |off-diagonal| entries of the whole matrix (the
    stronger property the constructive weight selection produces).
    Margins are the worst-case differences; negative means violated.
    """

    row_dominant: bool
    globally_dominant: bool
    row_margin: float
    global_margin: float

    @property
    def worst_margin(self) -> float:
        return min(self.row_margin, self.global_margin)


def strict_dominance_report(a) -> DominanceReport:
    """Report row-wise and global strict diagonal dominance of ``a``."""
    a = as_matrix(a, "dominance input")
    n, m = a.shape
    if n != m:
        raise ShapeError(f"dominance requires a square matrix, got {a.shape}")
    absa = np.abs(a)
    diag = np.diag(a)
    row_off = absa.sum(axis=1) - np.abs(diag)
    total_off = absa.sum() - np.abs(diag).sum()
    row_margin = float((np.abs(diag) - row_off).min())
    global_margin = float((diag - total_off).min())
    return DominanceReport(
        row_dominant=bool(row_margin > 0.0),
        globally_dominant=bool(global_margin > 0.0),
        row_margin=row_margin,
        global_margin=global_margin,
    )
