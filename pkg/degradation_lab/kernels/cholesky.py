"""
Cholesky-based evaluation of Gaussian quadratic forms and log-determinants. Explicit inverses are
never formed.
"""

from typing import Tuple

import numpy as np
from scipy.linalg import lapack, solve_triangular

from degradation_lab.errors import CovarianceError

PIVOT_TOLERANCE = 1e-12


def cholesky_factor(cov: np.ndarray) -> np.ndarray:
    """Returns the lower Cholesky factor of ``cov``.

    Raises CovarianceError naming the 1-based leading minor that fails, either because LAPACK
    rejects it or because its squared pivot is below PIVOT_TOLERANCE times the largest diagonal.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be a square matrix")
    if cov.shape[0] == 0:
        return np.zeros((0, 0))
    if not np.all(np.isfinite(cov)):
        raise CovarianceError(1, "covariance has non-finite entries")

    factor, info = lapack.dpotrf(cov, lower=1, clean=1)
    if info > 0:
        raise CovarianceError(int(info))
    if info < 0:
        raise ValueError(f"illegal value in argument {-info} of dpotrf")

    scale = np.max(np.diag(cov))
    pivots = np.diag(factor) ** 2
    small = np.flatnonzero(pivots < PIVOT_TOLERANCE * scale)
    if small.size:
        raise CovarianceError(
            int(small[0]) + 1,
            f"pivot {pivots[small[0]]:.3e} of leading minor {small[0] + 1} is below tolerance",
        )
    return np.tril(factor)


def whiten(factor: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Returns L⁻¹v for the lower factor L (v may have several columns)."""
    return solve_triangular(factor, v, lower=True, check_finite=False)


def logdet_from_factor(factor: np.ndarray) -> float:
    return float(2.0 * np.sum(np.log(np.diag(factor))))


def stable_mvn_quadform_logdet(cov: np.ndarray, residual: np.ndarray) -> Tuple[float, float]:
    """Returns (rᵀ·cov⁻¹·r, ln|cov|) from a single Cholesky factorisation."""
    residual = np.asarray(residual, dtype=float)
    factor = cholesky_factor(cov)
    if residual.shape != (factor.shape[0],):
        raise ValueError("residual length must match the covariance dimension")
    w = whiten(factor, residual)
    return float(w @ w), logdet_from_factor(factor)
