"""
Wrap-around L2 discrepancy of point sets in [0, 1]² and its kernel on the design grid.
"""

import numpy as np

WD2_OFFSET = -16.0 / 9.0


def phi(x, y):
    """φ(x, y) = 3/2 − |x − y| + |x − y|²."""
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return 1.5 - d + d**2


def wd2(points) -> float:
    """[WD(S)]² = −16/9 + (1/n²)·Σ_p Σ_q ∏_d φ(s_{p,d}, s_{q,d})."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.size == 0:
        raise ValueError("wd2 needs at least one point")
    if np.any(points < 0) or np.any(points > 1):
        raise ValueError("points must lie in [0, 1]")
    kernel = np.ones((points.shape[0], points.shape[0]))
    for d in range(points.shape[1]):
        kernel *= phi(points[:, d][:, None], points[:, d][None, :])
    return float(WD2_OFFSET + kernel.sum() / points.shape[0] ** 2)


def grid_points(n_epochs: int, n_units: int) -> np.ndarray:
    """Candidate points ((k + ½)/o, (j + ½)/L) ordered unit-major: index j·o + k."""
    u = (np.arange(n_epochs) + 0.5) / n_epochs
    v = (np.arange(n_units) + 0.5) / n_units
    uu, vv = np.meshgrid(u, v)
    return np.column_stack([uu.ravel(), vv.ravel()])


def grid_kernel(n_epochs: int, n_units: int) -> np.ndarray:
    """The pairwise φ-product kernel over every candidate grid point."""
    points = grid_points(n_epochs, n_units)
    return phi(points[:, 0][:, None], points[:, 0][None, :]) * phi(
        points[:, 1][:, None], points[:, 1][None, :]
    )
