"""
Exact Gaussian simulation of degradation paths at grid points, unconditionally or given an
observed history.
"""

from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from degradation_lab.errors import ConditioningError, CovarianceError
from degradation_lab.kernels.cholesky import cholesky_factor, whiten
from degradation_lab.model.core import coordinate_covariance, coordinate_loadings
from degradation_lab.schemas import CovariateProfile, ModelParams, ObservationSet

Target = Tuple[int, float]


def _coordinate_mean(
    params: ModelParams, profiles: Mapping[int, CovariateProfile], coords: Sequence[Target]
) -> np.ndarray:
    if not coords:
        return np.zeros(0)
    units = np.array([u for u, _ in coords], dtype=int)
    times = np.array([t for _, t in coords], dtype=float)
    return params.mu_a * coordinate_loadings(
        profiles, units, times, params.alpha, params.gamma1, params.gamma2
    )


def _symmetric(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def gaussian_draws(
    mean: np.ndarray, cov: np.ndarray, n_draws: int, rng: np.random.Generator
) -> np.ndarray:
    """Returns ``n_draws`` rows from N(mean, cov); a zero covariance gives the mean exactly."""
    if n_draws < 1:
        raise ValueError("n_draws must be at least 1")
    if not np.any(cov):
        return np.tile(mean, (n_draws, 1))
    factor = cholesky_factor(cov)
    return mean + rng.standard_normal((n_draws, mean.size)) @ factor.T


def simulate_paths(
    params: ModelParams,
    profiles: Mapping[int, CovariateProfile],
    grid: Sequence[float],
    n_paths: int,
    seed: int,
    units: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Draws degradation paths of every unit on a shared grid.

    Returns an array of shape (n_paths, units, grid points). Each row is an exact draw of the
    multivariate normal with mean μₐΞ and the assembled covariance Ψ.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a nonempty one-dimensional sequence")
    if grid[0] <= 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be positive and strictly increasing")
    units = sorted(profiles) if units is None else sorted(units)

    coords = [(u, float(t)) for u in units for t in grid]
    mean = _coordinate_mean(params, profiles, coords)
    cov = _symmetric(coordinate_covariance(params, profiles, coords, coords))

    rng = np.random.default_rng(seed)
    draws = gaussian_draws(mean, cov, n_paths, rng)
    logger.debug(f"simulated {n_paths} paths for {len(units)} units on {grid.size} points")
    return draws.reshape(n_paths, len(units), grid.size)


def _validate_targets(history: ObservationSet, targets: Sequence[Target]) -> List[Target]:
    if not targets:
        raise ConditioningError("at least one target coordinate is required")
    checked = []
    seen = set()
    for unit, time in targets:
        unit, time = int(unit), float(time)
        if unit < 1 or unit > history.n_units:
            raise ConditioningError(f"target unit {unit} outside 1..{history.n_units}")
        if time <= 0:
            raise ConditioningError(f"target time {time} must be positive")
        if (unit, time) in seen:
            raise ConditioningError(f"target ({unit}, {time}) requested twice")
        last = history.last_state(unit)
        if last is not None and time <= last[0]:
            raise ConditioningError(
                f"target ({unit}, {time}) does not follow the last observation at {last[0]}"
            )
        seen.add((unit, time))
        checked.append((unit, time))
    return checked


def conditional_law(
    params: ModelParams,
    profiles: Mapping[int, CovariateProfile],
    history: ObservationSet,
    targets: Sequence[Target],
) -> Tuple[np.ndarray, np.ndarray]:
    """Returns the mean and covariance of the target coordinates given the history."""
    targets = _validate_targets(history, targets)
    mean_t = _coordinate_mean(params, profiles, targets)
    cov_tt = _symmetric(coordinate_covariance(params, profiles, targets, targets))
    if history.size == 0:
        return mean_t, cov_tt

    coords = history.coordinates()
    cov_hh = _symmetric(coordinate_covariance(params, profiles, coords, coords))
    try:
        factor = cholesky_factor(cov_hh)
    except CovarianceError as e:
        raise ConditioningError(
            f"history covariance is singular at leading minor {e.minor}"
        ) from e

    cross = whiten(factor, coordinate_covariance(params, profiles, coords, targets))
    residual = whiten(factor, history.stacked_levels() - _coordinate_mean(params, profiles, coords))
    mean = mean_t + cross.T @ residual
    cov = _symmetric(cov_tt - cross.T @ cross)
    return mean, cov


def conditional_sample(
    params: ModelParams,
    profiles: Mapping[int, CovariateProfile],
    history: ObservationSet,
    targets: Sequence[Target],
    n_draws: int,
    seed,
) -> np.ndarray:
    """Draws the target coordinates from their Gaussian law given the history.

    Returns an array of shape (n_draws, len(targets)). ``seed`` is anything accepted by
    ``numpy.random.default_rng``.
    """
    mean, cov = conditional_law(params, profiles, history, targets)
    rng = np.random.default_rng(seed)
    try:
        return gaussian_draws(mean, cov, n_draws, rng)
    except CovarianceError as e:
        raise ConditioningError(
            f"conditional covariance is singular at leading minor {e.minor}"
        ) from e
