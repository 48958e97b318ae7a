"""
First-passage Monte Carlo estimate of unit reliability R(t) = P(max_{s ≤ t} X(s) < ξ).
"""

from typing import Optional, Tuple

import numpy as np
from loguru import logger

from degradation_lab.model.core import loadings
from degradation_lab.schemas import CovariateProfile, ModelParams, ReliabilityConfig


def simulation_grid(start: float, horizons: np.ndarray, dt: float) -> np.ndarray:
    """Steps of ``dt`` from ``start`` merged with every horizon, so horizons are hit exactly."""
    steps = np.arange(start, horizons[-1], dt)
    return np.unique(np.round(np.concatenate([[start], steps, horizons]), 10))


def reliability(
    params: ModelParams,
    profile: CovariateProfile,
    unit: int,
    last_state: Optional[Tuple[float, float]],
    config: ReliabilityConfig,
) -> np.ndarray:
    """Returns R at each of ``config.horizons`` for one unit.

    Paths start at ``last_state`` (time, level) or at the origin. The drift a is drawn once per
    path from N(μₐ, τₐ²) and the Brownian part advances in Λ-time increments of the ``dt`` grid.
    Crossings are detected at grid points only, so all horizons share the same paths and R is
    nonincreasing across them.
    """
    horizons = np.round(np.asarray(config.horizons, dtype=float), 10)
    start, level = last_state if last_state is not None else (0.0, 0.0)
    if horizons[0] < start:
        raise ValueError(f"horizons must not precede the start time {start}")
    if horizons.size > 1 and config.dt > np.min(np.diff(horizons)) + 1e-12:
        raise ValueError("dt must not exceed the smallest gap between horizons")

    xi = config.threshold_xi
    rng = np.random.default_rng(config.seed)
    if params.fixed_effects:
        drift = np.full(config.n_paths, params.mu_a)
    else:
        drift = params.mu_a + np.sqrt(params.tau_a2) * rng.standard_normal(config.n_paths)

    grid = simulation_grid(start, horizons, config.dt)
    base = loadings(profile, grid, params.alpha, params.gamma1, params.gamma2)
    lam = grid**params.alpha
    increments = np.diff(lam)

    out = np.empty(horizons.size)
    alive = np.full(config.n_paths, level < xi)
    noise = np.zeros(config.n_paths)
    h = 0
    while h < horizons.size and horizons[h] == grid[0]:
        out[h] = alive.mean()
        h += 1
    for k in range(1, grid.size):
        noise += params.sigma * np.sqrt(increments[k - 1]) * rng.standard_normal(config.n_paths)
        x = level + drift * (base[k] - base[0]) + noise
        alive &= x < xi
        if h < horizons.size and horizons[h] == grid[k]:
            out[h] = alive.mean()
            h += 1

    logger.debug(f"unit {unit}: R from {out[0]:.4f} to {out[-1]:.4f} over {horizons.size} horizons")
    return out
