"""
The spatially correlated Wiener degradation model

    X_i(t) = a_i·λ_i(t)·Λ(t) + σ·B_i(Λ(t)),   Λ(t) = t^α,   a_i ~ N(μₐ, τₐ²),

with λ_i(t) = exp[γ₁Z_{i,1}(t) + γ₂Z_{i,2}(t)]. Cov(a_i, a_j) is τₐ² on the diagonal, τₐ²ρ on the
first off-diagonal (|i−j| = 1) and 0 elsewhere.
"""

from typing import Mapping, Sequence, Tuple, Union

import numpy as np

from degradation_lab.kernels.cholesky import cholesky_factor
from degradation_lab.schemas import CovariateProfile, ModelParams, StructuralParams

Coordinates = Sequence[Tuple[int, float]]
ArrayLike = Union[float, np.ndarray]


def time_transform(t: ArrayLike, alpha: float) -> ArrayLike:
    """Λ(t) = t^α."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("time must be nonnegative")
    out = np.power(arr, alpha)
    return float(out) if out.ndim == 0 else out


def covariate_link(
    profile: CovariateProfile, t: ArrayLike, gamma1: float, gamma2: float
) -> ArrayLike:
    """λ(t) = exp[γ₁·1000/(S₁+273.15) + γ₂·ln S₂]."""
    z1, z2 = profile.scores(t)
    out = np.exp(gamma1 * z1 + gamma2 * z2)
    return float(out) if out.ndim == 0 else out


def loadings(
    profile: CovariateProfile, times: np.ndarray, alpha: float, gamma1: float, gamma2: float
) -> np.ndarray:
    """Ξ with entries λ(t_j)·Λ(t_j)."""
    times = np.asarray(times, dtype=float)
    return np.asarray(covariate_link(profile, times, gamma1, gamma2)) * np.asarray(
        time_transform(times, alpha)
    )


def mean_path(params: ModelParams, profile: CovariateProfile, times: np.ndarray) -> np.ndarray:
    """E[X(t)] = μₐ·λ(t)·Λ(t)."""
    return params.mu_a * loadings(profile, times, params.alpha, params.gamma1, params.gamma2)


def calibrate_threshold(params: ModelParams, profile: CovariateProfile, t: float) -> float:
    """The deterministic (σ = 0, τₐ = 0) degradation level at time ``t``."""
    return float(mean_path(params, profile, np.array([t]))[0])


def marginal_moments(
    params: ModelParams, profile: CovariateProfile, t: float
) -> Tuple[float, float]:
    """Returns (E[X(t)], Var[X(t)]) with Var = τₐ²[λΛ]² + σ²Λ."""
    lam = time_transform(t, params.alpha)
    xi = covariate_link(profile, t, params.gamma1, params.gamma2) * lam
    mean = params.mu_a * xi
    variance = params.tau_a2 * xi**2 + params.sigma**2 * lam
    return float(mean), float(variance)


def drift_covariance(tau_a2: float, rho: float, i: int, j: int) -> float:
    """Cov(a_i, a_j): τₐ² on the diagonal, τₐ²ρ on the first off-diagonal, and 0 elsewhere."""
    if i == j:
        return tau_a2
    if abs(i - j) == 1:
        return tau_a2 * rho
    return 0.0


# = COVARIANCE ASSEMBLY ================================================================================================


def _split(coords: Coordinates) -> Tuple[np.ndarray, np.ndarray]:
    if len(coords) == 0:
        return np.zeros(0, dtype=int), np.zeros(0)
    units, times = zip(*coords)
    return np.asarray(units, dtype=int), np.asarray(times, dtype=float)


def coordinate_loadings(
    profiles: Mapping[int, CovariateProfile],
    units: np.ndarray,
    times: np.ndarray,
    alpha: float,
    gamma1: float,
    gamma2: float,
) -> np.ndarray:
    out = np.empty(times.size)
    for unit in np.unique(units):
        mask = units == unit
        out[mask] = loadings(profiles[int(unit)], times[mask], alpha, gamma1, gamma2)
    return out


def _covariance(
    alpha: float,
    gamma1: float,
    gamma2: float,
    rho: float,
    drift_scale: float,
    diffusion_scale: float,
    profiles: Mapping[int, CovariateProfile],
    coords_a: Coordinates,
    coords_b: Coordinates,
) -> np.ndarray:
    ua, ta = _split(coords_a)
    ub, tb = _split(coords_b)
    xa = coordinate_loadings(profiles, ua, ta, alpha, gamma1, gamma2)
    xb = coordinate_loadings(profiles, ub, tb, alpha, gamma1, gamma2)
    gap = np.abs(ua[:, None] - ub[None, :])
    correlation = np.where(gap == 0, 1.0, np.where(gap == 1, rho, 0.0))
    same = gap == 0
    brownian = np.minimum.outer(ta**alpha, tb**alpha)
    return drift_scale * correlation * np.outer(xa, xb) + diffusion_scale * same * brownian


def coordinate_covariance(
    params: ModelParams,
    profiles: Mapping[int, CovariateProfile],
    coords_a: Coordinates,
    coords_b: Coordinates,
) -> np.ndarray:
    """Cov[X_i(s), X_j(t)] for every pair of (unit, time) coordinates."""
    return _covariance(
        params.alpha,
        params.gamma1,
        params.gamma2,
        params.rho,
        params.tau_a2,
        params.sigma**2,
        profiles,
        coords_a,
        coords_b,
    )


def grid_coordinates(times: Mapping[int, np.ndarray]) -> list:
    """Stack per-unit grids in ascending unit order, validating that each is increasing."""
    coords = []
    for unit in sorted(times):
        grid = np.asarray(times[unit], dtype=float)
        if grid.size and (grid[0] <= 0 or np.any(np.diff(grid) <= 0)):
            raise ValueError(f"times of unit {unit} must be positive and strictly increasing")
        coords.extend((unit, float(t)) for t in grid)
    return coords


def _mirror_upper(matrix: np.ndarray) -> np.ndarray:
    return np.triu(matrix) + np.triu(matrix, 1).T


def assemble_covariance(
    params: ModelParams,
    profiles: Mapping[int, CovariateProfile],
    times: Mapping[int, np.ndarray],
) -> np.ndarray:
    """The global covariance Ψ of the stacked observation vector.

    Diagonal blocks τₐ²(ΞᵢΞᵢᵀ + κ²Qᵢ), neighbour blocks τₐ²ρΞᵢΞⱼᵀ, zero otherwise; in the
    fixed-effects case only the σ²Qᵢ blocks remain. Raises CovarianceError if Ψ is not
    positive definite.
    """
    coords = grid_coordinates(times)
    psi = _mirror_upper(coordinate_covariance(params, profiles, coords, coords))
    cholesky_factor(psi)
    return psi


def scaled_covariance(
    theta1: StructuralParams,
    profiles: Mapping[int, CovariateProfile],
    times: Mapping[int, np.ndarray],
) -> Tuple[np.ndarray, np.ndarray]:
    """Returns (Ψ̃, Ξ) with Ψ = τₐ²Ψ̃ for the stacked per-unit grids."""
    coords = grid_coordinates(times)
    units, ts = _split(coords)
    psi = _covariance(
        theta1.alpha,
        theta1.gamma1,
        theta1.gamma2,
        theta1.rho,
        1.0,
        theta1.kappa**2,
        profiles,
        coords,
        coords,
    )
    xi = coordinate_loadings(profiles, units, ts, theta1.alpha, theta1.gamma1, theta1.gamma2)
    return _mirror_upper(psi), xi


def scaled_blocks(
    theta1: StructuralParams,
    profiles: Mapping[int, CovariateProfile],
    times: Mapping[int, np.ndarray],
):
    """Returns the diagonal blocks, neighbour blocks and stacked Ξ of Ψ̃ (units ascending)."""
    units = sorted(times)
    xis = {
        u: loadings(profiles[u], times[u], theta1.alpha, theta1.gamma1, theta1.gamma2)
        for u in units
    }
    diagonal = []
    for u in units:
        lam = np.asarray(times[u], dtype=float) ** theta1.alpha
        diagonal.append(
            np.outer(xis[u], xis[u]) + theta1.kappa**2 * np.minimum.outer(lam, lam)
        )
    off = [
        theta1.rho * np.outer(xis[a], xis[b]) if b - a == 1 else None
        for a, b in zip(units, units[1:])
    ]
    xi = np.concatenate([xis[u] for u in units]) if units else np.zeros(0)
    return diagonal, off, xi
