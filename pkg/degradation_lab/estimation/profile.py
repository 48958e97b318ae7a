"""
Concentrated (profile) likelihood of the structural parameters θ₁ = (α, κ, γ₁, γ₂, ρ).

With Ψ = τₐ²Ψ̃ the scale parameters have closed forms

    μ̂ₐ = ΞᵀΨ̃⁻¹y / ΞᵀΨ̃⁻¹Ξ,    τ̂ₐ² = (y − μ̂ₐΞ)ᵀΨ̃⁻¹(y − μ̂ₐΞ) / M,

and every quantity is computed from triangular solves against a Cholesky factor of Ψ̃.
"""

import math
from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from degradation_lab.errors import EstimationError
from degradation_lab.kernels import BlockTridiagonalFactor
from degradation_lab.kernels.cholesky import (
    cholesky_factor,
    logdet_from_factor,
    stable_mvn_quadform_logdet,
    whiten,
)
from degradation_lab.model.core import (
    coordinate_covariance,
    coordinate_loadings,
    grid_coordinates,
    scaled_blocks,
    scaled_covariance,
)
from degradation_lab.schemas import (
    CovariateProfile,
    ModelParams,
    ObservationSet,
    StructuralParams,
)

Method = Literal["dense", "blockwise"]
LOG_2PI = math.log(2.0 * math.pi)
INTERPOLATION_TOLERANCE = 1e-24


@dataclass(frozen=True)
class ConcentratedScale:
    mu_hat: float
    tau2_hat: float
    logdet: float
    size: int

    @property
    def degenerate(self) -> bool:
        return self.tau2_hat <= 0.0

    @property
    def profile_loglik(self) -> float:
        if self.degenerate:
            return math.inf
        m = self.size
        return -0.5 * m * math.log(self.tau2_hat) - 0.5 * self.logdet - 0.5 * m * (1.0 + LOG_2PI)


def scale_terms(
    theta1: StructuralParams,
    data: ObservationSet,
    profiles: Mapping[int, CovariateProfile],
    method: Method = "dense",
) -> ConcentratedScale:
    """Evaluates (μ̂ₐ, τ̂ₐ², ln|Ψ̃|) at θ₁. Raises CovarianceError when Ψ̃ is not PD."""
    if data.size == 0:
        raise EstimationError("cannot concentrate the scale parameters without data")
    grids = data.grids()
    y = data.stacked_levels()

    if method == "dense":
        psi, xi = scaled_covariance(theta1, profiles, grids)
        factor = cholesky_factor(psi)
        u, w = whiten(factor, y), whiten(factor, xi)
        logdet = logdet_from_factor(factor)
    elif method == "blockwise":
        diagonal, off, xi = scaled_blocks(theta1, profiles, grids)
        blocks = BlockTridiagonalFactor(diagonal, off)
        u, w = blocks.whiten(y), blocks.whiten(xi)
        logdet = blocks.logdet
    else:
        raise ValueError(f"unknown evaluation method {method!r}")

    information = float(w @ w)
    if information <= 0.0:
        raise EstimationError("the loadings carry no information about the mean drift")
    mu_hat = float(w @ u) / information
    residual = u - mu_hat * w
    spread = float(residual @ residual)
    # exact interpolation up to rounding
    if spread <= INTERPOLATION_TOLERANCE * max(float(u @ u), 1.0):
        spread = 0.0
    tau2_hat = spread / y.size
    return ConcentratedScale(mu_hat=mu_hat, tau2_hat=tau2_hat, logdet=logdet, size=y.size)


def concentrate_scale(
    theta1: StructuralParams,
    data: ObservationSet,
    profiles: Mapping[int, CovariateProfile],
    method: Method = "dense",
):
    """Returns the closed-form maximisers (μ̂ₐ, τ̂ₐ²) at fixed θ₁."""
    terms = scale_terms(theta1, data, profiles, method)
    return terms.mu_hat, terms.tau2_hat


def profile_loglik(
    theta1: StructuralParams,
    data: ObservationSet,
    profiles: Mapping[int, CovariateProfile],
    method: Method = "dense",
) -> float:
    """l_p(θ₁) = −(M/2)ln τ̂ₐ² − ½ln|Ψ̃| − (M/2)(1 + ln 2π).

    The constant makes l_p equal to the full log-likelihood at (θ₁, μ̂ₐ, τ̂ₐ²). An exact
    interpolation (τ̂ₐ² = 0) returns +inf.
    """
    return scale_terms(theta1, data, profiles, method).profile_loglik


def full_loglik(
    params: ModelParams, data: ObservationSet, profiles: Mapping[int, CovariateProfile]
) -> float:
    """The Gaussian log-likelihood of the stacked observations under the complete θ."""
    coords = grid_coordinates(data.grids())
    psi = coordinate_covariance(params, profiles, coords, coords)
    psi = np.triu(psi) + np.triu(psi, 1).T
    units = np.array([u for u, _ in coords], dtype=int)
    times = np.array([t for _, t in coords])
    xi = coordinate_loadings(profiles, units, times, params.alpha, params.gamma1, params.gamma2)
    residual = data.stacked_levels() - params.mu_a * xi
    quad, logdet = stable_mvn_quadform_logdet(psi, residual)
    return -0.5 * (data.size * LOG_2PI + logdet + quad)
