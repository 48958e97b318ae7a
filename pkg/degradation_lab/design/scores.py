"""
Score functions of one unit's augmented likelihood with respect to ζ = (α, γ₁, γ₂).

The augmented vector x★ = (x₁, …, x_m, x_{m+1}) follows N(μₐΞ★, τₐ²Σ̃★) with
Σ̃★ = Ξ★Ξ★ᵀ + κ²Q★, so with r = x★ − μₐΞ★ and D★ = rᵀΣ̃★⁻¹r

    l★ = const − ½ln|Σ̃★| − D★/(2τₐ²).

Every derivative is assembled from the rank-one pieces v = Q̃★⁻¹Ξ★, B★ = 1 + Ξ★ᵀv and the
closed-form tridiagonal kernel inverse.
"""

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from degradation_lab.errors import DesignError
from degradation_lab.kernels.cholesky import stable_mvn_quadform_logdet
from degradation_lab.kernels.kernel import (
    KernelMatrix,
    kernel_inverse_alpha,
    kernel_logdet_alpha,
)
from degradation_lab.kernels.rank_one import RankOneCovariance
from degradation_lab.model.core import loadings
from degradation_lab.model.simulation import conditional_law
from degradation_lab.schemas import (
    CovariateProfile,
    ModelParams,
    Observation,
    ObservationSet,
    UnitHistory,
)


def _require_random_effects(params: ModelParams):
    if params.fixed_effects:
        raise DesignError("score functions need a positive drift variance tau_a2")


def augmented_loglik(
    params: ModelParams, times: np.ndarray, levels: np.ndarray, profile: CovariateProfile
) -> float:
    """The Gaussian log-likelihood of one unit's levels under its marginal (non-spatial) law."""
    _require_random_effects(params)
    times = np.asarray(times, dtype=float)
    xi = loadings(profile, times, params.alpha, params.gamma1, params.gamma2)
    lam = times**params.alpha
    cov = params.tau_a2 * (np.outer(xi, xi) + params.kappa**2 * np.minimum.outer(lam, lam))
    quad, logdet = stable_mvn_quadform_logdet(cov, np.asarray(levels, dtype=float) - params.mu_a * xi)
    return -0.5 * (times.size * math.log(2.0 * math.pi) + logdet + quad)


@dataclass(frozen=True)
class AugmentedVector:
    """A unit history extended by a candidate time, with the predictive law of X(t_next)."""

    history: UnitHistory
    t_next: float
    times: np.ndarray = field(repr=False)
    xi_vector: np.ndarray = field(repr=False)
    predictive_mean: float
    predictive_variance: float

    @classmethod
    def build(cls, params: ModelParams, history: UnitHistory, t_next: float) -> "AugmentedVector":
        if t_next <= history.last_time:
            raise DesignError(f"t_next {t_next} must follow the last observation {history.last_time}")
        single = ObservationSet(
            n_units=history.unit,
            records=[
                Observation(unit=history.unit, time=t, level=x)
                for t, x in zip(history.times, history.levels)
            ],
        )
        mean, cov = conditional_law(
            params, {history.unit: history.profile}, single, [(history.unit, t_next)]
        )
        variance = float(cov[0, 0])
        if not variance > 0:
            raise DesignError(f"predictive variance at {t_next} is not positive")
        times = np.append(np.asarray(history.times, dtype=float), t_next)
        return cls(
            history=history,
            t_next=float(t_next),
            times=times,
            xi_vector=loadings(history.profile, times, params.alpha, params.gamma1, params.gamma2),
            predictive_mean=float(mean[0]),
            predictive_variance=variance,
        )

    def levels(self, x_next) -> np.ndarray:
        """Rows x★ = (x, x_next) for each value in ``x_next``."""
        x_next = np.atleast_1d(np.asarray(x_next, dtype=float))
        base = np.tile(np.asarray(self.history.levels, dtype=float), (x_next.size, 1))
        return np.column_stack([base, x_next])


class ScoreTerms:
    """Pieces of ∂l★/∂(α, γ₁, γ₂) that do not depend on the observed levels."""

    def __init__(self, params: ModelParams, times: np.ndarray, profile: CovariateProfile):
        _require_random_effects(params)
        times = np.asarray(times, dtype=float)
        if np.any(times <= 0):
            raise DesignError("score functions need positive times (ln t must exist)")
        self.mu = params.mu_a
        self.tau2 = params.tau_a2
        kernel = KernelMatrix(times, params.alpha, params.kappa)
        xi = loadings(profile, times, params.alpha, params.gamma1, params.gamma2)
        self.rank_one = RankOneCovariance(xi, kernel)
        self.xi = xi
        self.v = self.rank_one.q_inverse_xi
        self.B = self.rank_one.B_star

        z1, z2 = profile.scores(times)
        self.xi_gamma = xi[:, None] * np.column_stack([z1, z2])
        self.xi_alpha = xi * np.log(times)

        qinv = self.rank_one.q_inverse
        self.qinv = qinv
        self.qinv_alpha = kernel_inverse_alpha(kernel)
        self.B_alpha = 2.0 * self.xi_alpha @ self.v + xi @ self.qinv_alpha @ xi
        self.v_alpha = self.qinv_alpha @ xi + qinv @ self.xi_alpha
        self.logdet_alpha = kernel_logdet_alpha(kernel) + self.B_alpha / self.B

    def loading_gradient(self, vr: np.ndarray, p: np.ndarray) -> np.ndarray:
        """∂l★/∂Ξ★ per row: −v/B + (μₐ + v·r/B)·Σ̃★⁻¹r/τₐ²."""
        return -self.v / self.B + (self.mu + vr / self.B)[:, None] * p / self.tau2

    def scores(self, levels: np.ndarray) -> np.ndarray:
        """Returns rows (∂l★/∂α, ∂l★/∂γ₁, ∂l★/∂γ₂) for each row of augmented levels."""
        levels = np.atleast_2d(np.asarray(levels, dtype=float))
        residual = levels - self.mu * self.xi
        s = residual @ self.qinv
        vr = residual @ self.v
        p = s - np.outer(vr, self.v) / self.B

        gamma = self.loading_gradient(vr, p) @ self.xi_gamma

        vr_alpha = residual @ self.v_alpha
        quad_alpha = np.einsum("ij,jk,ik->i", residual, self.qinv_alpha, residual)
        inverse_term = quad_alpha - (
            2.0 * vr_alpha * vr / self.B - vr**2 * self.B_alpha / self.B**2
        )
        d_alpha = -2.0 * self.mu * (p @ self.xi_alpha) + inverse_term
        alpha = -0.5 * self.logdet_alpha - d_alpha / (2.0 * self.tau2)
        return np.column_stack([alpha, gamma])


def score_gamma(params: ModelParams, aug: AugmentedVector, x_next: float) -> np.ndarray:
    """(∂l★/∂γ₁, ∂l★/∂γ₂) at x★ = (x, x_next)."""
    terms = ScoreTerms(params, aug.times, aug.history.profile)
    return terms.scores(aug.levels(x_next))[0, 1:]


def score_alpha(params: ModelParams, aug: AugmentedVector, x_next: float) -> float:
    """∂l★/∂α at x★ = (x, x_next), including the dependence of Ξ★ on α through Λ."""
    terms = ScoreTerms(params, aug.times, aug.history.profile)
    return float(terms.scores(aug.levels(x_next))[0, 0])


def history_information(params: ModelParams, history: UnitHistory) -> np.ndarray:
    """Expected Gaussian information about ζ = (α, γ₁, γ₂) carried by the history alone.

    I_lk = μ_lᵀΣ⁻¹μ_k + ½tr(Σ⁻¹Σ_lΣ⁻¹Σ_k) with μ = μₐΞ and Σ = τₐ²(ΞΞᵀ + κ²Q).
    """
    _require_random_effects(params)
    times = np.asarray(history.times, dtype=float)
    xi = loadings(history.profile, times, params.alpha, params.gamma1, params.gamma2)
    lam = times**params.alpha
    z1, z2 = history.profile.scores(times)
    xi_d = [xi * np.log(times), xi * z1, xi * z2]

    cov = params.tau_a2 * (np.outer(xi, xi) + params.kappa**2 * np.minimum.outer(lam, lam))
    g = lam * np.log(times)
    q_alpha = g[np.minimum.outer(np.arange(times.size), np.arange(times.size))]
    cov_d = [params.tau_a2 * (np.outer(d, xi) + np.outer(xi, d)) for d in xi_d]
    cov_d[0] = cov_d[0] + params.tau_a2 * params.kappa**2 * q_alpha

    factor = cho_factor(cov, lower=True)
    mean_d = [params.mu_a * d for d in xi_d]
    solved_mean = [cho_solve(factor, m) for m in mean_d]
    solved_cov = [cho_solve(factor, c) for c in cov_d]
    info = np.empty((3, 3))
    for l in range(3):
        for k in range(3):
            info[l, k] = mean_d[l] @ solved_mean[k] + 0.5 * np.trace(
                solved_cov[l] @ solved_cov[k]
            )
    return 0.5 * (info + info.T)


def information_logdet(info: np.ndarray) -> Tuple[float, float]:
    """Returns (sign, ln|det|) of an information matrix."""
    sign, logdet = np.linalg.slogdet(info)
    return float(sign), float(logdet)
