"""
Multi-start maximisation of the profile log-likelihood over the free structural parameters.

The search runs Nelder-Mead in an unconstrained internal space (log for α and κ, atanh for ρ,
identity for γ) from Sobol starting points covering the bounds box. Pinned parameters never
enter the search.
"""

import math
import warnings
from typing import Dict, List, Mapping, Optional

import numpy as np
from loguru import logger
from scipy.optimize import minimize
from scipy.stats import qmc

from degradation_lab.errors import CovarianceError, EstimationError, FitError, KernelError
from degradation_lab.estimation.profile import Method, scale_terms
from degradation_lab.schemas import (
    CovariateProfile,
    FitConfig,
    FitResult,
    ObservationSet,
    StartTrace,
    StructuralParams,
)
from degradation_lab.schemas.params import RHO_MARGIN, STRUCTURAL_NAMES

# objective reported where the likelihood cannot be evaluated, plus the distance outside the box
PENALTY = 1e10

_FORWARD = {
    "alpha": math.log,
    "kappa": math.log,
    "gamma1": lambda v: v,
    "gamma2": lambda v: v,
    "rho": math.atanh,
}
_INVERSE = {
    "alpha": math.exp,
    "kappa": math.exp,
    "gamma1": lambda v: v,
    "gamma2": lambda v: v,
    "rho": math.tanh,
}


class ProfileObjective:
    """The negated profile log-likelihood as a function of the internal free coordinates."""

    def __init__(
        self,
        data: ObservationSet,
        profiles: Mapping[int, CovariateProfile],
        config: FitConfig,
        method: Method = "dense",
    ):
        self.data = data
        self.profiles = profiles
        self.config = config
        self.method = method
        self.free = config.free
        self.box = np.array(
            [[_FORWARD[n](v) for v in config.bounds[n]] for n in self.free]
        ).reshape(len(self.free), 2)

    def natural(self, z: np.ndarray) -> Dict[str, float]:
        """Maps internal coordinates to a complete, bound-respecting θ₁."""
        values = dict(self.config.fixed)
        for name, coordinate in zip(self.free, z):
            low, high = self.config.bounds[name]
            values[name] = min(max(_INVERSE[name](float(coordinate)), low), high)
        values["rho"] = min(max(values["rho"], -1 + RHO_MARGIN), 1 - RHO_MARGIN)
        return {name: values[name] for name in STRUCTURAL_NAMES}

    def internal(self, theta1: Mapping[str, float]) -> np.ndarray:
        z = np.array([_FORWARD[n](theta1[n]) for n in self.free])
        return np.clip(z, self.box[:, 0], self.box[:, 1])

    def loglik(self, z: np.ndarray) -> float:
        try:
            terms = scale_terms(
                StructuralParams(**self.natural(z)), self.data, self.profiles, self.method
            )
        except (CovarianceError, KernelError, EstimationError):
            return -math.inf
        return terms.profile_loglik

    def outside(self, z: np.ndarray) -> float:
        """Euclidean distance from ``z`` to the bounds box."""
        z = np.asarray(z, dtype=float)
        return float(np.linalg.norm(z - np.clip(z, self.box[:, 0], self.box[:, 1])))

    def __call__(self, z: np.ndarray) -> float:
        value = self.loglik(z)
        if value == math.inf:
            # exact interpolation (τ̂ₐ² = 0): the likelihood is unbounded there
            return -PENALTY
        if math.isfinite(value):
            return -value
        return PENALTY + self.outside(z)


def evaluable(value: float) -> bool:
    """Whether a profile log-likelihood value can seed or end a search."""
    return math.isfinite(value) or value == math.inf


def sobol_starts(box: np.ndarray, n: int, seed: int) -> np.ndarray:
    """The first ``n`` points of a scrambled Sobol sequence scaled to ``box``.

    The sequence depends only on the seed, so a larger ``n`` extends a smaller one.
    """
    if box.shape[0] == 0:
        return np.zeros((1, 0))
    sampler = qmc.Sobol(d=box.shape[0], scramble=True, seed=seed)
    with warnings.catch_warnings():
        # balance properties need powers of two; prefixes are used deliberately
        warnings.simplefilter("ignore", UserWarning)
        unit = sampler.random(n)
    return qmc.scale(unit, box[:, 0], box[:, 1])


def _minimize(objective: ProfileObjective, z0: np.ndarray, config: FitConfig):
    options = {"xatol": config.tolerance, "fatol": config.tolerance, "maxfev": config.max_evals}
    bounds = [tuple(row) for row in objective.box]
    result = minimize(objective, z0, method="Nelder-Mead", bounds=bounds, options=options)
    n_evals = result.nfev
    for _ in range(config.restarts):
        again = minimize(objective, result.x, method="Nelder-Mead", bounds=bounds, options=options)
        n_evals += again.nfev
        improved = again.fun < result.fun - config.tolerance
        if again.fun <= result.fun:
            result = again
        if not improved:
            break
    return result, n_evals


def feasible_starts(
    objective: ProfileObjective, config: FitConfig, initial: Optional[StructuralParams] = None
) -> List[np.ndarray]:
    """The warm start (when evaluable) followed by the first ``n_starts`` evaluable Sobol points.

    Up to ``n_starts * start_draws`` Sobol points are drawn; points whose likelihood cannot be
    evaluated are skipped.
    """
    if objective.box.shape[0] == 0:
        return [np.zeros(0)]
    starts: List[np.ndarray] = []
    if initial is not None:
        z = objective.internal(initial.dict())
        if evaluable(objective.loglik(z)):
            starts.append(z)
        else:
            logger.debug("warm start has no finite profile likelihood; dropped")

    drawn = sobol_starts(objective.box, config.n_starts * config.start_draws, config.seed)
    found, skipped = 0, 0
    for z in drawn:
        if found == config.n_starts:
            break
        if evaluable(objective.loglik(z)):
            starts.append(z)
            found += 1
        else:
            skipped += 1
    if skipped:
        logger.debug(f"skipped {skipped} Sobol points without a finite profile likelihood")
    if found == 0 and not starts:
        raise FitError(
            f"none of {len(drawn)} starting points produced a finite profile likelihood"
        )
    if found < config.n_starts:
        logger.warning(f"only {found} of {config.n_starts} Sobol starts are evaluable")
    return starts


def fit(
    data: ObservationSet,
    profiles: Mapping[int, CovariateProfile],
    config: Optional[FitConfig] = None,
    initial: Optional[StructuralParams] = None,
    method: Method = "dense",
) -> FitResult:
    """Maximises the profile log-likelihood and completes θ̂ with the concentrated (μ̂ₐ, τ̂ₐ²).

    ``initial`` (a previous estimate) is tried before the Sobol starts. Nelder-Mead only starts
    from points with an evaluable likelihood.
    """
    config = config or FitConfig()
    if data.size == 0:
        raise FitError("cannot fit an empty observation set")
    objective = ProfileObjective(data, profiles, config, method)
    starts = feasible_starts(objective, config, initial)

    trace: List[StartTrace] = []
    best = None
    for k, z0 in enumerate(starts):
        if objective.box.shape[0] == 0:
            value, z, converged, n_evals = objective.loglik(z0), z0, True, 1
        else:
            result, n_evals = _minimize(objective, z0, config)
            z, converged = result.x, bool(result.success)
            value = objective.loglik(z)
        trace.append(
            StartTrace(
                start=objective.natural(z0),
                optimum=objective.natural(z),
                value=value,
                converged=converged and not math.isnan(value),
                n_evals=n_evals,
            )
        )
        logger.debug(f"start {k}: profile loglik {value:.6g} after {n_evals} evaluations")
        if not evaluable(value):
            continue
        if best is None or value > best[0]:
            best = (value, z, converged)

    if best is None:
        raise FitError(f"none of {len(starts)} starts produced a finite profile likelihood")

    value, z, converged = best
    theta1 = StructuralParams(**objective.natural(z))
    terms = scale_terms(theta1, data, profiles, method)
    if terms.degenerate:
        logger.warning("profile fit interpolates the data exactly (tau_a2 = 0)")
    theta_hat = theta1.with_scale(terms.mu_hat, terms.tau2_hat)
    logger.info(
        f"fit {data.size} observations: loglik {value:.6g}, "
        + ", ".join(f"{n}={getattr(theta_hat, n):.4g}" for n in ("alpha", "mu_a", "tau_a2", "rho"))
    )
    return FitResult(
        theta_hat=theta_hat,
        profile_loglik_at_max=value,
        trace=trace,
        converged=converged,
        degenerate=terms.degenerate,
    )
