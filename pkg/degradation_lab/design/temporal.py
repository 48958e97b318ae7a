"""
Sequential choice of the next observation time.

Candidates are ranked by Γ(t) = ω₁·|ln det I(t) / N₀| + ω₂·E(t)/C, where I(t) is the expected
Fisher information about (α, γ₁, γ₂) after augmenting the history with X(t), N₀ = |ln det| of the
information of the history alone, E(t) = 1/Λ′(t) for α̂ ≥ 1 and Λ′(t) for α̂ < 1, and C the
largest E over the candidate set.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from degradation_lab.design.scores import (
    AugmentedVector,
    ScoreTerms,
    history_information,
    information_logdet,
)
from degradation_lab.errors import DesignError
from degradation_lab.schemas import CriterionConfig, ModelParams, UnitHistory

MIN_NORMALISER = 1e-12


def _hermite_information(terms: ScoreTerms, aug: AugmentedVector, nodes: int) -> np.ndarray:
    x, w = np.polynomial.hermite.hermgauss(nodes)
    values = aug.predictive_mean + math.sqrt(2.0 * aug.predictive_variance) * x
    scores = terms.scores(aug.levels(values))
    return (scores * w[:, None]).T @ scores / math.sqrt(math.pi)


def _monte_carlo_information(
    terms: ScoreTerms, aug: AugmentedVector, draws: int, seed: int
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    values = aug.predictive_mean + math.sqrt(aug.predictive_variance) * rng.standard_normal(draws)
    scores = terms.scores(aug.levels(values))
    return scores.T @ scores / draws


def fim(
    theta_hat: ModelParams,
    history: UnitHistory,
    t_next: float,
    config: Optional[CriterionConfig] = None,
) -> np.ndarray:
    """E[s sᵀ] of the scores s = ∂l★/∂(α, γ₁, γ₂) over the predictive law of X(t_next)."""
    config = config or CriterionConfig()
    aug = AugmentedVector.build(theta_hat, history, t_next)
    terms = ScoreTerms(theta_hat, aug.times, history.profile)
    info = _hermite_information(terms, aug, config.quadrature_nodes)
    if config.audit:
        refined = _hermite_information(terms, aug, 2 * config.quadrature_nodes)
        scale = max(float(np.max(np.abs(refined))), MIN_NORMALISER)
        gap = float(np.max(np.abs(info - refined))) / scale
        if gap > config.audit_tolerance:
            logger.warning(
                f"quadrature audit at t={t_next}: relative gap {gap:.2e}; using Monte Carlo"
            )
            info = _monte_carlo_information(terms, aug, config.mc_draws, config.seed)
    return 0.5 * (info + info.T)


def information_normaliser(theta_hat: ModelParams, history: UnitHistory) -> float:
    """N₀ = |ln det| of the expected information of the history alone (1 if it vanishes)."""
    sign, logdet = information_logdet(history_information(theta_hat, history))
    if sign <= 0 or abs(logdet) < MIN_NORMALISER:
        logger.warning(f"unit {history.unit}: history information is degenerate; N0 set to 1")
        return 1.0
    return abs(logdet)


def exploration(t: np.ndarray, alpha: float) -> np.ndarray:
    """1/Λ′(t) when α ≥ 1, Λ′(t) when α < 1, with Λ′(t) = αt^{α−1}."""
    rate = alpha * np.power(np.asarray(t, dtype=float), alpha - 1.0)
    return 1.0 / rate if alpha >= 1.0 else rate


def criterion_trace(
    theta_hat: ModelParams,
    history: UnitHistory,
    candidates: Sequence[float],
    config: Optional[CriterionConfig] = None,
    normaliser: Optional[float] = None,
    scale: Optional[float] = None,
) -> np.ndarray:
    """Γ at every candidate time. ``normaliser`` and ``scale`` override N₀ and C."""
    config = config or CriterionConfig()
    candidates = np.asarray(candidates, dtype=float)
    if candidates.size == 0:
        raise DesignError("the candidate set is empty")
    if np.any(candidates <= history.last_time):
        raise DesignError(f"candidates must follow the last observation {history.last_time}")

    information = np.zeros(candidates.size)
    if config.omega1 > 0 and theta_hat.fixed_effects:
        logger.warning("fixed-effects estimate: the information term is dropped")
    elif config.omega1 > 0:
        n0 = normaliser if normaliser is not None else information_normaliser(theta_hat, history)
        for k, t in enumerate(candidates):
            sign, logdet = information_logdet(fim(theta_hat, history, t, config))
            if sign <= 0:
                logger.warning(f"unit {history.unit}: det I <= 0 at t={t}; information term 0")
                continue
            information[k] = abs(logdet / n0)

    raw = exploration(candidates, theta_hat.alpha)
    c = scale if scale is not None else float(np.max(raw))
    return config.omega1 * information + config.omega2 * raw / c


def criterion(
    theta_hat: ModelParams,
    history: UnitHistory,
    t_next: float,
    config: Optional[CriterionConfig] = None,
) -> float:
    """Γ(t_next), normalised over the configured candidate set that contains it."""
    config = config or CriterionConfig()
    candidates = config.candidates(history.last_time)
    match = np.flatnonzero(np.isclose(candidates, t_next, rtol=0.0, atol=1e-9))
    if match.size == 0:
        raise DesignError(f"{t_next} is not in the candidate set")
    return float(criterion_trace(theta_hat, history, candidates, config)[match[0]])


def next_time(
    theta_hat: ModelParams, history: UnitHistory, config: Optional[CriterionConfig] = None
) -> Tuple[float, np.ndarray]:
    """Returns the maximiser of Γ (earliest on ties) and the (t, Γ) trace."""
    config = config or CriterionConfig()
    candidates = config.candidates(history.last_time)
    if candidates.size == 0:
        raise DesignError(f"no candidate time after {history.last_time}")
    gamma = criterion_trace(theta_hat, history, candidates, config)
    best = int(np.argmax(gamma))
    logger.debug(f"unit {history.unit}: next time {candidates[best]} (Γ={gamma[best]:.4f})")
    return float(candidates[best]), np.column_stack([candidates, gamma])


def next_epoch_time(
    theta_hat: ModelParams,
    histories: Sequence[UnitHistory],
    config: Optional[CriterionConfig] = None,
    after: Optional[float] = None,
) -> Tuple[float, np.ndarray]:
    """One time shared by several units: the maximiser of their mean Γ over common candidates.

    ``after`` keeps the chosen time later than the previous epoch of the whole system.
    """
    config = config or CriterionConfig()
    if not histories:
        raise DesignError("an epoch needs at least one unit")
    last = max(h.last_time for h in histories)
    candidates = config.candidates(last if after is None else max(last, after))
    if candidates.size == 0:
        raise DesignError("no candidate time after the latest observation")
    gamma = np.mean(
        [criterion_trace(theta_hat, h, candidates, config) for h in histories], axis=0
    )
    best = int(np.argmax(gamma))
    return float(candidates[best]), np.column_stack([candidates, gamma])
