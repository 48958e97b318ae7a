"""
Define the configuration schemas. Every field defaults to the package configuration in
``degradation_lab/config.yaml``.
"""

import math
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from degradation_lab import cfg
from degradation_lab.schemas.params import STRUCTURAL_NAMES, ModelParams
from degradation_lab.schemas.profile import CovariateProfile, orbit_profile


def _strictly_increasing(values: List[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


def horizon_grid(start: float, stop: float, step: float) -> List[float]:
    """Returns the prediction horizons start, start+step, …, stop."""
    n = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(n + 1)]


# = RELIABILITY ========================================================================================================


class ReliabilityConfig(BaseModel):
    threshold_xi: float
    horizons: List[float]
    n_paths: int = Field(default_factory=lambda: cfg.reliability.n_paths, ge=1)
    dt: float = Field(default_factory=lambda: cfg.reliability.dt)
    seed: int = 0

    @validator("threshold_xi")
    def validate_xi(cls, v):
        if not v > 0 or not math.isfinite(v):
            raise ValueError("threshold_xi must be positive and finite")
        return v

    @validator("horizons")
    def validate_horizons(cls, v):
        if not v:
            raise ValueError("at least one horizon is required")
        if not _strictly_increasing(v):
            raise ValueError("horizons must be strictly increasing")
        return v

    @validator("dt")
    def validate_dt(cls, v):
        if not v > 0:
            raise ValueError("dt must be positive")
        return v


# = ESTIMATION =========================================================================================================


class FitConfig(BaseModel):
    bounds: Dict[str, Tuple[float, float]] = Field(
        default_factory=lambda: {k: tuple(v) for k, v in cfg.fit.bounds.items()}
    )
    n_starts: int = Field(default_factory=lambda: cfg.fit.n_starts, ge=1)
    tolerance: float = Field(default_factory=lambda: cfg.fit.tolerance, gt=0)
    max_evals: int = Field(default_factory=lambda: cfg.fit.max_evals, ge=1)
    restarts: int = Field(default_factory=lambda: cfg.fit.restarts, ge=0)
    start_draws: int = Field(default_factory=lambda: cfg.fit.start_draws, ge=1)
    fixed: Dict[str, float] = {}
    seed: int = 0

    @validator("bounds")
    def validate_bounds(cls, v):
        missing = set(STRUCTURAL_NAMES) - set(v)
        if missing:
            raise ValueError(f"missing bounds for {sorted(missing)}")
        for name, (low, high) in v.items():
            if not (math.isfinite(low) and math.isfinite(high) and low < high):
                raise ValueError(f"bounds for {name} must be finite and ordered")
        for name in ("alpha", "kappa"):
            if v[name][0] <= 0:
                raise ValueError(f"{name} bounds must be positive")
        if v["rho"][0] <= -1 or v["rho"][1] >= 1:
            raise ValueError("rho bounds must lie inside (-1, 1)")
        return v

    @validator("fixed")
    def validate_fixed(cls, v):
        unknown = set(v) - set(STRUCTURAL_NAMES)
        if unknown:
            raise ValueError(f"cannot pin unknown parameters {sorted(unknown)}")
        return v

    @property
    def free(self) -> List[str]:
        return [name for name in STRUCTURAL_NAMES if name not in self.fixed]


# = SPATIAL DESIGN =====================================================================================================


class SearchAlgorithm(str, Enum):
    THRESHOLD_ACCEPTING = "threshold-accepting"
    RANDOM_SWAP = "random-swap"


class SearchConfig(BaseModel):
    algorithm: SearchAlgorithm = Field(
        default_factory=lambda: SearchAlgorithm(cfg.search.algorithm)
    )
    iterations: int = Field(default_factory=lambda: cfg.search.iterations, ge=1)
    thresholds: Optional[List[float]] = None
    warmup_moves: int = Field(default_factory=lambda: cfg.search.warmup_moves, ge=1)
    threshold_quantile: float = Field(
        default_factory=lambda: cfg.search.threshold_quantile, ge=0, le=1
    )
    final_ratio: float = Field(default_factory=lambda: cfg.search.final_ratio, gt=0, lt=1)
    audit_every: int = Field(default_factory=lambda: cfg.search.audit_every, ge=1)
    seed: int = 0

    @root_validator(skip_on_failure=True)
    def validate_thresholds(cls, values):
        thresholds = values.get("thresholds")
        if thresholds is None:
            return values
        if len(thresholds) != values["iterations"]:
            raise ValueError("one threshold per iteration is required")
        if any(t < 0 for t in thresholds) or any(
            b > a for a, b in zip(thresholds, thresholds[1:])
        ):
            raise ValueError("thresholds must be nonnegative and nonincreasing")
        if thresholds[-1] != 0:
            raise ValueError("the threshold schedule must end at 0")
        return values


# = TEMPORAL DESIGN ====================================================================================================


class CriterionConfig(BaseModel):
    omega1: float = Field(default_factory=lambda: cfg.criterion.omega1, ge=0)
    omega2: float = Field(default_factory=lambda: cfg.criterion.omega2, ge=0)
    window: Optional[Tuple[float, float]] = None
    delta: float = Field(default_factory=lambda: cfg.criterion.delta, gt=0)
    t_max: float = Field(default_factory=lambda: cfg.criterion.t_max, gt=0)
    resolution: float = Field(default_factory=lambda: cfg.criterion.resolution, gt=0)
    quadrature_nodes: int = Field(default_factory=lambda: cfg.criterion.quadrature_nodes, ge=2)
    mc_draws: int = Field(default_factory=lambda: cfg.criterion.mc_draws, ge=1)
    audit: bool = Field(default_factory=lambda: cfg.criterion.audit)
    audit_tolerance: float = Field(default_factory=lambda: cfg.criterion.audit_tolerance, gt=0)
    seed: int = 0

    @root_validator(skip_on_failure=True)
    def validate_weights(cls, values):
        if abs(values["omega1"] + values["omega2"] - 1.0) > 1e-12:
            raise ValueError("omega1 + omega2 must equal 1")
        window = values.get("window")
        if window is not None and not window[0] < window[1]:
            raise ValueError("window must be an ordered (low, high) pair")
        return values

    def candidates(self, t_last: float) -> np.ndarray:
        """Returns the candidate times strictly after ``t_last``.

        Windowed mode discretises (low, high] at ``resolution``; interval mode discretises
        [t_last + delta, t_max].
        """
        if self.window is not None:
            low, high = self.window
            n = int(math.floor((high - low) / self.resolution + 1e-9))
            grid = np.round(low + self.resolution * np.arange(1, n + 1), 10)
        else:
            first = t_last + self.delta
            n = int(math.floor((self.t_max - first) / self.resolution + 1e-9)) + 1
            grid = np.round(first + self.resolution * np.arange(max(n, 0)), 10)
        return grid[grid > t_last]


# = HARNESS ============================================================================================================


class Method(str, Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"


class PredictionMode(str, Enum):
    ORIGIN = "origin"
    LAST_STATE = "last-state"


def default_profiles(units: int) -> List[CovariateProfile]:
    return [
        orbit_profile(
            unit=u,
            years=cfg.profiles.years,
            segments_per_year=cfg.profiles.segments_per_year,
            temperature=(cfg.profiles.temperature_low, cfg.profiles.temperature_high),
            stress=(cfg.profiles.stress_low, cfg.profiles.stress_high),
        )
        for u in range(1, units + 1)
    ]


class ScenarioConfig(BaseModel):
    """A simulation study: scenario flags S1–S4, competing methods and the replication protocol."""

    s1: Literal[0, 1] = 1
    s2: Literal[0, 1] = 0
    s3: Literal[0, 1] = 1
    s4: Literal[0, 1] = 0
    methods: List[Method] = [Method.M0, Method.M1]
    units: int = Field(default_factory=lambda: cfg.harness.units, ge=1)
    c_initial: int = Field(default_factory=lambda: cfg.harness.c_initial, ge=1)
    c_later: int = Field(default_factory=lambda: cfg.harness.c_later, ge=1)
    replications: int = Field(default_factory=lambda: cfg.harness.replications, ge=1)
    master_seed: int = Field(default_factory=lambda: cfg.harness.master_seed)
    true_params: Optional[ModelParams] = None
    profiles: Optional[List[CovariateProfile]] = None
    xi: Optional[float] = None
    xi_calibration_time: float = Field(default_factory=lambda: cfg.reliability.calibration_time)
    horizons: List[float] = Field(
        default_factory=lambda: horizon_grid(
            cfg.harness.horizon_start, cfg.harness.horizon_stop, cfg.harness.horizon_step
        )
    )
    n_paths: int = Field(default_factory=lambda: cfg.reliability.n_paths, ge=1)
    truth_multiplier: int = Field(default_factory=lambda: cfg.reliability.truth_multiplier, ge=10)
    dt: float = Field(default_factory=lambda: cfg.reliability.dt, gt=0)
    initial_end: float = Field(default_factory=lambda: cfg.harness.initial_end, gt=0)
    initial_step: float = Field(default_factory=lambda: cfg.harness.initial_step, gt=0)
    design_life: float = Field(default_factory=lambda: cfg.harness.design_life, gt=0)
    windows: Literal["engineering", "annual"] = "engineering"
    m1_rule: Literal["matched", "annual"] = "matched"
    m2_initial: Literal["all", "design"] = "all"
    later_epochs: int = Field(default_factory=lambda: cfg.harness.later_epochs, ge=1)
    max_later_epochs: int = Field(default_factory=lambda: cfg.harness.max_later_epochs, ge=1)
    prediction_mode: PredictionMode = Field(
        default_factory=lambda: PredictionMode(cfg.harness.prediction_mode)
    )
    max_failure_rate: float = Field(default_factory=lambda: cfg.harness.max_failure_rate)
    min_true_reliability: float = Field(
        default_factory=lambda: cfg.harness.min_true_reliability
    )
    workers: int = Field(default_factory=lambda: cfg.harness.workers, ge=1)
    fit: FitConfig = Field(default_factory=FitConfig)
    refit_starts: int = Field(default_factory=lambda: cfg.fit.refit_starts, ge=0)
    search: SearchConfig = Field(default_factory=SearchConfig)
    criterion: CriterionConfig = Field(default_factory=CriterionConfig)

    @validator("horizons")
    def validate_horizons(cls, v):
        if not v:
            raise ValueError("at least one horizon is required")
        if not _strictly_increasing(v):
            raise ValueError("horizons must be strictly increasing")
        return v

    @root_validator(skip_on_failure=True)
    def fill_defaults(cls, values):
        units = values["units"]
        if values["c_initial"] > units or values["c_later"] > units:
            raise ValueError("per-epoch budgets cannot exceed the unit count")
        if values.get("true_params") is None:
            alpha = (
                cfg.true_params.alpha_convex
                if values["s1"] == 1
                else cfg.true_params.alpha_concave
            )
            values["true_params"] = ModelParams.from_sigma(
                tau_a=cfg.true_params.tau_a,
                sigma=cfg.true_params.kappa * cfg.true_params.tau_a,
                alpha=alpha,
                mu_a=cfg.true_params.mu_a,
                gamma1=cfg.true_params.gamma1,
                gamma2=cfg.true_params.gamma2,
                rho=cfg.true_params.rho,
            )
        if values.get("profiles") is None:
            values["profiles"] = default_profiles(units)
        if sorted(p.unit for p in values["profiles"]) != list(range(1, units + 1)):
            raise ValueError("profiles must cover units 1..L exactly once")
        if values.get("xi") is not None and not values["xi"] > 0:
            raise ValueError("xi must be positive")
        return values

    @property
    def flags(self) -> Tuple[int, int, int, int]:
        return self.s1, self.s2, self.s3, self.s4

    def profile_map(self) -> Dict[int, CovariateProfile]:
        return {p.unit: p for p in self.profiles or []}


class ProfileDocument(BaseModel):
    """A JSON document carrying the covariate profile of every unit."""

    profiles: List[CovariateProfile]

    @validator("profiles")
    def validate_profiles(cls, v):
        units = [p.unit for p in v]
        if len(set(units)) != len(units):
            raise ValueError("each unit may have only one profile")
        return v

    def profile_map(self) -> Dict[int, CovariateProfile]:
        return {p.unit: p for p in self.profiles}


class ModelDocument(ProfileDocument):
    """The JSON model document: ``params``, ``profiles`` and ``reliability``."""

    params: ModelParams
    reliability: Optional[ReliabilityConfig] = None
