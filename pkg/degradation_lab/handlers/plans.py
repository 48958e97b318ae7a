"""
Sampling plans of the competing methods: epoch schedules, unit-selection rules and the
parameters each method pins during estimation.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from degradation_lab.schemas import Method, ScenarioConfig

Window = Tuple[float, float]


def initial_epochs(end: float = 5.0, step: float = 0.5) -> List[float]:
    """Epochs of the initial phase: every ``step`` years up to ``end``."""
    n = int(round(end / step))
    return [round(step * k, 10) for k in range(1, n + 1)]


def engineering_windows() -> List[Window]:
    """Six semi-annual windows over (5, 8] and eight quarterly windows over (8, 10]."""
    bounds = [5.0 + 0.5 * k for k in range(7)] + [8.0 + 0.25 * k for k in range(1, 9)]
    return [(round(a, 10), round(b, 10)) for a, b in zip(bounds, bounds[1:])]


def annual_windows(start: float = 5.0, end: float = 10.0) -> List[Window]:
    n = int(round(end - start))
    return [(start + k, start + k + 1) for k in range(n)]


def right_endpoints(windows: List[Window]) -> List[float]:
    return [b for _, b in windows]


def uniform_epochs(count: int, start: float = 5.0, end: float = 10.0) -> List[float]:
    """``count`` equally spaced epochs over (start, end], ending at ``end``."""
    if count < 1:
        return []
    return [round(start + (end - start) * k / count, 10) for k in range(1, count + 1)]


@dataclass(frozen=True)
class EngineeringPlan:
    initial: List[float]
    windows: List[Window]


def engineering_plan(config: Optional[ScenarioConfig] = None) -> EngineeringPlan:
    """The fixed schedule: semi-annual epochs up to year 5, then the engineering windows."""
    if config is None:
        return EngineeringPlan(initial=initial_epochs(), windows=engineering_windows())
    windows = engineering_windows() if config.windows == "engineering" else annual_windows(
        config.initial_end, config.design_life
    )
    return EngineeringPlan(
        initial=initial_epochs(config.initial_end, config.initial_step), windows=windows
    )


@dataclass(frozen=True)
class MethodPlan:
    """How one method schedules and selects its observations.

    ``all_units`` applies to the later phase; ``initial_design`` subsets the initial phase.
    ``time_rule`` is ``adaptive`` (criterion-driven times), ``right-endpoint`` (end of each
    window), ``uniform`` (equal spacing over the later phase) or ``fixed`` (every planned epoch).
    """

    method: Method
    initial: List[float]
    windows: Optional[List[Window]]
    time_rule: str
    all_units: bool
    initial_design: bool
    pinned: Dict[str, float] = field(default_factory=dict)

    @property
    def windowed(self) -> bool:
        return self.windows is not None


def method_plan(config: ScenarioConfig, method: Method) -> MethodPlan:
    """Builds the plan of ``method`` under the scenario flags."""
    plan = engineering_plan(config)
    pinned: Dict[str, float] = {}
    if config.s4 == 1:
        pinned["alpha"] = config.true_params.alpha

    if method == Method.M2:
        pinned["rho"] = 0.0
        return MethodPlan(
            method=method,
            initial=plan.initial,
            windows=engineering_windows(),
            time_rule="fixed",
            all_units=True,
            initial_design=config.s2 == 1 and config.m2_initial == "design",
            pinned=pinned,
        )

    windows = plan.windows if config.s3 == 1 else None
    if method == Method.M0:
        rule = "adaptive"
    elif config.s3 == 1 or config.m1_rule == "annual":
        rule = "right-endpoint"
        windows = windows or annual_windows(config.initial_end, config.design_life)
    else:
        rule = "uniform"
    return MethodPlan(
        method=method,
        initial=plan.initial,
        windows=windows,
        time_rule=rule,
        all_units=False,
        initial_design=config.s2 == 1,
        pinned=pinned,
    )


def cycled_units(matrix: np.ndarray, epoch: int) -> List[int]:
    """1-based units selected in column ``epoch`` of a design, cycling past the last column."""
    column = matrix[:, epoch % matrix.shape[1]]
    return [int(j) + 1 for j in np.flatnonzero(column)]
