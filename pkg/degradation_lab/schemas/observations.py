"""
Define the schemas for degradation observations: the system dataset and a single unit's history.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from degradation_lab.schemas.profile import CovariateProfile


class Observation(BaseModel):
    """One degradation measurement x_{i,j} = X_i(t_{i,j})."""

    unit: int = Field(..., ge=1)
    time: float = Field(..., gt=0)
    level: float

    class Config:
        allow_mutation = False


class ObservationSet(BaseModel):
    """The dataset D of L units; records are kept sorted by (unit, time)."""

    n_units: int = Field(..., ge=1)
    records: List[Observation] = []

    class Config:
        allow_mutation = False

    @validator("records")
    def sort_records(cls, v):
        return sorted(v, key=lambda r: (r.unit, r.time))

    @root_validator(skip_on_failure=True)
    def validate_records(cls, values):
        records = values["records"]
        for r in records:
            if r.unit > values["n_units"]:
                raise ValueError(f"unit {r.unit} outside 1..{values['n_units']}")
        for a, b in zip(records, records[1:]):
            if a.unit == b.unit and b.time <= a.time:
                raise ValueError(
                    f"unit {a.unit} times must be strictly increasing (repeated {b.time})"
                )
        return values

    @property
    def size(self) -> int:
        """Total number of measurements M."""
        return len(self.records)

    def units(self) -> List[int]:
        """Units with at least one measurement, ascending."""
        return sorted({r.unit for r in self.records})

    def times_for(self, unit: int) -> np.ndarray:
        return np.array([r.time for r in self.records if r.unit == unit])

    def levels_for(self, unit: int) -> np.ndarray:
        return np.array([r.level for r in self.records if r.unit == unit])

    def grids(self) -> Dict[int, np.ndarray]:
        """Per-unit time grids t_i, keyed by unit."""
        return {u: self.times_for(u) for u in self.units()}

    def stacked_levels(self) -> np.ndarray:
        """The system vector y = (x_1ᵀ, …, x_Lᵀ)ᵀ."""
        return np.array([r.level for r in self.records])

    def coordinates(self) -> List[Tuple[int, float]]:
        return [(r.unit, r.time) for r in self.records]

    def last_state(self, unit: int) -> Optional[Tuple[float, float]]:
        """Returns the last (time, level) of ``unit`` or None."""
        rows = [r for r in self.records if r.unit == unit]
        if not rows:
            return None
        return rows[-1].time, rows[-1].level

    def extend(self, records: List[Observation]) -> "ObservationSet":
        return ObservationSet(n_units=self.n_units, records=self.records + list(records))

    def history(self, unit: int, profile: CovariateProfile) -> "UnitHistory":
        return UnitHistory(
            unit=unit,
            times=list(self.times_for(unit)),
            levels=list(self.levels_for(unit)),
            profile=profile,
        )


class UnitHistory(BaseModel):
    """The measurements of one unit, used by sequential time selection."""

    unit: int = Field(..., ge=1)
    times: List[float]
    levels: List[float]
    profile: CovariateProfile

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def validate_history(cls, values):
        times, levels = values["times"], values["levels"]
        if len(times) == 0:
            raise ValueError("a unit history needs at least one measurement")
        if len(times) != len(levels):
            raise ValueError("times and levels must have equal length")
        if times[0] <= 0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("history times must be positive and strictly increasing")
        return values

    @property
    def last_time(self) -> float:
        return self.times[-1]
