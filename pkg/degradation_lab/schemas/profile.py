"""
Define the piecewise-constant covariate schedules of junction temperature S₁(t) and electrical
stress S₂(t).
"""

from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator

KELVIN_OFFSET = 273.15


class Segment(BaseModel):
    """A covariate segment starting at ``start`` years and lasting until the next one."""

    start: float
    S1: float
    S2: float

    class Config:
        allow_mutation = False

    @validator("start")
    def validate_start(cls, v):
        if v < 0:
            raise ValueError("segment start must be nonnegative")
        return v

    @validator("S1")
    def validate_temperature(cls, v):
        if v <= -KELVIN_OFFSET:
            raise ValueError("S1 must be above absolute zero")
        return v

    @validator("S2")
    def validate_stress(cls, v):
        if v <= 0:
            raise ValueError("S2 must be positive (ln S2 must exist)")
        return v


class CovariateProfile(BaseModel):
    """The covariate schedule of one unit; the last segment extends to infinity."""

    unit: int = Field(..., ge=1)
    segments: List[Segment]

    class Config:
        allow_mutation = False

    @validator("segments")
    def validate_segments(cls, v):
        if not v:
            raise ValueError("a profile needs at least one segment")
        if v[0].start != 0:
            raise ValueError("the first segment must start at 0")
        starts = [s.start for s in v]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("segment start times must be strictly increasing")
        return v

    def covariates(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """Returns (S₁(t), S₂(t)) evaluated at the time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("covariates are only defined for t >= 0")
        starts = np.array([s.start for s in self.segments])
        idx = np.searchsorted(starts, t, side="right") - 1
        s1 = np.array([s.S1 for s in self.segments])[idx]
        s2 = np.array([s.S2 for s in self.segments])[idx]
        return s1, s2

    def scores(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """Returns the transformed covariates Z₁ = 1000/(S₁+273.15) and Z₂ = ln S₂."""
        s1, s2 = self.covariates(t)
        if np.any(s2 <= 0):
            raise ValueError("S2 must be positive where the link is evaluated")
        return 1000.0 / (s1 + KELVIN_OFFSET), np.log(s2)


def orbit_profile(
    unit: int,
    years: int = 15,
    segments_per_year: int = 2,
    temperature: Tuple[float, float] = (20.0, 45.0),
    stress: Tuple[float, float] = (1.0, 1.5),
) -> CovariateProfile:
    """Returns an orbit-like schedule.

    S₁ toggles between the two temperatures on every segment; S₂ toggles once per year, so all
    four (S₁, S₂) combinations occur and the two acceleration coefficients stay identifiable.
    """
    step = 1.0 / segments_per_year
    segments = [
        Segment(
            start=round(k * step, 10),
            S1=temperature[k % 2],
            S2=stress[(k // segments_per_year) % 2],
        )
        for k in range(years * segments_per_year)
    ]
    return CovariateProfile(unit=unit, segments=segments)
