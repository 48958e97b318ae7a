"""
Define the schemas returned by estimation, design and the scenario harness.
"""

from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, root_validator

from degradation_lab.schemas.params import ModelParams


# = ESTIMATION =========================================================================================================


class StartTrace(BaseModel):
    """One optimizer start: where it began and the profile log-likelihood it reached."""

    start: Dict[str, float]
    optimum: Dict[str, float]
    value: float
    converged: bool
    n_evals: int


class FitResult(BaseModel):
    theta_hat: ModelParams
    profile_loglik_at_max: float
    trace: List[StartTrace]
    converged: bool
    degenerate: bool = False


# = SPATIAL DESIGN =====================================================================================================


class ObservationMatrix(BaseModel):
    """The L×o binary matrix W; every column sums to the per-epoch budget c."""

    W: List[List[int]]
    budget: int

    @root_validator(skip_on_failure=True)
    def validate_columns(cls, values):
        w = np.asarray(values["W"])
        if w.ndim != 2 or not np.isin(w, (0, 1)).all():
            raise ValueError("W must be a binary matrix")
        if not (w.sum(axis=0) == values["budget"]).all():
            raise ValueError(f"every column of W must sum to {values['budget']}")
        return values

    @classmethod
    def from_array(cls, selected: np.ndarray, budget: int) -> "ObservationMatrix":
        return cls(W=selected.astype(int).tolist(), budget=budget)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.W, dtype=bool)

    @property
    def n_units(self) -> int:
        return len(self.W)

    @property
    def n_epochs(self) -> int:
        return len(self.W[0])

    def units_at(self, epoch: int) -> List[int]:
        """Returns the 1-based units observed at 0-based ``epoch``."""
        return [j + 1 for j in np.flatnonzero(self.array[:, epoch])]


class DesignResult(BaseModel):
    matrix: ObservationMatrix
    wd2: float
    algorithm: str
    iterations: int
    seed: int
    accepted: int = 0
    best_trace: List[float] = []


# = HARNESS ============================================================================================================


class ReplicationResult(BaseModel):
    method: str
    rep_index: int
    theta_hat: Optional[ModelParams] = None
    observation_count: int = 0
    epochs: List[float] = []
    reliability: List[List[float]] = []
    failure: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.failure is not None


class ErrorRow(BaseModel):
    method: str
    horizon: float
    mean_relative_error: Optional[float]
    mean_reliability: float
    true_reliability: float


class ErrorTable(BaseModel):
    """Mean relative error (%) of predicted reliability per method and horizon."""

    rows: List[ErrorRow]
    replications: int
    failed: Dict[str, int] = {}
    observations: Dict[str, float] = {}
    metadata: Dict[str, Any] = {}

    def methods(self) -> List[str]:
        return sorted({r.method for r in self.rows})

    def row(self, method: str, horizon: float) -> ErrorRow:
        for r in self.rows:
            if r.method == method and abs(r.horizon - horizon) < 1e-9:
                return r
        raise KeyError(f"no row for {method} at {horizon}")
