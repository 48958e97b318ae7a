from .params import ModelParams, StructuralParams
from .profile import CovariateProfile, Segment, orbit_profile
from .observations import Observation, ObservationSet, UnitHistory
from .configs import (
    CriterionConfig,
    FitConfig,
    Method,
    ModelDocument,
    ProfileDocument,
    PredictionMode,
    ReliabilityConfig,
    ScenarioConfig,
    SearchAlgorithm,
    SearchConfig,
)
from .results import (
    DesignResult,
    ErrorRow,
    ErrorTable,
    FitResult,
    ObservationMatrix,
    ReplicationResult,
    StartTrace,
)
