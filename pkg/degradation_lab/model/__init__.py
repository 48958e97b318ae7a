from .core import (
    assemble_covariance,
    calibrate_threshold,
    covariate_link,
    drift_covariance,
    loadings,
    marginal_moments,
    mean_path,
    time_transform,
)
from .simulation import conditional_law, conditional_sample, simulate_paths
from .reliability import reliability
