"""
The real-case study: twelve units with parameters taken from a fitted in-orbit dataset, annual
later-phase windows and the three competing methods.
"""

from typing import Any, Dict, Optional

from loguru import logger

from degradation_lab import cfg
from degradation_lab.handlers.scenario_handler import ScenarioHandler
from degradation_lab.schemas import ErrorTable, Method, ModelParams, ScenarioConfig
from degradation_lab.schemas.configs import horizon_grid
from degradation_lab.store import FlatFileStore


def real_case_params() -> ModelParams:
    settings = cfg.real_case
    return ModelParams(
        mu_a=settings.mu_a,
        tau_a2=settings.tau_a**2,
        kappa=settings.kappa,
        alpha=settings.alpha,
        gamma1=settings.gamma1,
        gamma2=settings.gamma2,
        rho=settings.rho,
    )


def real_case_config(overrides: Optional[Dict[str, Any]] = None) -> ScenarioConfig:
    """The real-case scenario; ``overrides`` replace any field (replications, seed, workers, …)."""
    settings = cfg.real_case
    values: Dict[str, Any] = {
        "s1": 1,
        "s2": 1,
        "s3": 1,
        "s4": 0,
        "methods": [Method.M0, Method.M1, Method.M2],
        "units": settings.units,
        "c_initial": settings.c_initial,
        "c_later": settings.c_later,
        "replications": settings.replications,
        "true_params": real_case_params(),
        "horizons": horizon_grid(
            settings.horizon_start, settings.horizon_stop, settings.horizon_step
        ),
        "windows": "annual",
        "m1_rule": "annual",
        "m2_initial": settings.m2_initial,
    }
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ScenarioConfig(**values)


def real_case(
    overrides: Optional[Dict[str, Any]] = None, store: Optional[FlatFileStore] = None
) -> ErrorTable:
    """Runs the real-case study and returns its error table."""
    config = real_case_config(overrides)
    logger.info(
        f"real case: {config.units} units, budgets {config.c_initial}/{config.c_later}, "
        f"{config.replications} replications"
    )
    return ScenarioHandler(config, store).run()
