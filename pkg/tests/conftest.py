# tests/conftest.py
#
# provides general test fixtures and utilities
import pathlib
from typing import Dict

import numpy as np
import pytest

from degradation_lab.model.simulation import simulate_paths
from degradation_lab.schemas import (
    CovariateProfile,
    FitConfig,
    ModelParams,
    Observation,
    ObservationSet,
    ScenarioConfig,
    SearchConfig,
    Segment,
    orbit_profile,
)
from degradation_lab.store import FlatFileStore

TEST_FOLDER = pathlib.Path(__file__).parent.absolute()
CONFIG_FOLDER = TEST_FOLDER.parent / "configs"

INITIAL_EPOCHS = np.round(np.arange(1, 11) * 0.5, 10)


def make_params(**kwargs) -> ModelParams:
    """Parameters of the convex simulation study, with optional overrides."""
    values = dict(alpha=1.2, mu_a=1.0, tau_a2=0.01, kappa=1.0, gamma1=0.1, gamma2=0.2, rho=0.5)
    values.update(kwargs)
    return ModelParams(**values)


def make_profiles(units: int) -> Dict[int, CovariateProfile]:
    return {u: orbit_profile(u) for u in range(1, units + 1)}


def constant_profile(unit: int = 1, temperature: float = 25.0, stress: float = 1.0):
    return CovariateProfile(unit=unit, segments=[Segment(start=0.0, S1=temperature, S2=stress)])


def make_observations(params, profiles, times, seed=0) -> ObservationSet:
    """One simulated system observed at ``times`` for every unit."""
    units = sorted(profiles)
    paths = simulate_paths(params, profiles, np.asarray(times), 1, seed, units=units)
    records = [
        Observation(unit=u, time=float(t), level=float(x))
        for k, u in enumerate(units)
        for t, x in zip(times, paths[0, k])
    ]
    return ObservationSet(n_units=max(units), records=records)


@pytest.fixture()
def params() -> ModelParams:
    return make_params()


@pytest.fixture()
def profiles() -> Dict[int, CovariateProfile]:
    return make_profiles(3)


@pytest.fixture()
def observations(params, profiles) -> ObservationSet:
    return make_observations(params, profiles, INITIAL_EPOCHS, seed=11)


@pytest.fixture()
def quick_fit() -> FitConfig:
    return FitConfig(n_starts=3, max_evals=400, restarts=0, seed=1)


@pytest.fixture()
def store(tmp_path) -> FlatFileStore:
    return FlatFileStore(tmp_path)


@pytest.fixture()
def small_scenario() -> ScenarioConfig:
    """A scenario small enough to replicate in a few seconds."""
    return ScenarioConfig(
        s1=1,
        s2=0,
        s3=1,
        s4=1,
        units=3,
        c_initial=2,
        c_later=2,
        replications=2,
        master_seed=5,
        n_paths=100,
        truth_multiplier=10,
        dt=0.125,
        horizons=[10.25, 10.5, 11.0],
        fit=FitConfig(n_starts=2, max_evals=150, restarts=0),
        refit_starts=0,
        search=SearchConfig(iterations=200, audit_every=50),
    )
