# test_core
#
# test the model primitives and the covariance assembly

import math

import numpy as np
import pytest

from degradation_lab.errors import CovarianceError
from degradation_lab.model.core import (
    assemble_covariance,
    calibrate_threshold,
    covariate_link,
    drift_covariance,
    marginal_moments,
    mean_path,
    scaled_blocks,
    scaled_covariance,
    time_transform,
)
from degradation_lab.schemas import CovariateProfile, Segment
from tests.conftest import constant_profile, make_params, make_profiles


class TestPrimitives:
    def test_time_transform(self):
        assert time_transform(4.0, 0.5) == pytest.approx(2.0)
        assert time_transform(7.0, 1.0) == pytest.approx(7.0)
        assert time_transform(2.0, 1.2) == pytest.approx(2.29740, abs=1e-5)

    def test_time_transform_rejects_bad_input(self):
        with pytest.raises(ValueError):
            time_transform(1.0, 0.0)
        with pytest.raises(ValueError):
            time_transform(-1.0, 1.0)

    def test_covariate_link(self):
        # GIVEN a profile at 25 °C and S2 = e
        profile = constant_profile(temperature=25.0, stress=math.e)

        # THEN the link is exp(0.1·1000/298.15 + 0.2)
        assert covariate_link(profile, 3.0, 0.1, 0.2) == pytest.approx(1.70813, abs=1e-5)
        assert covariate_link(profile, 3.0, 0.0, 0.0) == pytest.approx(1.0)
        assert covariate_link(constant_profile(stress=1.0), 3.0, 0.0, 0.7) == pytest.approx(1.0)

    def test_piecewise_profile_switches_at_segment_start(self):
        profile = CovariateProfile(
            unit=1, segments=[Segment(start=0.0, S1=20.0, S2=1.0), Segment(start=2.0, S1=45.0, S2=2.0)]
        )
        s1, s2 = profile.covariates(np.array([1.999, 2.0, 9.0]))
        assert list(s1) == [20.0, 45.0, 45.0]
        assert list(s2) == [1.0, 2.0, 2.0]

    def test_marginal_moments(self):
        profile = constant_profile(stress=1.0)
        no_link = dict(gamma1=0.0, gamma2=0.0)
        assert marginal_moments(make_params(**no_link), profile, 0.0) == (0.0, 0.0)

        # GIVEN τₐ² = 0.01, κ = 10 (σ² = 1), α = 1 at t = 2
        mean, variance = marginal_moments(
            make_params(alpha=1.0, tau_a2=0.01, kappa=10.0, **no_link), profile, 2.0
        )
        assert mean == pytest.approx(2.0)
        assert variance == pytest.approx(2.04)

    def test_fixed_effects_variance(self):
        params = make_params(tau_a2=0.0, sigma_fixed=math.sqrt(2.0), alpha=1.0, gamma1=0.0, gamma2=0.0)
        _, variance = marginal_moments(params, constant_profile(), 3.0)
        assert variance == pytest.approx(6.0)

    def test_drift_covariance(self):
        assert drift_covariance(0.01, 0.5, 3, 3) == pytest.approx(0.01)
        assert drift_covariance(0.01, 0.5, 3, 4) == pytest.approx(0.005)
        assert drift_covariance(0.01, 0.5, 1, 5) == 0.0
        # two units apart is uncorrelated, not τₐ²ρ²
        assert drift_covariance(0.01, 0.9, 2, 4) == 0.0
        assert drift_covariance(0.01, 0.9, 4, 3) == pytest.approx(0.009)

    def test_threshold_calibration_is_mean_path(self, params):
        profile = make_profiles(1)[1]
        assert calibrate_threshold(params, profile, 11.0) == pytest.approx(
            mean_path(params, profile, np.array([11.0]))[0]
        )


class TestCovarianceAssembly:
    def test_single_coordinate_is_marginal_variance(self, params):
        profiles = make_profiles(1)
        psi = assemble_covariance(params, profiles, {1: np.array([3.0])})
        assert psi[0, 0] == pytest.approx(marginal_moments(params, profiles[1], 3.0)[1])

    def test_distant_units_are_uncorrelated(self, params):
        profiles = make_profiles(3)
        times = {1: np.array([1.0, 2.0]), 3: np.array([1.5, 4.0])}
        psi = assemble_covariance(params, profiles, times)
        assert np.all(psi[:2, 2:] == 0.0)

    def test_covariance_is_symmetric(self, params):
        profiles = make_profiles(4)
        times = {u: np.array([0.5, 1.0 + u, 6.0]) for u in profiles}
        psi = assemble_covariance(params, profiles, times)
        assert np.array_equal(psi, psi.T)

    def test_neighbour_block_is_rank_one(self, params):
        profiles = make_profiles(2)
        times = {1: np.array([1.0, 2.0]), 2: np.array([1.0, 3.0])}
        psi = assemble_covariance(params, profiles, times)
        assert np.linalg.matrix_rank(psi[:2, 2:]) == 1

    def test_scaled_covariance_times_tau_is_psi(self, params):
        profiles = make_profiles(3)
        times = {u: np.array([1.0, 2.5, 4.0]) for u in profiles}
        scaled, xi = scaled_covariance(params.structural, profiles, times)
        assert np.allclose(params.tau_a2 * scaled, assemble_covariance(params, profiles, times))
        assert xi.shape == (9,)

    def test_blocks_reassemble_scaled_covariance(self, params):
        profiles = make_profiles(3)
        times = {1: np.array([1.0, 2.0]), 2: np.array([1.5]), 3: np.array([0.5, 3.0, 4.5])}
        scaled, _ = scaled_covariance(params.structural, profiles, times)
        diagonal, off, _ = scaled_blocks(params.structural, profiles, times)
        assert np.allclose(scaled[:2, :2], diagonal[0])
        assert np.allclose(scaled[:2, 2:3], off[0])
        assert np.allclose(scaled[2:3, 3:], off[1])

    def test_perfect_correlation_and_no_noise_is_rejected(self):
        params = make_params(tau_a2=0.0, sigma_fixed=0.0)
        with pytest.raises(CovarianceError):
            assemble_covariance(params, make_profiles(1), {1: np.array([1.0, 2.0])})

    def test_times_must_increase(self, params):
        with pytest.raises(ValueError):
            assemble_covariance(params, make_profiles(1), {1: np.array([2.0, 1.0])})
