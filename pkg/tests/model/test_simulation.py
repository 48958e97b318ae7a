# test_simulation
#
# test unconditional and conditional simulation against the analytic Gaussian laws

import numpy as np
import pytest

from degradation_lab.errors import ConditioningError
from degradation_lab.model.core import assemble_covariance, mean_path
from degradation_lab.model.simulation import conditional_law, conditional_sample, simulate_paths
from degradation_lab.schemas import Observation, ObservationSet
from tests.conftest import INITIAL_EPOCHS, make_observations, make_params, make_profiles


def within_mc_error(samples: np.ndarray, mean: np.ndarray, cov: np.ndarray, sigmas: float = 4.0):
    """Checks empirical moments against analytic ones; the margin covers every entry at once."""
    n = samples.shape[0]
    mean_se = np.sqrt(np.diag(cov) / n)
    variances = np.diag(cov)
    cov_se = np.sqrt((np.outer(variances, variances) + cov**2) / n)
    empirical = np.cov(samples, rowvar=False)
    return (
        np.all(np.abs(samples.mean(axis=0) - mean) <= sigmas * mean_se + 1e-12)
        and np.all(np.abs(empirical - cov) <= sigmas * cov_se + 1e-12)
    )


class TestSimulatePaths:
    def test_shape_and_determinism(self, params):
        profiles = make_profiles(2)
        a = simulate_paths(params, profiles, [1.0, 2.0, 3.0], 4, seed=9)
        b = simulate_paths(params, profiles, [1.0, 2.0, 3.0], 4, seed=9)
        assert a.shape == (4, 2, 3)
        assert np.array_equal(a, b)

    def test_noise_off_gives_mean_path(self):
        params = make_params(tau_a2=0.0, sigma_fixed=0.0)
        profiles = make_profiles(2)
        grid = np.array([0.5, 1.0, 4.0])
        paths = simulate_paths(params, profiles, grid, 3, seed=1)
        for k, u in enumerate(sorted(profiles)):
            assert np.allclose(paths[:, k], mean_path(params, profiles[u], grid))

    def test_grid_must_increase(self, params):
        with pytest.raises(ValueError):
            simulate_paths(params, make_profiles(1), [2.0, 1.0], 1, seed=0)

    @pytest.mark.slow
    def test_two_unit_covariance_matches_assembly(self, params):
        # GIVEN two adjacent units observed twice each
        profiles = make_profiles(2)
        grid = np.array([2.0, 6.0])

        # WHEN I draw 200 000 systems
        paths = simulate_paths(params, profiles, grid, 200_000, seed=2)

        # THEN the empirical moments match the assembled covariance within 3 MC standard errors
        samples = paths.reshape(200_000, -1)
        mean = np.concatenate([mean_path(params, profiles[u], grid) for u in (1, 2)])
        cov = assemble_covariance(params, profiles, {1: grid, 2: grid})
        assert within_mc_error(samples, mean, cov)

    @pytest.mark.slow
    def test_independent_units_are_uncorrelated(self):
        params = make_params(rho=0.0)
        paths = simulate_paths(params, make_profiles(2), [5.0], 100_000, seed=4)
        correlation = np.corrcoef(paths[:, 0, 0], paths[:, 1, 0])[0, 1]
        assert abs(correlation) < 3 / np.sqrt(100_000)


class TestConditionalLaw:
    def test_empty_history_gives_marginal_law(self, params):
        profiles = make_profiles(2)
        history = ObservationSet(n_units=2)
        mean, cov = conditional_law(params, profiles, history, [(1, 2.0), (2, 2.0)])
        grid = np.array([2.0])
        assert np.allclose(mean, [mean_path(params, profiles[u], grid)[0] for u in (1, 2)])
        assert np.allclose(cov, assemble_covariance(params, profiles, {1: grid, 2: grid}))

    def test_matches_dense_gaussian_conditioning(self, params, profiles, observations):
        # GIVEN ten semi-annual observations of three units and a later target
        targets = [(2, 6.0), (3, 5.5)]

        # WHEN I compute the conditional law
        mean, cov = conditional_law(params, profiles, observations, targets)

        # THEN it equals conditioning by dense inversion of the joint covariance
        times = {u: observations.times_for(u) for u in profiles}
        psi = assemble_covariance(params, profiles, times)
        coords = observations.coordinates()
        joint_times = {u: np.append(times[u], [t for v, t in targets if v == u]) for u in profiles}
        joint = assemble_covariance(params, profiles, joint_times)
        index = []
        offset = 0
        for u in sorted(profiles):
            index.append([offset + k for k in range(len(times[u]))])
            offset += len(joint_times[u])
        h = [i for block in index for i in block]
        t = [i for i in range(joint.shape[0]) if i not in h]
        gain = joint[np.ix_(t, h)] @ np.linalg.inv(psi)
        prior = np.array([mean_path(params, profiles[u], np.array([s]))[0] for u, s in targets])
        history_mean = np.concatenate(
            [mean_path(params, profiles[u], times[u]) for u in sorted(profiles)]
        )
        expected_mean = prior + gain @ (observations.stacked_levels() - history_mean)
        expected_cov = joint[np.ix_(t, t)] - gain @ joint[np.ix_(h, t)]
        assert len(coords) == psi.shape[0]
        assert np.allclose(mean, expected_mean, rtol=1e-8)
        assert np.allclose(cov, expected_cov, rtol=1e-6, atol=1e-10)

    def test_duplicate_target_is_rejected(self, params, profiles, observations):
        with pytest.raises(ConditioningError):
            conditional_law(params, profiles, observations, [(1, 6.0), (1, 6.0)])

    def test_target_inside_history_is_rejected(self, params, profiles, observations):
        with pytest.raises(ConditioningError):
            conditional_law(params, profiles, observations, [(1, 5.0)])

    def test_empty_targets_are_rejected(self, params, profiles, observations):
        with pytest.raises(ConditioningError):
            conditional_law(params, profiles, observations, [])

    def test_unknown_unit_is_rejected(self, params, profiles, observations):
        with pytest.raises(ConditioningError):
            conditional_law(params, profiles, observations, [(4, 6.0)])

    @pytest.mark.slow
    def test_samples_match_conditional_law(self, params):
        profiles = make_profiles(1)
        history = make_observations(params, profiles, INITIAL_EPOCHS, seed=3)
        targets = [(1, 6.0), (1, 7.5)]
        mean, cov = conditional_law(params, profiles, history, targets)
        draws = conditional_sample(params, profiles, history, targets, 100_000, seed=5)
        assert within_mc_error(draws, mean, cov)

    def test_sampling_is_reproducible(self, params, profiles, observations):
        a = conditional_sample(params, profiles, observations, [(1, 6.0)], 5, seed=3)
        b = conditional_sample(params, profiles, observations, [(1, 6.0)], 5, seed=3)
        assert a.shape == (5, 1)
        assert np.array_equal(a, b)

    def test_extended_history_accepts_later_targets(self, params, profiles, observations):
        draw = conditional_sample(params, profiles, observations, [(1, 6.0)], 1, seed=0)[0, 0]
        extended = observations.extend([Observation(unit=1, time=6.0, level=draw)])
        mean, cov = conditional_law(params, profiles, extended, [(1, 6.5)])
        assert cov[0, 0] > 0

    def test_conditioning_never_inflates_variance(self, params, profiles, observations):
        # GIVEN later targets of all three units
        targets = [(1, 6.0), (2, 7.0), (3, 5.5), (2, 9.0)]

        # WHEN I condition on the semi-annual history
        _, conditional = conditional_law(params, profiles, observations, targets)
        _, marginal = conditional_law(params, profiles, ObservationSet(n_units=3), targets)

        # THEN no target variance exceeds its marginal variance
        assert np.all(np.diag(conditional) <= np.diag(marginal) + 1e-12)
        assert np.all(np.diag(conditional) > 0)


def hand_moments(params, profiles, grid):
    """Mean and covariance of five units on ``grid`` written out entry by entry."""
    units = sorted(profiles)
    coords = [(u, t) for u in units for t in grid]
    link = {}
    for u, t in coords:
        s1, s2 = profiles[u].covariates(t)
        z = params.gamma1 * 1000.0 / (float(s1) + 273.15) + params.gamma2 * np.log(float(s2))
        link[u, t] = np.exp(z) * t**params.alpha
    mean = np.array([params.mu_a * link[c] for c in coords])
    cov = np.zeros((len(coords), len(coords)))
    for a, (u, s) in enumerate(coords):
        for b, (v, t) in enumerate(coords):
            weight = {0: 1.0, 1: params.rho}.get(abs(u - v), 0.0)
            cov[a, b] = params.tau_a2 * weight * link[u, s] * link[v, t]
            if u == v:
                cov[a, b] += params.sigma**2 * min(s, t) ** params.alpha
    return mean, cov


class TestFiveUnitMoments:
    GRID = np.round(np.linspace(0.5, 10.5, 21), 10)

    def test_assembly_matches_hand_computation(self, params):
        profiles = make_profiles(5)
        mean, cov = hand_moments(params, profiles, self.GRID)
        assembled = assemble_covariance(params, profiles, {u: self.GRID for u in profiles})
        paths_mean = np.concatenate([mean_path(params, profiles[u], self.GRID) for u in profiles])
        assert np.allclose(assembled, cov, rtol=1e-12, atol=1e-14)
        assert np.allclose(paths_mean, mean, rtol=1e-12)

    @pytest.mark.slow
    def test_simulated_moments_match_hand_computation(self, params):
        # GIVEN five units on a 21-point grid
        profiles = make_profiles(5)
        mean, cov = hand_moments(params, profiles, self.GRID)

        # WHEN I draw 100 000 systems
        paths = simulate_paths(params, profiles, self.GRID, 100_000, seed=21)

        # THEN the empirical moments agree with the hand computation
        samples = paths.reshape(100_000, -1)
        assert within_mc_error(samples, mean, cov, sigmas=5.0)
