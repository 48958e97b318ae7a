# test_fit
#
# test the multi-start profile-likelihood fit

import math

import numpy as np
import pytest

from degradation_lab.errors import FitError
from degradation_lab.estimation import fit, profile_loglik
from degradation_lab.estimation.fit import PENALTY, ProfileObjective, feasible_starts, sobol_starts
from degradation_lab.handlers import ScenarioHandler
from degradation_lab.handlers.scenario_handler import Replication
from degradation_lab.schemas import FitConfig, Method, ObservationSet, ScenarioConfig, SearchConfig
from tests.conftest import make_observations, make_params, make_profiles

FULL_EPOCHS = np.round(np.concatenate([np.arange(1, 11) * 0.5, [5.5, 6.0, 6.5, 7.0, 7.5, 8.0],
                                       8.0 + np.arange(1, 9) * 0.25]), 10)


class TestSobolStarts:
    def test_prefix_is_stable(self):
        box = np.array([[0.0, 1.0], [-2.0, 2.0]])
        assert np.array_equal(sobol_starts(box, 3, seed=4), sobol_starts(box, 5, seed=4)[:3])

    def test_points_lie_in_box(self):
        box = np.array([[0.0, 1.0], [-2.0, 2.0]])
        points = sobol_starts(box, 16, seed=1)
        assert np.all(points >= box[:, 0]) and np.all(points <= box[:, 1])


class TestObjective:
    def test_internal_and_natural_are_inverse(self, observations, profiles):
        objective = ProfileObjective(observations, profiles, FitConfig())
        theta1 = {"alpha": 1.3, "kappa": 0.7, "gamma1": 0.05, "gamma2": -0.1, "rho": 0.4}
        natural = objective.natural(objective.internal(theta1))
        assert natural == pytest.approx(theta1)

    def test_objective_is_negated_profile(self, params, observations, profiles):
        objective = ProfileObjective(observations, profiles, FitConfig())
        z = objective.internal(params.structural.dict())
        assert objective(z) == pytest.approx(
            -profile_loglik(params.structural, observations, profiles)
        )

    def test_failed_evaluation_is_a_finite_penalty(self, observations, profiles, mocker):
        # GIVEN an objective whose likelihood cannot be evaluated anywhere
        objective = ProfileObjective(observations, profiles, FitConfig())
        mocker.patch.object(objective, "loglik", return_value=-math.inf)
        inside = objective.box.mean(axis=1)
        outside = inside.copy()
        outside[0] = objective.box[0, 1] + 2.0

        # THEN the minimiser sees a finite penalty growing with the distance from the box
        assert objective(inside) == PENALTY
        assert objective(outside) == pytest.approx(PENALTY + 2.0)
        assert math.isfinite(objective(outside))

    def test_exact_interpolation_is_finite(self, observations, profiles, mocker):
        objective = ProfileObjective(observations, profiles, FitConfig())
        mocker.patch.object(objective, "loglik", return_value=math.inf)
        assert objective(objective.box.mean(axis=1)) == -PENALTY

    def test_truth_beats_a_wrong_exponent(self, params):
        # GIVEN five fully observed units and the truth with α shifted by 0.5
        profiles = make_profiles(5)
        shifted = params.structural.copy(update={"alpha": params.alpha + 0.5})
        gaps = []
        for seed in range(10):
            data = make_observations(params, profiles, FULL_EPOCHS, seed=500 + seed)

            # WHEN I evaluate the profile likelihood at both
            gaps.append(
                profile_loglik(params.structural, data, profiles)
                - profile_loglik(shifted, data, profiles)
            )

        # THEN the truth is preferred
        assert np.mean(gaps) > 0
        assert sum(g > 0 for g in gaps) >= 8


class TestFeasibleStarts:
    def test_unevaluable_points_are_replaced(self, observations, profiles, quick_fit, mocker):
        # GIVEN a likelihood that fails on the first three Sobol points
        original = ProfileObjective.loglik
        calls = {"n": 0}

        def flaky(self, z):
            calls["n"] += 1
            return -math.inf if calls["n"] <= 3 else original(self, z)

        mocker.patch.object(ProfileObjective, "loglik", autospec=True, side_effect=flaky)
        objective = ProfileObjective(observations, profiles, quick_fit)

        # WHEN I collect the starts
        starts = feasible_starts(objective, quick_fit)

        # THEN the next Sobol points stand in for the failed ones
        drawn = sobol_starts(objective.box, quick_fit.n_starts * quick_fit.start_draws, quick_fit.seed)
        assert len(starts) == quick_fit.n_starts
        assert np.allclose(starts, drawn[3 : 3 + quick_fit.n_starts])

    def test_nothing_evaluable_raises(self, observations, profiles, quick_fit, mocker):
        mocker.patch.object(ProfileObjective, "loglik", return_value=-math.inf)
        objective = ProfileObjective(observations, profiles, quick_fit)
        with pytest.raises(FitError):
            feasible_starts(objective, quick_fit)

    def test_all_pinned_uses_a_single_point(self, observations, profiles):
        config = FitConfig(
            fixed={"alpha": 1.2, "kappa": 1.0, "gamma1": 0.1, "gamma2": 0.2, "rho": 0.5}
        )
        objective = ProfileObjective(observations, profiles, config)
        assert [z.shape for z in feasible_starts(objective, config)] == [(0,)]


class TestFit:
    def test_fit_improves_on_truth_profile(self, params, observations, profiles, quick_fit):
        # GIVEN data simulated from known parameters
        # WHEN I fit from the truth and from Sobol starts
        result = fit(observations, profiles, quick_fit, initial=params.structural)

        # THEN the maximum is at least the profile at the truth, and θ̂ is complete
        truth = profile_loglik(params.structural, observations, profiles)
        assert result.profile_loglik_at_max >= truth - 1e-6
        assert len(result.trace) == quick_fit.n_starts + 1
        assert result.theta_hat.tau_a2 > 0

    def test_pinned_parameters_are_exact(self, observations, profiles, quick_fit):
        config = quick_fit.copy(update={"fixed": {"alpha": 1.2, "rho": 0.0}})
        result = fit(observations, profiles, config)
        assert result.theta_hat.alpha == 1.2
        assert result.theta_hat.rho == 0.0

    def test_warm_start_is_tried_first(self, params, observations, profiles, quick_fit):
        result = fit(observations, profiles, quick_fit, initial=params.structural)
        assert len(result.trace) == quick_fit.n_starts + 1
        assert result.trace[0].start["alpha"] == pytest.approx(params.alpha)

    def test_fit_is_deterministic(self, observations, profiles, quick_fit):
        a = fit(observations, profiles, quick_fit)
        b = fit(observations, profiles, quick_fit)
        assert a.theta_hat == b.theta_hat

    def test_blockwise_objective_agrees_at_optimum(self, observations, profiles, quick_fit):
        dense = fit(observations, profiles, quick_fit.copy(update={"n_starts": 1}))
        blockwise = profile_loglik(
            dense.theta_hat.structural, observations, profiles, method="blockwise"
        )
        assert blockwise == pytest.approx(dense.profile_loglik_at_max, rel=1e-9)

    def test_every_start_failing_raises(self, observations, profiles, quick_fit, mocker):
        mocker.patch.object(ProfileObjective, "loglik", return_value=-math.inf)
        with pytest.raises(FitError):
            fit(observations, profiles, quick_fit)

    def test_empty_data_raises(self, profiles, quick_fit):
        with pytest.raises(FitError):
            fit(ObservationSet(n_units=3), profiles, quick_fit)

    def test_more_starts_never_lower_the_maximum(self, observations, profiles, quick_fit):
        # GIVEN nested Sobol start sets
        values = [
            fit(observations, profiles, quick_fit.copy(update={"n_starts": n})).profile_loglik_at_max
            for n in (1, 2, 4, 8)
        ]

        # THEN the best profile likelihood is non-decreasing in the number of starts
        for smaller, larger in zip(values, values[1:]):
            assert larger >= smaller - 1e-9

    def test_sparse_initial_subset_fits(self):
        # GIVEN the initial-phase data of a scenario whose units are chosen by the spatial design
        config = ScenarioConfig(
            s1=1,
            s2=1,
            s3=0,
            s4=0,
            fit=FitConfig(n_starts=2, max_evals=150),
            search=SearchConfig(iterations=200, audit_every=50),
        )
        handler = ScenarioHandler(config)
        rep = Replication(handler, 0)
        plan = handler.plans[Method.M0]
        data = rep.initial_observations(plan)
        assert data.size == config.c_initial * 10

        # WHEN I fit it with only two starts
        result = fit(data, handler.profiles, handler.fit_config(plan, rep.fit_seeds[0]))

        # THEN both starts end at a finite likelihood
        assert len(result.trace) == 2
        assert all(math.isfinite(t.value) for t in result.trace)
        assert math.isfinite(result.profile_loglik_at_max)

    @pytest.mark.slow
    def test_parameter_recovery(self):
        # GIVEN 200 systems of five units fully observed at 24 epochs
        params = make_params()
        profiles = make_profiles(5)
        config = FitConfig(n_starts=4, seed=0)
        mu, rho = [], []
        for seed in range(200):
            data = make_observations(params, profiles, FULL_EPOCHS, seed=100 + seed)
            theta = fit(data, profiles, config).theta_hat
            mu.append(theta.mu_a)
            rho.append(theta.rho)

        # THEN the mean estimates recover the drift mean and the spatial correlation
        assert np.mean(mu) == pytest.approx(1.0, rel=0.05)
        assert abs(np.mean(rho) - 0.5) < 0.15
