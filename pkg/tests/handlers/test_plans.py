# test_plans
#
# test the sampling plans of the competing methods

import numpy as np

from degradation_lab.handlers.plans import (
    annual_windows,
    cycled_units,
    engineering_plan,
    engineering_windows,
    initial_epochs,
    method_plan,
    right_endpoints,
    uniform_epochs,
)
from degradation_lab.schemas import Method, ScenarioConfig


class TestSchedules:
    def test_initial_epochs_are_semi_annual(self):
        epochs = initial_epochs()
        assert len(epochs) == 10
        assert epochs[0] == 0.5
        assert epochs[-1] == 5.0

    def test_engineering_windows(self):
        windows = engineering_windows()
        assert len(windows) == 14
        assert windows[0] == (5.0, 5.5)
        assert windows[5] == (7.5, 8.0)
        assert windows[6] == (8.0, 8.25)
        assert right_endpoints(windows)[-1] == 10.0
        assert all(b > a for a, b in windows)

    def test_annual_windows(self):
        assert annual_windows() == [(5.0, 6.0), (6.0, 7.0), (7.0, 8.0), (8.0, 9.0), (9.0, 10.0)]

    def test_uniform_epochs(self):
        assert uniform_epochs(4) == [6.25, 7.5, 8.75, 10.0]
        assert uniform_epochs(0) == []

    def test_default_plan(self):
        plan = engineering_plan()
        assert len(plan.initial) == 10
        assert len(plan.windows) == 14


class TestMethodPlan:
    def test_m0_is_adaptive_in_windows(self):
        plan = method_plan(ScenarioConfig(units=3, c_initial=2, c_later=2), Method.M0)
        assert plan.time_rule == "adaptive"
        assert plan.windowed
        assert not plan.all_units
        assert plan.pinned == {}

    def test_m1_uses_right_endpoints_with_windows(self):
        plan = method_plan(ScenarioConfig(units=3, c_initial=2, c_later=2), Method.M1)
        assert plan.time_rule == "right-endpoint"
        assert right_endpoints(plan.windows) == right_endpoints(engineering_windows())

    def test_m1_without_windows(self):
        config = ScenarioConfig(s3=0, units=3, c_initial=2, c_later=2)
        assert method_plan(config, Method.M1).time_rule == "uniform"
        assert method_plan(config, Method.M0).windows is None

        annual = config.copy(update={"m1_rule": "annual"})
        plan = method_plan(annual, Method.M1)
        assert plan.time_rule == "right-endpoint"
        assert len(plan.windows) == 5

    def test_m2_observes_everything_without_correlation(self):
        config = ScenarioConfig(s3=0, s4=1, units=3, c_initial=2, c_later=2)
        plan = method_plan(config, Method.M2)
        assert plan.all_units
        assert plan.time_rule == "fixed"
        assert len(plan.windows) == 14
        assert plan.pinned == {"alpha": config.true_params.alpha, "rho": 0.0}

    def test_m2_initial_budget(self):
        # GIVEN an initial-phase unit budget that binds M2 too
        config = ScenarioConfig(s2=1, units=3, c_initial=2, c_later=2)
        limited = config.copy(update={"m2_initial": "design"})

        # THEN only that scenario subsets the initial phase of M2
        assert not method_plan(config, Method.M2).initial_design
        assert method_plan(limited, Method.M2).initial_design
        assert not method_plan(limited.copy(update={"s2": 0}), Method.M2).initial_design
        assert method_plan(limited, Method.M2).all_units

    def test_initial_design_follows_s2(self):
        assert method_plan(ScenarioConfig(s2=1, units=3, c_initial=2, c_later=2), Method.M0).initial_design
        assert not method_plan(ScenarioConfig(s2=0, units=3, c_initial=2, c_later=2), Method.M1).initial_design


class TestCycledUnits:
    def test_columns_cycle(self):
        matrix = np.array([[1, 0], [0, 1], [1, 1]], dtype=bool)
        assert cycled_units(matrix, 0) == [1, 3]
        assert cycled_units(matrix, 1) == [2, 3]
        assert cycled_units(matrix, 2) == [1, 3]
