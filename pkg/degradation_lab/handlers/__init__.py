from .plans import MethodPlan, engineering_plan, method_plan
from .scenario_handler import ScenarioHandler, run_replication, run_scenario
from .real_case import real_case, real_case_config
from .plotdata import emit_plotdata
