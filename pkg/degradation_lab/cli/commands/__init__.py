from .simulate import SimulateCommand
from .fit import FitCommand
from .design_units import DesignUnitsCommand
from .design_time import DesignTimeCommand
from .predict import PredictCommand
from .experiment import ExperimentCommand
from .real_case import RealCaseCommand
