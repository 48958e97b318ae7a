# cli.py - Command Line Interface

from cleo import Application as BaseApplication

from degradation_lab import __version__
from degradation_lab.cli.commands import (
    DesignTimeCommand,
    DesignUnitsCommand,
    ExperimentCommand,
    FitCommand,
    PredictCommand,
    RealCaseCommand,
    SimulateCommand,
)


class Application(BaseApplication):
    """The degradation_lab command tree."""

    def __init__(self):
        super(Application, self).__init__("degradation_lab", __version__)
        commands = [
            SimulateCommand(),
            FitCommand(),
            DesignUnitsCommand(),
            DesignTimeCommand(),
            PredictCommand(),
            ExperimentCommand(),
            RealCaseCommand(),
        ]
        for command in commands:
            self.add(command)


cli_app = Application()


def cli():
    cli_app.run()


if __name__ == "__main__":
    cli()
