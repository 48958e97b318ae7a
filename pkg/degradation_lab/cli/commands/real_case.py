# real_case.py
#
# Implement a command for the twelve-unit real-case study

from degradation_lab.cli.base import LabCommand
from degradation_lab.cli.commands.experiment import show_table, write_table
from degradation_lab.handlers.real_case import real_case_config
from degradation_lab.handlers.scenario_handler import ScenarioHandler
from degradation_lab.store import FlatFileStore


class RealCaseCommand(LabCommand):
    """
    Run the real-case study with methods M0, M1 and M2

    real-case
        {--r|reps= : Number of replications}
        {--s|seed= : Master seed}
        {--w|workers= : Worker processes}
        {--o|output=real_case : Output directory}
    """

    def run(self):
        overrides = {
            "replications": self.option("reps") and self.int_option("reps"),
            "master_seed": self.option("seed") and self.int_option("seed"),
            "workers": self.option("workers") and self.int_option("workers"),
        }
        config = real_case_config(overrides)
        store = FlatFileStore(self.option("output"))
        table = ScenarioHandler(config, store).run()
        write_table(store, config, table)
        show_table(self, table)
