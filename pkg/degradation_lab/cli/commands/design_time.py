# design_time.py
#
# Implement a command for choosing the next observation time

from degradation_lab.cli.base import LabCommand, metadata_path
from degradation_lab.design.temporal import next_epoch_time
from degradation_lab.errors import ScenarioError
from degradation_lab.schemas import CriterionConfig, ModelDocument


class DesignTimeCommand(LabCommand):
    """
    Choose the next observation time of one or more units

    design-time
        {history : Observation CSV with the units' histories}
        {--m|model=fit.json : Fitted model document}
        {--c|criterion= : Optional criterion config JSON}
        {--u|units= : Comma list of units sharing the epoch (default: all in the history)}
        {--o|output=design_time.csv : Output CSV of the (t, criterion) trace}
    """

    def run(self):
        document = self.store.read_document(self.option("model"), ModelDocument)
        profiles = document.profile_map()
        data = self.store.read_observations(self.argument("history"), n_units=max(profiles))
        config = (
            self.store.read_document(self.option("criterion"), CriterionConfig)
            if self.option("criterion")
            else CriterionConfig()
        )
        units = [int(u) for u in self.list_option("units")] if self.option("units") else data.units()
        unknown = sorted(set(units) - set(profiles))
        if unknown:
            raise ScenarioError(f"units {unknown} have no covariate profile in the model document")
        histories = [data.history(u, profiles[u]) for u in units]

        t_next, trace = next_epoch_time(document.params, histories, config)

        output = self.option("output")
        self.store.write_trace(output, trace, columns=["t", "criterion"])
        self.store.write_metadata(
            metadata_path(output), config, config.seed, units=units, t_next=t_next
        )
        self.line(f"{t_next:.10g}")
