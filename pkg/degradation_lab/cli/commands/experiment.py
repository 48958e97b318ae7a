# experiment.py
#
# Implement a command for running a simulation study under one scenario

from typing import Dict

from degradation_lab.cli.base import LabCommand, render_rows
from degradation_lab.handlers.plotdata import emit_plotdata
from degradation_lab.handlers.scenario_handler import ScenarioHandler
from degradation_lab.schemas import ErrorTable, Method, ScenarioConfig
from degradation_lab.store import FlatFileStore


class ExperimentCommand(LabCommand):
    """
    Run a simulation study comparing the sampling methods

    experiment
        {--scenario=1,0,1,0 : Scenario flags s1,s2,s3,s4}
        {--m|method=m0,m1 : Comma list of methods (m0, m1, m2)}
        {--r|reps= : Number of replications}
        {--s|seed= : Master seed}
        {--c|config= : Optional scenario config JSON}
        {--w|workers= : Worker processes}
        {--o|output=experiment : Output directory}
    """

    def run(self):
        values: Dict = {}
        if self.option("config"):
            values = self.store.read_document(self.option("config"), ScenarioConfig).dict(
                exclude_unset=True
            )
        flags = [int(v) for v in self.list_option("scenario")]
        if len(flags) != 4:
            raise ValueError("--scenario needs four comma-separated flags")
        values.update(dict(zip(("s1", "s2", "s3", "s4"), flags)))
        values["methods"] = [Method(m.upper()) for m in self.list_option("method")]
        for option, field in (("reps", "replications"), ("seed", "master_seed"), ("workers", "workers")):
            if self.option(option):
                values[field] = self.int_option(option)
        config = ScenarioConfig(**values)

        store = FlatFileStore(self.option("output"))
        table = ScenarioHandler(config, store).run()
        write_table(store, config, table)
        show_table(self, table)


def write_table(store: FlatFileStore, config: ScenarioConfig, table: ErrorTable):
    store.write_error_table("errors.csv", table)
    emit_plotdata(table, store, "plotdata.csv")
    store.write_document("table.json", table)
    store.write_metadata(
        "metadata.json",
        config,
        config.master_seed,
        failed=table.failed,
        observations=table.observations,
    )


def show_table(command: LabCommand, table: ErrorTable):
    methods = table.methods()
    horizons = sorted({r.horizon for r in table.rows})
    rows = []
    for h in horizons:
        row = [f"{h:g}"]
        for m in methods:
            error = table.row(m, h).mean_relative_error
            row.append("-" if error is None else f"{error:.4f}")
        rows.append(row)
    render_rows(command, ["Horizon"] + [f"{m} error %" for m in methods], rows)
    for m in methods:
        command.line(f"<info>{m}: {table.observations.get(m, 0):.1f} observations on average</info>")
