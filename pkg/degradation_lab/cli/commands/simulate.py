# simulate.py
#
# Implement a command for simulating degradation paths of a correlated system

import numpy as np

from degradation_lab.cli.base import LabCommand, float_list, metadata_path
from degradation_lab.model.simulation import simulate_paths
from degradation_lab.schemas import ModelDocument, Observation, ObservationSet


class SimulateCommand(LabCommand):
    """
    Simulate degradation paths of every unit in a model document

    simulate
        {--m|model=model.json : Model document (params and profiles)}
        {--t|times=0.5:10:0.5 : Time grid as start:stop:step or a comma list}
        {--p|paths=1 : Number of simulated systems}
        {--s|seed=0 : Random seed}
        {--o|output=simulated.csv : Output CSV}
    """

    def run(self):
        document = self.store.read_document(self.option("model"), ModelDocument)
        grid = np.asarray(float_list(self.option("times")))
        n_paths = self.int_option("paths")
        seed = self.int_option("seed")
        units = sorted(document.profile_map())

        paths = simulate_paths(
            document.params, document.profile_map(), grid, n_paths, seed, units=units
        )
        output = self.option("output")
        if n_paths == 1:
            # a single system is written as an observation set that `fit` can read
            records = [
                Observation(unit=u, time=t, level=x)
                for k, u in enumerate(units)
                for t, x in zip(grid, paths[0, k])
            ]
            self.store.write_observations(
                output, ObservationSet(n_units=max(units), records=records)
            )
        else:
            self.store.write_paths(output, paths, units, grid)
        self.store.write_metadata(
            metadata_path(output), document, seed, n_paths=n_paths, times=grid.tolist()
        )
        self.line(f"<info>Simulated {n_paths} path(s) of {len(units)} units to {output}</info>")
