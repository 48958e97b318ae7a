# design_units.py
#
# Implement a command for choosing which units to observe at each epoch

from degradation_lab.cli.base import LabCommand, metadata_path
from degradation_lab.design.spatial import optimize_design
from degradation_lab.schemas import SearchAlgorithm, SearchConfig

ALGORITHMS = {"ta": SearchAlgorithm.THRESHOLD_ACCEPTING, "swap": SearchAlgorithm.RANDOM_SWAP}


class DesignUnitsCommand(LabCommand):
    """
    Find a space-filling observation matrix

    design-units
        {--u|units=5 : Number of units L}
        {--e|epochs=10 : Number of epochs o}
        {--b|budget=3 : Units observed per epoch c}
        {--a|algo=ta : Search algorithm (ta or swap)}
        {--i|iters=20000 : Search iterations}
        {--s|seed=0 : Random seed}
        {--o|output=design.csv : Output CSV of the L x o matrix}
    """

    def run(self):
        algo = self.option("algo")
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r}; use ta or swap")
        config = SearchConfig(
            algorithm=ALGORITHMS[algo],
            iterations=self.int_option("iters"),
            seed=self.int_option("seed"),
        )
        result = optimize_design(
            self.int_option("epochs"), self.int_option("units"), self.int_option("budget"), config
        )
        output = self.option("output")
        self.store.write_matrix(output, result.matrix.W)
        self.store.write_metadata(
            metadata_path(output),
            config,
            config.seed,
            wd2=result.wd2,
            accepted=result.accepted,
            best_trace=result.best_trace,
        )
        self.line(f"{result.wd2:.12f}")
