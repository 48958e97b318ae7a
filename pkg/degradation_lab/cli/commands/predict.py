# predict.py
#
# Implement a command for predicting unit reliability

import numpy as np

from degradation_lab.cli.base import LabCommand, float_list, metadata_path
from degradation_lab.handlers.plotdata import emit_plotdata
from degradation_lab.model.reliability import reliability
from degradation_lab.schemas import ModelDocument, PredictionMode, ReliabilityConfig
from degradation_lab.store import config_hash


class PredictCommand(LabCommand):
    """
    Predict reliability curves by Monte Carlo simulation

    predict
        {--m|model=fit.json : Model document}
        {--x|xi= : Failure threshold (overrides the document)}
        {--r|horizons= : Horizons as start:stop:step or a comma list (overrides the document)}
        {--d|data= : Observation CSV, required for last-state prediction}
        {--mode=origin : Path start (origin or last-state)}
        {--p|paths= : Paths per unit (overrides the document)}
        {--s|seed=0 : Random seed}
        {--o|output=reliability.csv : Output CSV}
    """

    def run(self):
        document = self.store.read_document(self.option("model"), ModelDocument)
        update = {}
        if self.option("xi"):
            update["threshold_xi"] = self.float_option("xi")
        if self.option("horizons"):
            update["horizons"] = float_list(self.option("horizons"))
        if self.option("paths"):
            update["n_paths"] = self.int_option("paths")
        if document.reliability is None:
            config = ReliabilityConfig(**update)
        else:
            config = ReliabilityConfig(**{**document.reliability.dict(), **update})

        mode = PredictionMode(self.option("mode"))
        data = None
        if mode == PredictionMode.LAST_STATE:
            if not self.option("data"):
                raise ValueError("last-state prediction needs --data")
            data = self.store.read_observations(
                self.option("data"), n_units=max(document.profile_map())
            )

        seed = self.int_option("seed")
        units = sorted(document.profile_map())
        streams = np.random.SeedSequence(seed).generate_state(len(units))
        curves = np.array(
            [
                reliability(
                    document.params,
                    document.profile_map()[u],
                    u,
                    data.last_state(u) if data is not None else None,
                    config.copy(update={"seed": int(s)}),
                )
                for u, s in zip(units, streams)
            ]
        )

        output = self.option("output")
        self.store.write_reliability(output, units, config.horizons, curves)
        emit_plotdata(
            {"fitted": curves},
            self.store,
            metadata_path(output, "plotdata.csv"),
            horizons=config.horizons,
            digest=config_hash(document),
        )
        self.store.write_metadata(metadata_path(output), document, seed, mode=mode.value)
        self.line(f"<info>Predicted {len(units)} reliability curves to {output}</info>")
