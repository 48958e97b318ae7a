# fit.py
#
# Implement a command for fitting the model to observed degradation data

from typing import List, Tuple

from degradation_lab.cli.base import LabCommand, metadata_path, render_rows
from degradation_lab.estimation import fit
from degradation_lab.schemas import FitConfig, FitResult, ModelDocument, ProfileDocument


class FitCommand(LabCommand):
    """
    Fit the model by profile likelihood

    fit
        {data : Observation CSV with columns unit,time,level}
        {--m|model=model.json : Document holding the unit profiles}
        {--c|config= : Optional fit config JSON}
        {--b|blockwise : Evaluate the likelihood block by block}
        {--s|seed=0 : Seed of the multi-start points}
        {--o|output=fit.json : Fitted model document}
        {--t|trace=fit_trace.csv : Per-start trace CSV}
    """

    def run(self):
        profiles = self.store.read_document(self.option("model"), ProfileDocument)
        data = self.store.read_observations(
            self.argument("data"), n_units=max(profiles.profile_map())
        )
        config = (
            self.store.read_document(self.option("config"), FitConfig)
            if self.option("config")
            else FitConfig()
        )
        config = config.copy(update={"seed": self.int_option("seed")})
        method = "blockwise" if self.option("blockwise") else "dense"

        result = fit(data, profiles.profile_map(), config, method=method)

        output = self.option("output")
        self.store.write_document(
            output, ModelDocument(params=result.theta_hat, profiles=profiles.profiles)
        )
        rows, columns = trace_rows(result)
        self.store.write_trace(self.option("trace"), rows, columns)
        self.store.write_metadata(
            metadata_path(output),
            config,
            config.seed,
            profile_loglik=result.profile_loglik_at_max,
            converged=result.converged,
            degenerate=result.degenerate,
        )
        render_rows(
            self,
            ["Parameter", "Estimate"],
            [[k, f"{v:.6g}"] for k, v in result.theta_hat.dict().items() if v is not None],
        )
        self.line(f"<info>profile log-likelihood {result.profile_loglik_at_max:.6g}</info>")


def trace_rows(result: FitResult) -> Tuple[List[dict], List[str]]:
    """One row per optimizer start: start point, optimum and outcome."""
    rows = []
    for s in result.trace:
        row = {f"start_{k}": v for k, v in s.start.items()}
        row.update(s.optimum)
        row.update(value=s.value, converged=s.converged, n_evals=s.n_evals)
        rows.append(row)
    columns = list(rows[0]) if rows else []
    return rows, columns
