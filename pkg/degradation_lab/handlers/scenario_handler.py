"""
The ScenarioHandler runs simulation studies: it generates synthetic degradation data under the
true model, lets each method choose its observations, fits the model and scores the predicted
reliability against the truth.
"""

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from degradation_lab.design.spatial import optimize_design
from degradation_lab.design.temporal import next_epoch_time
from degradation_lab.errors import DesignError, LabError, ScenarioError
from degradation_lab.estimation.fit import fit
from degradation_lab.handlers.plans import (
    MethodPlan,
    cycled_units,
    method_plan,
    right_endpoints,
    uniform_epochs,
)
from degradation_lab.model.core import calibrate_threshold
from degradation_lab.model.reliability import reliability
from degradation_lab.model.simulation import conditional_sample
from degradation_lab.schemas import (
    ErrorRow,
    ErrorTable,
    FitConfig,
    Method,
    ModelParams,
    Observation,
    ObservationSet,
    PredictionMode,
    ReliabilityConfig,
    ReplicationResult,
    ScenarioConfig,
)
from degradation_lab.store import FlatFileStore, config_hash

METHOD_ORDER = (Method.M0, Method.M1, Method.M2)


def relative_errors(predicted: np.ndarray, truth: np.ndarray, floor: float) -> np.ndarray:
    """Mean over units of |R̂ − R|/R per horizon; entries with R below ``floor`` are skipped."""
    predicted, truth = np.asarray(predicted, dtype=float), np.asarray(truth, dtype=float)
    valid = truth >= floor
    ratio = np.where(valid, np.abs(predicted - truth) / np.where(valid, truth, 1.0), np.nan)
    counts = valid.sum(axis=0)
    sums = np.nansum(ratio, axis=0)
    return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


class Replication:
    """One replication's data stream, shared by every method so they see common initial data."""

    def __init__(self, handler: "ScenarioHandler", rep_index: int):
        self.handler = handler
        self.rep_index = rep_index
        config = handler.config
        root = np.random.SeedSequence([config.master_seed, rep_index])
        initial, later, fits, prediction = root.spawn(4)
        self.later_streams = later.spawn(len(METHOD_ORDER))
        self.fit_seeds = [int(s) for s in fits.generate_state(len(METHOD_ORDER))]
        self.prediction_seeds = [int(s) for s in prediction.generate_state(config.units)]

        targets = [(u, t) for u in handler.units for t in handler.initial_epochs]
        draws = conditional_sample(
            handler.true_params,
            handler.profiles,
            ObservationSet(n_units=config.units),
            targets,
            1,
            initial,
        )[0]
        self.latent = ObservationSet(
            n_units=config.units,
            records=[Observation(unit=u, time=t, level=x) for (u, t), x in zip(targets, draws)],
        )

    def initial_observations(self, plan: MethodPlan) -> ObservationSet:
        if not plan.initial_design:
            return self.latent
        design = self.handler.initial_design
        chosen = {
            (u, t)
            for k, t in enumerate(self.handler.initial_epochs)
            for u in cycled_units(design, k)
        }
        records = [r for r in self.latent.records if (r.unit, r.time) in chosen]
        return ObservationSet(n_units=self.latent.n_units, records=records)


class ScenarioHandler:
    """
    A class for running the replications of one scenario and aggregating their errors.
    """

    def __init__(self, config: ScenarioConfig, store: Optional[FlatFileStore] = None):
        self.config = config
        self.store = store
        self.true_params: ModelParams = config.true_params
        self.profiles = config.profile_map()
        self.units = list(range(1, config.units + 1))
        self.plans = {m: method_plan(config, m) for m in METHOD_ORDER}
        self.initial_epochs = self.plans[Method.M0].initial
        self.xi = config.xi if config.xi is not None else self.calibrated_threshold()
        self._initial_design: Optional[np.ndarray] = None
        self._later_design: Optional[np.ndarray] = None

    def calibrated_threshold(self) -> float:
        xi = float(
            np.mean(
                [
                    calibrate_threshold(self.true_params, self.profiles[u], self.config.xi_calibration_time)
                    for u in self.units
                ]
            )
        )
        logger.info(f"threshold calibrated to {xi:.6g} at t={self.config.xi_calibration_time}")
        return xi

    # DESIGNS =========================================================================================================

    def _design(self, epochs: int, budget: int, offset: int) -> np.ndarray:
        search = self.config.search.copy(update={"seed": self.config.master_seed + offset})
        return optimize_design(epochs, self.config.units, budget, search).matrix.array

    @property
    def initial_design(self) -> np.ndarray:
        if self._initial_design is None:
            self._initial_design = self._design(len(self.initial_epochs), self.config.c_initial, 1)
        return self._initial_design

    def prepare_designs(self):
        """Builds both spatial designs before replications fan out to workers."""
        return self.initial_design, self.later_design

    @property
    def later_design(self) -> np.ndarray:
        if self._later_design is None:
            windows = self.plans[Method.M0].windows
            epochs = len(windows) if windows is not None else self.config.later_epochs
            self._later_design = self._design(epochs, self.config.c_later, 2)
        return self._later_design

    # TRUTH ===========================================================================================================

    def truth_digest(self) -> str:
        payload = {
            "true_params": json.loads(self.true_params.json()),
            "profiles": [json.loads(p.json()) for p in self.config.profiles or []],
            "xi": self.xi,
            "horizons": self.config.horizons,
            "n_paths": self.config.n_paths * self.config.truth_multiplier,
            "dt": self.config.dt,
            "seed": self.config.master_seed,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def true_reliability(self) -> np.ndarray:
        """R_true per unit and horizon from the true parameters (cached by the store)."""
        digest = self.truth_digest()
        if self.store is not None:
            cached = self.store.read_truth(digest)
            if cached is not None:
                return cached
        states = np.random.SeedSequence([self.config.master_seed, 0x7275]).generate_state(
            self.config.units
        )
        curves = np.array(
            [
                reliability(
                    self.true_params,
                    self.profiles[u],
                    u,
                    None,
                    ReliabilityConfig(
                        threshold_xi=self.xi,
                        horizons=self.config.horizons,
                        n_paths=self.config.n_paths * self.config.truth_multiplier,
                        dt=self.config.dt,
                        seed=int(states[u - 1]),
                    ),
                )
                for u in self.units
            ]
        )
        if self.store is not None:
            self.store.write_truth(digest, self.units, self.config.horizons, curves)
        return curves

    # REPLICATIONS ====================================================================================================

    def fit_config(self, plan: MethodPlan, seed: int, starts: Optional[int] = None) -> FitConfig:
        update: Dict = {"fixed": {**self.config.fit.fixed, **plan.pinned}, "seed": seed}
        if starts is not None:
            update["n_starts"] = max(starts, 1)
        return self.config.fit.copy(update=update)

    def _observe(self, observed, latent, targets, rng):
        draws = conditional_sample(self.true_params, self.profiles, latent, targets, 1, rng)[0]
        new = [Observation(unit=u, time=t, level=x) for (u, t), x in zip(targets, draws)]
        return observed.extend(new), latent.extend(new)

    def _adaptive_epochs(self, plan: MethodPlan, rep: Replication, observed, latent, rng, seed):
        """Alternates criterion-driven epoch selection, data generation and warm refits."""
        config = self.config
        theta = fit(observed, self.profiles, self.fit_config(plan, seed)).theta_hat
        epochs: List[float] = []
        last = self.initial_epochs[-1]
        limit = (
            len(plan.windows)
            if plan.windowed
            else min(config.later_epochs, config.max_later_epochs)
        )
        for k in range(limit):
            units = cycled_units(self.later_design, k)
            if plan.windowed:
                criterion = config.criterion.copy(update={"window": plan.windows[k]})
            else:
                criterion = config.criterion.copy(update={"window": None})
            histories = [
                observed.history(u, self.profiles[u]) for u in units if observed.last_state(u)
            ]
            candidates = criterion.candidates(last)
            if candidates.size == 0:
                break
            try:
                t, _ = next_epoch_time(theta, histories, criterion, after=last)
            except DesignError:
                t = float(candidates[0])
            observed, latent = self._observe(observed, latent, [(u, t) for u in units], rng)
            epochs.append(t)
            last = t
            theta = fit(
                observed,
                self.profiles,
                self.fit_config(plan, seed + k + 1, config.refit_starts),
                initial=theta.structural,
            ).theta_hat
        else:
            if not plan.windowed:
                logger.debug(f"rep {rep.rep_index}: adaptive phase stopped at {limit} epochs")
        return theta, observed, epochs

    def run_replication(
        self, plan: MethodPlan, rep: Replication, matched_epochs: Optional[int] = None
    ) -> ReplicationResult:
        """Runs one method through the initial and later phases and predicts reliability."""
        index = METHOD_ORDER.index(plan.method)
        rng = np.random.default_rng(rep.later_streams[index])
        seed = rep.fit_seeds[index]
        observed = rep.initial_observations(plan)
        latent = rep.latent
        try:
            if plan.time_rule == "adaptive":
                theta, observed, epochs = self._adaptive_epochs(
                    plan, rep, observed, latent, rng, seed
                )
            else:
                if plan.time_rule == "uniform":
                    epochs = uniform_epochs(
                        matched_epochs or self.config.later_epochs,
                        self.config.initial_end,
                        self.config.design_life,
                    )
                else:
                    epochs = right_endpoints(plan.windows or [])
                for k, t in enumerate(epochs):
                    units = self.units if plan.all_units else cycled_units(self.later_design, k)
                    observed, latent = self._observe(
                        observed, latent, [(u, t) for u in units], rng
                    )
                theta = fit(observed, self.profiles, self.fit_config(plan, seed)).theta_hat
            curves = self.predict(theta, observed, rep)
        except LabError as e:
            logger.warning(f"rep {rep.rep_index} {plan.method.value} failed: {e}")
            return ReplicationResult(
                method=plan.method.value, rep_index=rep.rep_index, failure=f"{type(e).__name__}: {e}"
            )
        logger.debug(
            f"rep {rep.rep_index} {plan.method.value}: {observed.size} observations, "
            f"{len(epochs)} later epochs"
        )
        return ReplicationResult(
            method=plan.method.value,
            rep_index=rep.rep_index,
            theta_hat=theta,
            observation_count=observed.size,
            epochs=list(epochs),
            reliability=curves.tolist(),
        )

    def predict(self, theta: ModelParams, observed: ObservationSet, rep: Replication) -> np.ndarray:
        curves = []
        for u in self.units:
            last_state = None
            if self.config.prediction_mode == PredictionMode.LAST_STATE:
                last_state = observed.last_state(u)
            curves.append(
                reliability(
                    theta,
                    self.profiles[u],
                    u,
                    last_state,
                    ReliabilityConfig(
                        threshold_xi=self.xi,
                        horizons=self.config.horizons,
                        n_paths=self.config.n_paths,
                        dt=self.config.dt,
                        seed=rep.prediction_seeds[u - 1],
                    ),
                )
            )
        return np.array(curves)

    def replicate(self, rep_index: int) -> List[ReplicationResult]:
        """Runs every configured method on one replication, M0 first so M1 can match its count."""
        rep = Replication(self, rep_index)
        wanted = set(self.config.methods)
        needs_m0 = Method.M1 in wanted and self.plans[Method.M1].time_rule == "uniform"
        results: Dict[Method, ReplicationResult] = {}
        for method in METHOD_ORDER:
            if method in wanted or (method == Method.M0 and needs_m0):
                matched = None
                if method == Method.M1 and Method.M0 in results:
                    m0 = results[Method.M0]
                    matched = len(m0.epochs) if not m0.failed else None
                results[method] = self.run_replication(self.plans[method], rep, matched)
        return [results[m] for m in METHOD_ORDER if m in wanted]

    # AGGREGATION =====================================================================================================

    def run(self) -> ErrorTable:
        """Runs every replication and aggregates mean relative errors (%) per method and horizon."""
        config = self.config
        truth = self.true_reliability()
        low = truth < config.min_true_reliability
        if low.any():
            logger.warning(
                f"{int(low.sum())} unit-horizon pairs have R_true < {config.min_true_reliability}"
                " and are excluded from the relative error"
            )

        self.prepare_designs()
        indices = range(config.replications)
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                batches = list(pool.map(partial(replicate_worker, self), indices))
        else:
            batches = [self.replicate(i) for i in indices]
        return self.aggregate(batches, truth)

    def aggregate(self, batches: Sequence[List[ReplicationResult]], truth: np.ndarray) -> ErrorTable:
        config = self.config
        rows: List[ErrorRow] = []
        failed: Dict[str, int] = {}
        observations: Dict[str, float] = {}
        for method in [m for m in METHOD_ORDER if m in config.methods]:
            results = [r for batch in batches for r in batch if r.method == method.value]
            good = [r for r in results if not r.failed]
            failed[method.value] = len(results) - len(good)
            if results and failed[method.value] / len(results) > config.max_failure_rate:
                reasons = "; ".join(sorted({r.failure or "" for r in results if r.failed})[:3])
                raise ScenarioError(
                    f"{method.value}: {failed[method.value]} of {len(results)} replications "
                    f"failed ({reasons})"
                )
            if failed[method.value]:
                logger.warning(f"{method.value}: excluded {failed[method.value]} failed replications")
            if not good:
                continue
            errors = np.array(
                [relative_errors(r.reliability, truth, config.min_true_reliability) for r in good]
            )
            predicted = np.array([r.reliability for r in good])
            observations[method.value] = float(np.mean([r.observation_count for r in good]))
            for h, horizon in enumerate(config.horizons):
                column = errors[:, h]
                finite = column[np.isfinite(column)]
                rows.append(
                    ErrorRow(
                        method=method.value,
                        horizon=horizon,
                        mean_relative_error=100.0 * float(finite.mean()) if finite.size else None,
                        mean_reliability=float(predicted[:, :, h].mean()),
                        true_reliability=float(truth[:, h].mean()),
                    )
                )
        table = ErrorTable(
            rows=rows,
            replications=config.replications,
            failed=failed,
            observations=observations,
            metadata={
                "config_hash": config_hash(config),
                "master_seed": config.master_seed,
                "xi": self.xi,
                "flags": list(config.flags),
                "profiles": "piecewise-constant covariate schedules per unit",
            },
        )
        logger.info(
            f"scenario {config.flags}: {config.replications} replications, "
            f"observations {observations}"
        )
        return table


def replicate_worker(handler: ScenarioHandler, rep_index: int) -> List[ReplicationResult]:
    return handler.replicate(rep_index)


def run_replication(
    config: ScenarioConfig,
    plan: MethodPlan,
    rep_index: int,
    matched_epochs: Optional[int] = None,
) -> ReplicationResult:
    """Runs a single method of a single replication."""
    handler = ScenarioHandler(config)
    return handler.run_replication(plan, Replication(handler, rep_index), matched_epochs)


def run_scenario(config: ScenarioConfig, store: Optional[FlatFileStore] = None) -> ErrorTable:
    return ScenarioHandler(config, store).run()
