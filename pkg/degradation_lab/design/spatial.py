"""
Space-filling unit selection: choose c of L units at each of o epochs so the selected
(epoch, unit) grid points minimise the wrap-around L2 discrepancy, with every column of the
observation matrix summing to exactly c.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from degradation_lab.design.discrepancy import WD2_OFFSET, grid_kernel
from degradation_lab.errors import DesignError
from degradation_lab.schemas import DesignResult, ObservationMatrix, SearchAlgorithm, SearchConfig

DRIFT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SwapMove:
    """Swap ``remove`` (selected) for ``add`` (unselected) in one epoch column; 0-based units."""

    epoch: int
    remove: int
    add: int
    delta: float


class Design:
    """A feasible selection with incrementally maintained discrepancy sums."""

    def __init__(self, selected: np.ndarray, kernel: Optional[np.ndarray] = None):
        self.selected = np.asarray(selected, dtype=bool).copy()
        self.n_units, self.n_epochs = self.selected.shape
        self.kernel = grid_kernel(self.n_epochs, self.n_units) if kernel is None else kernel
        self.resync()

    def index(self, unit: int, epoch: int) -> int:
        return unit * self.n_epochs + epoch

    @property
    def size(self) -> int:
        return int(self.selected.sum())

    @property
    def budget(self) -> int:
        return int(self.selected[:, 0].sum())

    def full_sum(self) -> float:
        mask = self.selected.ravel().astype(float)
        return float(mask @ self.kernel @ mask)

    def resync(self):
        mask = self.selected.ravel().astype(float)
        self.kernel_sums = self.kernel @ mask
        self.total = float(mask @ self.kernel_sums)

    @property
    def wd2(self) -> float:
        return WD2_OFFSET + self.total / self.size**2

    def delta(self, epoch: int, remove: int, add: int) -> float:
        a, b = self.index(remove, epoch), self.index(add, epoch)
        ks, k = self.kernel_sums, self.kernel
        return 2.0 * ((ks[b] - k[b, a]) - (ks[a] - k[a, a])) / self.size**2

    def apply(self, move: SwapMove):
        a, b = self.index(move.remove, move.epoch), self.index(move.add, move.epoch)
        self.total += move.delta * self.size**2
        self.kernel_sums = self.kernel_sums + self.kernel[:, b] - self.kernel[:, a]
        self.selected[move.remove, move.epoch] = False
        self.selected[move.add, move.epoch] = True

    def audit(self) -> float:
        """Recomputes the discrepancy sum, resyncing when the running value drifted."""
        exact = self.full_sum()
        drift = abs(exact - self.total) / self.size**2
        if drift > DRIFT_TOLERANCE:
            logger.warning(f"incremental wd2 drifted by {drift:.3e}; resynchronising")
            self.resync()
        return drift

    def copy(self) -> "Design":
        clone = Design.__new__(Design)
        clone.selected = self.selected.copy()
        clone.n_units, clone.n_epochs = self.n_units, self.n_epochs
        clone.kernel = self.kernel
        clone.kernel_sums = self.kernel_sums.copy()
        clone.total = self.total
        return clone


def random_design(
    n_epochs: int, n_units: int, budget: int, rng: np.random.Generator
) -> np.ndarray:
    """A uniformly drawn feasible selection matrix."""
    selected = np.zeros((n_units, n_epochs), dtype=bool)
    for k in range(n_epochs):
        selected[rng.choice(n_units, size=budget, replace=False), k] = True
    return selected


def propose_swap(design: Design, rng: np.random.Generator) -> Optional[SwapMove]:
    """Draws a column with an unselected unit and swaps one selected unit for one unselected.

    Returns None when every column is saturated (c = L).
    """
    open_columns = np.flatnonzero(design.selected.sum(axis=0) < design.n_units)
    if open_columns.size == 0:
        return None
    epoch = int(rng.choice(open_columns))
    column = design.selected[:, epoch]
    remove = int(rng.choice(np.flatnonzero(column)))
    add = int(rng.choice(np.flatnonzero(~column)))
    return SwapMove(epoch=epoch, remove=remove, add=add, delta=design.delta(epoch, remove, add))


def swap_neighbor(design: Design, seed) -> Design:
    """Returns a neighbouring design one random swap away (the same design if saturated)."""
    neighbour = design.copy()
    move = propose_swap(neighbour, np.random.default_rng(seed))
    if move is not None:
        neighbour.apply(move)
    return neighbour


# = SEARCHERS ==========================================================================================================


class Searcher(ABC):
    name: str

    @abstractmethod
    def accept(self, delta: float, iteration: int) -> bool:
        raise NotImplementedError


class RandomSwap(Searcher):
    """Accepts strictly improving moves only."""

    name = SearchAlgorithm.RANDOM_SWAP.value

    def accept(self, delta: float, iteration: int) -> bool:
        return delta < 0


class ThresholdAccepting(Searcher):
    """Accepts any move whose worsening does not exceed the current threshold.

    A zero threshold accepts strict improvements only, as random swap does.
    """

    name = SearchAlgorithm.THRESHOLD_ACCEPTING.value

    def __init__(self, thresholds: Sequence[float]):
        self.thresholds = np.asarray(thresholds, dtype=float)

    def accept(self, delta: float, iteration: int) -> bool:
        threshold = self.thresholds[iteration]
        if threshold <= 0.0:
            return delta < 0
        return delta <= threshold


def threshold_schedule(iterations: int, initial: float, final_ratio: float) -> np.ndarray:
    """Geometric decay from ``initial`` towards ``initial·final_ratio``, shifted to end at 0."""
    if iterations == 1:
        return np.zeros(1)
    q = final_ratio ** (1.0 / (iterations - 1))
    powers = q ** np.arange(iterations)
    tail = powers[-1]
    return np.maximum(initial * (powers - tail) / (1.0 - tail), 0.0)


def warmup_threshold(design: Design, config: SearchConfig, rng: np.random.Generator) -> float:
    """The configured quantile of |Δwd2| along a random walk of warm-up moves."""
    walker = design.copy()
    deltas: List[float] = []
    for _ in range(config.warmup_moves):
        move = propose_swap(walker, rng)
        if move is None:
            break
        deltas.append(abs(move.delta))
        walker.apply(move)
    if not deltas:
        return 0.0
    return float(np.quantile(deltas, config.threshold_quantile))


def _searcher(config: SearchConfig, design: Design, rng: np.random.Generator) -> Searcher:
    if config.algorithm == SearchAlgorithm.RANDOM_SWAP:
        return RandomSwap()
    thresholds = config.thresholds
    if thresholds is None:
        initial = warmup_threshold(design, config, rng)
        thresholds = threshold_schedule(config.iterations, initial, config.final_ratio)
        logger.debug(f"threshold schedule from {initial:.3e} over {config.iterations} moves")
    return ThresholdAccepting(thresholds)


def optimize_design(
    n_epochs: int, n_units: int, budget: int, config: Optional[SearchConfig] = None
) -> DesignResult:
    """Searches for the feasible L×o selection with the smallest wd2; returns the best seen."""
    config = config or SearchConfig()
    if n_epochs < 1 or n_units < 1:
        raise DesignError("the design needs at least one epoch and one unit")
    if not 1 <= budget <= n_units:
        raise DesignError(f"budget {budget} must lie in 1..{n_units}")

    if budget == n_units:
        full = Design(np.ones((n_units, n_epochs), dtype=bool))
        return DesignResult(
            matrix=ObservationMatrix.from_array(full.selected, budget),
            wd2=WD2_OFFSET + full.full_sum() / full.size**2,
            algorithm=config.algorithm.value,
            iterations=0,
            seed=config.seed,
            best_trace=[full.wd2],
        )

    move_seed, warmup_seed = np.random.SeedSequence(config.seed).spawn(2)
    rng = np.random.default_rng(move_seed)
    design = Design(random_design(n_epochs, n_units, budget, rng))
    searcher = _searcher(config, design, np.random.default_rng(warmup_seed))

    best, best_wd2 = design.selected.copy(), design.wd2
    best_trace: List[float] = []
    accepted = 0
    for iteration in range(config.iterations):
        move = propose_swap(design, rng)
        if searcher.accept(move.delta, iteration):
            design.apply(move)
            accepted += 1
            if design.wd2 < best_wd2:
                best, best_wd2 = design.selected.copy(), design.wd2
        if (iteration + 1) % config.audit_every == 0:
            design.audit()
            best_trace.append(best_wd2)
    if not best_trace or config.iterations % config.audit_every:
        best_trace.append(best_wd2)

    exact = Design(best, design.kernel)
    logger.info(
        f"{searcher.name}: wd2 {exact.wd2:.6f} after {config.iterations} moves "
        f"({accepted} accepted) for L={n_units}, o={n_epochs}, c={budget}"
    )
    return DesignResult(
        matrix=ObservationMatrix.from_array(best, budget),
        wd2=exact.wd2,
        algorithm=searcher.name,
        iterations=config.iterations,
        seed=config.seed,
        accepted=accepted,
        best_trace=best_trace,
    )
