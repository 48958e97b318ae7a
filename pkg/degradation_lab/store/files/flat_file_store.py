# store/files/flat_file_store.py
#
# Defines a store of CSV and JSON files under one output directory
import hashlib
import json
import pathlib
from typing import Any, Dict, List, Optional, Sequence, Type, TypeVar, Union

import numpy as np
import pandas as pd
import scipy
from loguru import logger
from pydantic import BaseModel, ValidationError

from degradation_lab import __version__
from degradation_lab.errors import StoreError
from degradation_lab.schemas import ErrorRow, ErrorTable, Observation, ObservationSet
from degradation_lab.store.store_base import StoreBase

PathLike = Union[str, pathlib.Path]
Schema = TypeVar("Schema", bound=BaseModel)

OBSERVATION_COLUMNS = ["unit", "time", "level"]
RELIABILITY_COLUMNS = ["unit", "horizon", "reliability"]
ERROR_COLUMNS = ["method", "horizon", "mean_relative_error", "mean_reliability", "true_reliability"]
PLOTDATA_COLUMNS = ["config_hash", "method", "horizon", "statistic", "value"]


def config_hash(config: BaseModel) -> str:
    """SHA-256 of the canonical JSON of a validated config; worker counts are excluded."""
    exclude = {"workers"} if "workers" in config.__fields__ else None
    canonical = json.dumps(json.loads(config.json(exclude=exclude)), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def versions() -> Dict[str, str]:
    return {"degradation_lab": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


class FlatFileStore(StoreBase):
    def __init__(self, root: PathLike = "."):
        super().__init__()
        self.root = pathlib.Path(root)

    def resolve(self, path: PathLike) -> pathlib.Path:
        path = pathlib.Path(path)
        return path if path.is_absolute() else self.root / path

    def _csv(self, path: PathLike, frame: pd.DataFrame, header: bool = True) -> pathlib.Path:
        target = self.resolve(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(target, index=False, header=header, lineterminator="\n")
        except OSError as e:
            raise StoreError(f"cannot write {target}: {e}") from e
        logger.debug(f"wrote {len(frame)} rows to {target}")
        return target

    def _read_csv(self, path: PathLike, columns: Sequence[str]) -> pd.DataFrame:
        source = self.resolve(path)
        try:
            frame = pd.read_csv(source)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise StoreError(f"cannot read {source}: {e}") from e
        missing = set(columns) - set(frame.columns)
        if missing:
            raise StoreError(f"{source} lacks columns {sorted(missing)}")
        return frame

    # INPUTS ==========================================================================================================

    def read_observations(self, path: PathLike, n_units: Optional[int] = None) -> ObservationSet:
        """Reads a ``unit,time,level`` CSV; L defaults to the largest unit id present."""
        frame = self._read_csv(path, OBSERVATION_COLUMNS)
        records = [
            Observation(unit=int(row.unit), time=float(row.time), level=float(row.level))
            for row in frame.itertuples(index=False)
        ]
        units = n_units or max((r.unit for r in records), default=1)
        try:
            return ObservationSet(n_units=units, records=records)
        except ValidationError as e:
            raise StoreError(f"invalid observations in {path}: {e}") from e

    def read_document(self, path: PathLike, schema: Type[Schema]) -> Schema:
        """Reads a JSON document and validates it against ``schema``."""
        source = self.resolve(path)
        try:
            return schema.parse_file(source)
        except OSError as e:
            raise StoreError(f"cannot read {source}: {e}") from e

    def read_error_table(self, path: PathLike) -> List[ErrorRow]:
        frame = self._read_csv(path, ERROR_COLUMNS)
        frame = frame.astype(object).where(frame.notna(), None)
        return [ErrorRow(**row) for row in frame.to_dict(orient="records")]

    def read_plotdata(self, path: PathLike) -> pd.DataFrame:
        return self._read_csv(path, PLOTDATA_COLUMNS)

    # OUTPUTS =========================================================================================================

    def write_observations(self, path: PathLike, data: ObservationSet) -> pathlib.Path:
        frame = pd.DataFrame([r.dict() for r in data.records], columns=OBSERVATION_COLUMNS)
        return self._csv(path, frame)

    def write_paths(
        self, path: PathLike, paths: np.ndarray, units: Sequence[int], grid: Sequence[float]
    ) -> pathlib.Path:
        """Writes a (path × unit × time) array as ``path,unit,time,level`` rows."""
        n_paths, n_units, n_times = paths.shape
        frame = pd.DataFrame(
            {
                "path": np.repeat(np.arange(n_paths), n_units * n_times),
                "unit": np.tile(np.repeat(np.asarray(units), n_times), n_paths),
                "time": np.tile(np.asarray(grid, dtype=float), n_paths * n_units),
                "level": paths.ravel(),
            }
        )
        return self._csv(path, frame)

    def write_reliability(
        self,
        path: PathLike,
        units: Sequence[int],
        horizons: Sequence[float],
        curves: np.ndarray,
    ) -> pathlib.Path:
        frame = pd.DataFrame(
            {
                "unit": np.repeat(np.asarray(units), len(horizons)),
                "horizon": np.tile(np.asarray(horizons, dtype=float), len(units)),
                "reliability": np.asarray(curves, dtype=float).ravel(),
            }
        )
        return self._csv(path, frame)

    def write_matrix(self, path: PathLike, matrix: Sequence[Sequence[int]]) -> pathlib.Path:
        return self._csv(path, pd.DataFrame(np.asarray(matrix, dtype=int)), header=False)

    def write_trace(
        self, path: PathLike, trace: Any, columns: Sequence[str]
    ) -> pathlib.Path:
        return self._csv(path, pd.DataFrame(trace, columns=list(columns)))

    def write_error_table(self, path: PathLike, table: ErrorTable) -> pathlib.Path:
        frame = pd.DataFrame([r.dict() for r in table.rows], columns=ERROR_COLUMNS)
        return self._csv(path, frame)

    def write_plotdata(self, path: PathLike, frame: pd.DataFrame) -> pathlib.Path:
        return self._csv(path, frame[PLOTDATA_COLUMNS])

    def write_document(self, path: PathLike, document: Union[BaseModel, Dict]) -> pathlib.Path:
        target = self.resolve(path)
        payload = json.loads(document.json()) if isinstance(document, BaseModel) else document
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        except OSError as e:
            raise StoreError(f"cannot write {target}: {e}") from e
        return target

    def write_metadata(
        self, path: PathLike, config: BaseModel, seed: Optional[int], **extra
    ) -> pathlib.Path:
        """Run metadata: config hash, seed and package versions. No timestamps."""
        metadata = {
            "config_hash": config_hash(config),
            "seed": seed,
            "versions": versions(),
            **extra,
        }
        return self.write_document(path, metadata)

    # TRUTH CACHE =====================================================================================================

    def truth_path(self, digest: str) -> pathlib.Path:
        return self.root / f"truth_{digest}.csv"

    def read_truth(self, digest: str) -> Optional[np.ndarray]:
        """Returns cached true reliability curves (units × horizons) or None."""
        source = self.truth_path(digest)
        if not source.exists():
            return None
        frame = self._read_csv(source, RELIABILITY_COLUMNS)
        n_units = frame["unit"].nunique()
        logger.info(f"using cached true reliability {source.name}")
        return frame["reliability"].to_numpy().reshape(n_units, -1)

    def write_truth(
        self, digest: str, units: Sequence[int], horizons: Sequence[float], curves: np.ndarray
    ) -> pathlib.Path:
        return self.write_reliability(self.truth_path(digest), units, horizons, curves)
