"""
Tidy plot data: one row per method, horizon and statistic, tagged with the config hash.
"""

import pathlib
from typing import List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from degradation_lab.errors import StoreError
from degradation_lab.schemas import ErrorRow, ErrorTable
from degradation_lab.store import FlatFileStore

TABLE_STATISTICS = ("mean_relative_error", "mean_reliability", "true_reliability")

Curves = Mapping[str, np.ndarray]


def table_frame(table: ErrorTable) -> pd.DataFrame:
    digest = table.metadata.get("config_hash", "")
    records = [
        {
            "config_hash": digest,
            "method": row.method,
            "horizon": row.horizon,
            "statistic": statistic,
            "value": getattr(row, statistic),
        }
        for row in table.rows
        for statistic in TABLE_STATISTICS
    ]
    return pd.DataFrame(records)


def curves_frame(curves: Curves, horizons: Sequence[float], digest: str = "") -> pd.DataFrame:
    """Per-unit curves (units × horizons) of each method, plus their mean over units."""
    records = []
    for method, curve in curves.items():
        curve = np.atleast_2d(np.asarray(curve, dtype=float))
        if curve.shape[1] != len(horizons):
            raise StoreError(f"{method}: {curve.shape[1]} curve points for {len(horizons)} horizons")
        rows = [(f"unit_{u + 1}", values) for u, values in enumerate(curve)]
        rows.append(("mean_reliability", curve.mean(axis=0)))
        for statistic, values in rows:
            records.extend(
                {
                    "config_hash": digest,
                    "method": method,
                    "horizon": float(h),
                    "statistic": statistic,
                    "value": float(v),
                }
                for h, v in zip(horizons, values)
            )
    return pd.DataFrame(records)


def emit_plotdata(
    source: Union[ErrorTable, Curves],
    store: FlatFileStore,
    path: Union[str, pathlib.Path],
    horizons: Optional[Sequence[float]] = None,
    digest: str = "",
) -> pathlib.Path:
    """Writes an error table, or reliability curves on ``horizons``, as tidy plot data."""
    if isinstance(source, ErrorTable):
        frame = table_frame(source)
    else:
        if horizons is None:
            raise StoreError("curves need their horizons")
        frame = curves_frame(source, horizons, digest)
    if frame.empty:
        raise StoreError("there is no plot data to emit")
    return store.write_plotdata(path, frame)


def table_rows(frame: pd.DataFrame) -> List[ErrorRow]:
    """Rebuilds error-table rows from tidy plot data."""
    wide = frame.pivot_table(
        index=["method", "horizon"], columns="statistic", values="value", dropna=False, sort=False
    ).reset_index()
    wide = wide.astype(object).where(wide.notna(), None)
    return [
        ErrorRow(**{k: row[k] for k in ("method", "horizon", *TABLE_STATISTICS)})
        for row in wide.to_dict(orient="records")
    ]
