"""CSV ingestion/export and JSON report envelopes."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
import math
import os
import warnings
from typing import Optional

import numpy as np
import pandas as pd

from .errors import EmptyAfterFiltering, InputFileNotFound, MissingRole, NonNumericColumn
from .model import ColumnRoles, Dataset, _jsonable

log = logging.getLogger(__name__)

MISSING_TOKENS = ("", "NA", "N/A", "NaN", "nan", "null", "NULL")
FLOAT_FORMAT = "%.17g"


class MissingDataWarning(UserWarning):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"dropped {count} row(s) with missing values in role columns")


def _to_float(text: str) -> float:
    # float() round-trips repr/%.17g output exactly; pandas' fast parser does not.
    try:
        return float(text)
    except ValueError:
        return math.nan


def read_table(path: str, columns) -> tuple:
    """Read ``columns`` from a CSV as float arrays.

    Returns ``(frame, n_dropped)``: rows with a missing value in any requested
    column are dropped and counted; any other non-numeric entry raises.
    """
    if not os.path.isfile(path):
        raise InputFileNotFound(f"input file not found: {path}")
    raw = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    missing_cols = [c for c in columns if c not in raw.columns]
    if missing_cols:
        raise MissingRole(f"column {missing_cols[0]!r} declared as a role is not in the header of {path}")
    out = {}
    missing = np.zeros(len(raw), dtype=bool)
    for c in columns:
        s = raw[c].str.strip()
        is_na = s.isin(MISSING_TOKENS).to_numpy()
        num = np.array([_to_float(v) for v in s.where(~is_na, "nan")], dtype=np.float64)
        bad = np.flatnonzero(~is_na & ~np.isfinite(num))
        if bad.size:
            i = int(bad[0])
            raise NonNumericColumn(c, i + 1, raw[c].iloc[i])
        missing |= is_na
        out[c] = num
    keep = ~missing
    frame = {c: v[keep] for c, v in out.items()}
    n_dropped = int(missing.sum())
    if keep.sum() == 0:
        raise EmptyAfterFiltering(f"no complete rows left in {path} after dropping missing values")
    return frame, n_dropped


def ingest_csv(path: str, roles: ColumnRoles) -> Dataset:
    """Load the role columns of a CSV into a :class:`Dataset`.

    Rows missing any role value are dropped with a :class:`MissingDataWarning`
    carrying the count.
    """
    frame, dropped = read_table(path, roles.names())
    if dropped:
        warnings.warn(MissingDataWarning(dropped), stacklevel=2)
    return Dataset(frame, roles)


def write_dataset_csv(data: Dataset, path: str, include: Optional[list] = None) -> None:
    names = include if include is not None else list(data.columns)
    df = pd.DataFrame({c: data[c] for c in names})
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def envelope(command: str, config: dict, result, input_digest: Optional[str] = None) -> dict:
    from . import __version__
    import scipy

    return {
        "tool": "negcontrol",
        "command": command,
        "config": config,
        "input_sha256": input_digest,
        "seed": config.get("seed"),
        "versions": {"negcontrol": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        "created_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "result": result,
    }


def strip_timestamp(text: str) -> str:
    doc = json.loads(text)
    doc.pop("created_at", None)
    return json.dumps(doc, sort_keys=True)
