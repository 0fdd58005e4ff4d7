"""
CSV and JSON writers.

Every table carries a ``provenance`` column and floats are written with 17
significant digits, so identical runs produce identical bytes.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import csv
import enum
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from heavytail_ineq import const

_LOG = logging.getLogger(__name__)

PROVENANCE_TAGS = (
    const.PROVENANCE_FORMULA,
    const.PROVENANCE_QUADRATURE,
    const.PROVENANCE_MC,
    const.PROVENANCE_FITTED,
)


def format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return const.CSV_FLOAT_FORMAT.format(v)
    if isinstance(value, enum.Enum):
        return str(value.value)
    return "" if value is None else str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]], provenance: str) -> Path:
    """Write ``rows`` under ``header`` with a trailing provenance column."""
    if provenance not in PROVENANCE_TAGS:
        raise ValueError(f"unknown provenance tag {provenance!r}")
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(target, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([*header, "provenance"])
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
            writer.writerow([*(format_cell(v) for v in row), provenance])
            count += 1
    _LOG.debug("[%s] wrote %d rows", target.name, count)
    return target


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: str | Path, payload: dict[str, Any]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)
    target.write_text(text + "\n", encoding="utf-8")
    _LOG.debug("[%s] wrote JSON report", target.name)
    return target
