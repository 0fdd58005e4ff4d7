import json
import math

import numpy as np
import pytest

from heavytail_ineq.measures import Family
from heavytail_ineq.report import format_cell, write_csv, write_json


@pytest.mark.parametrize(
    "value, text",
    [
        (True, "true"),
        (np.bool_(False), "false"),
        (3, "3"),
        (np.int64(7), "7"),
        (0.1, "0.10000000000000001"),
        (np.float64(2.5), "2.5"),
        (math.nan, "nan"),
        (-math.inf, "-inf"),
        (math.inf, "inf"),
        (Family.CAUCHY, "generalized-cauchy"),
        (None, ""),
        ("label", "label"),
    ],
)
def test_format_cell(value, text):
    assert format_cell(value) == text


def test_write_csv(tmp_path):
    path = write_csv(tmp_path / "sub" / "table.csv", ("t", "J"), [(0.1, 0.5), (0.2, True)], "paper-formula")
    assert path.read_bytes() == b"t,J,provenance\n0.10000000000000001,0.5,paper-formula\n" \
                                b"0.20000000000000001,true,paper-formula\n"


def test_write_csv_rejects_bad_input(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "a.csv", ("t",), [(0.1,)], "guess")
    with pytest.raises(ValueError):
        write_csv(tmp_path / "b.csv", ("t", "J"), [(0.1,)], "quadrature")


def test_write_json(tmp_path):
    path = write_json(tmp_path / "report.json", {
        "b": np.float64(1.5),
        "a": [math.inf, np.int32(2), (1, math.nan)],
        "kind": Family.EXPONENTIAL,
        "where": tmp_path,
        "grid": np.array([0.5, 1.0]),
    })
    text = path.read_text(encoding="utf-8")
    assert text.endswith("}\n")
    data = json.loads(text)
    assert list(data) == ["a", "b", "grid", "kind", "where"]
    assert data["a"] == ["inf", 2, [1, "nan"]]
    assert data["kind"] == "two-sided-exponential"
    assert data["where"] == str(tmp_path)
    assert data["grid"] == [0.5, 1.0]
