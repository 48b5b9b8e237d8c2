import json
import warnings

import numpy as np
import pytest

from negcontrol.errors import EmptyAfterFiltering, InputFileNotFound, MissingRole, NonNumericColumn
from negcontrol.io import MissingDataWarning, dumps, envelope, ingest_csv, read_table, strip_timestamp, write_dataset_csv
from negcontrol.model import ColumnRoles

from conftest import sim

ROLES = ColumnRoles(nce="Z", nco="W")


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_five_rows(tmp_path):
    path = write(tmp_path, "A,Z,W,Y\n" + "\n".join(f"{i % 2},{i},{2 * i},{i + 0.5}" for i in range(5)) + "\n")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        d = ingest_csv(path, ROLES)
    assert d.n_rows == 5
    np.testing.assert_array_equal(d.Y, [0.5, 1.5, 2.5, 3.5, 4.5])


def test_missing_value_dropped_with_count(tmp_path):
    path = write(tmp_path, "A,Z,W,Y,extra\n0,1,2,3,x\n1,1,2,,y\n0,2,3,4,z\n")
    with pytest.warns(MissingDataWarning) as rec:
        d = ingest_csv(path, ROLES)
    assert d.n_rows == 2
    assert rec[0].message.count == 1


def test_missing_header_column(tmp_path):
    path = write(tmp_path, "A,Z,Y\n0,1,2\n")
    with pytest.raises(MissingRole, match="'W'"):
        ingest_csv(path, ROLES)


def test_non_numeric_and_empty(tmp_path):
    path = write(tmp_path, "A,Z,W,Y\n0,1,2,3\n1,abc,2,3\n")
    with pytest.raises(NonNumericColumn) as info:
        ingest_csv(path, ROLES)
    assert info.value.column == "Z" and info.value.row == 2
    path = write(tmp_path, "A,Z,W,Y\n0,1,2,NA\n", "e.csv")
    with pytest.raises(EmptyAfterFiltering):
        read_table(path, ["A", "Y"])
    with pytest.raises(InputFileNotFound):
        read_table(str(tmp_path / "nope.csv"), ["A"])


def test_roundtrip_exact(tmp_path):
    d = sim(200, 3)
    path = str(tmp_path / "out.csv")
    write_dataset_csv(d, path, ["A", "Z", "W", "Y"])
    back = ingest_csv(path, ROLES)
    for c in ("A", "Z", "W", "Y"):
        assert back[c].tobytes() == d[c].tobytes()


def test_envelope_and_dumps():
    env = envelope("estimate", {"seed": 4, "x": 1}, {"v": float("nan")}, "abc")
    text = dumps(env)
    doc = json.loads(text)
    assert doc["seed"] == 4 and doc["input_sha256"] == "abc" and doc["result"]["v"] is None
    assert "created_at" in doc and "created_at" not in json.loads(strip_timestamp(text))
    assert list(doc) == sorted(doc)
