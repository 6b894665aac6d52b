import json

import numpy as np
import pandas as pd
import pytest

from src.custom_exception import CustomException
from utils.common_functions import (
    MANIFEST_PREFIX,
    canonical_json,
    checksum,
    load_table,
    read_manifest,
    read_yaml,
    render_table,
    write_output,
)


def test_read_default_config():
    cfg = read_yaml()
    for section in ("simulation", "exact", "oracle", "convergence", "parker", "bounds", "buffon", "execution"):
        assert section in cfg
    assert cfg["simulation"]["cap"] == 2**24 - 1
    assert cfg["convergence"]["budgets"] == [1000, 10000, 100000, 1000000]


def test_read_missing_config(tmp_path):
    with pytest.raises(CustomException) as excinfo:
        read_yaml(str(tmp_path / "missing.yaml"))
    assert "YAML" in excinfo.value.message


def test_canonical_json_is_sorted_and_finite():
    text = canonical_json({"b": np.float64(1.5), "a": [np.int64(2), float("nan")]}, indent=None)
    assert text == '{"a":[2,null],"b":1.5}'


def test_checksum_ignores_key_order():
    assert checksum({"x": 1, "y": 2}) == checksum({"y": 2, "x": 1})
    assert checksum({"x": 1}) != checksum({"x": 2})


def test_table_round_trip(tmp_path):
    df = pd.DataFrame({"run_id": ["r0", "r1"], "pi_hat": [3.1, 3.2]})
    manifest = {"subcommand": "parker", "seed": 7}
    text = render_table(df, manifest)
    assert text.startswith(MANIFEST_PREFIX)

    path = tmp_path / "out" / "table.csv"
    sidecar = write_output(str(path), text, manifest, wall_time=0.5)
    assert read_manifest(str(path)) == manifest
    assert load_table(str(path)).equals(df)
    assert json.loads(open(sidecar, encoding="utf-8").read())["wall_time_seconds"] == 0.5


def test_load_missing_table(tmp_path):
    with pytest.raises(CustomException):
        load_table(str(tmp_path / "nope.csv"))
