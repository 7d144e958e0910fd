"""
Tests for scheme files and report tables
"""

import json
import logging

import pytest

from cfpoisson.groups.shapes import interval
from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.shared.io import (
    load_scheme,
    read_csv,
    scheme_from_json,
    scheme_to_json,
    store_scheme,
    write_csv,
    write_json,
)
from cfpoisson.types.scheme import CFScheme

Z_WIRE = {"kind": "integer-lattice", "params": {"dimension": 1}}


def test_store_and_load(small_scheme, tmp_path):
    """Test that a stored scheme loads back unchanged"""
    path = tmp_path / "s.json"
    store_scheme(small_scheme, path)
    assert load_scheme(path) == small_scheme
    data = json.loads(path.read_text())
    assert data["group"] == Z_WIRE
    assert data["C"][1] == [[0], [30]]


def test_large_sets_use_run_tables(Z, tmp_path):
    """Test that big shapes are written as runs"""
    one = FiniteSubset.singleton(Z.element(0))
    s = CFScheme(
        group=Z,
        F=[one, interval(Z, -1, 20000)],
        C=[FiniteSubset.from_elements(Z, [Z.element(0), Z.element(1)])],
    )
    data = scheme_to_json(s)
    assert data["F"][1] == {"runs": [[-1, 20000]]}
    path = tmp_path / "big.json"
    store_scheme(s, path)
    assert load_scheme(path) == s


def test_duplicate_elements_warn(caplog):
    """Test that repeated elements collapse with a warning before validation"""
    data = {"group": Z_WIRE, "F": [[[0]], [[0], [1]]], "C": [[[0], [0]]]}
    with caplog.at_level(logging.WARNING, logger="cfpoisson.shared.io"):
        with pytest.raises(CFPoissonError, match="invalid_scheme"):
            scheme_from_json(data)
    assert "C[0] lists 1 duplicate" in caplog.text


def test_parse_error_names_field():
    """Test that malformed elements are reported with their position"""
    data = {"group": Z_WIRE, "F": [[[0]], [[0], "x"]], "C": [[[0], [1]]]}
    with pytest.raises(CFPoissonError, match=r"scheme_parse_error: F\[1\]\[1\]") as info:
        scheme_from_json(data)
    assert info.value.detail["field"] == "F[1][1]"


def test_missing_keys_and_bad_group():
    """Test structural parse errors"""
    with pytest.raises(CFPoissonError, match="scheme_parse_error: C"):
        scheme_from_json({"group": Z_WIRE, "F": [[[0]]]})
    with pytest.raises(CFPoissonError, match="scheme_parse_error: group"):
        scheme_from_json({"group": {"kind": "free-group"}, "F": [[[0]]], "C": []})
    with pytest.raises(CFPoissonError, match="scheme_parse_error"):
        scheme_from_json([1, 2])


def test_json_syntax_error(tmp_path):
    """Test that invalid JSON reports line and column"""
    path = tmp_path / "broken.json"
    path.write_text('{"group": \n  oops}')
    with pytest.raises(CFPoissonError, match="line 2 column 3") as info:
        load_scheme(path)
    assert info.value.reason == "scheme_parse_error"


def test_invalid_scheme(tmp_path):
    """Test that structural invariants are enforced on load"""
    data = {"group": Z_WIRE, "F": [[[0]], [[0], [1]]], "C": [[[0], [3]]]}
    with pytest.raises(CFPoissonError, match="refinement_leaves_shape") as info:
        scheme_from_json(data)
    assert info.value.reason == "invalid_scheme"


def test_report_files(tmp_path):
    """Test deterministic JSON and CSV output"""
    write_json(tmp_path / "r.json", {"b": 1, "a": [1, 2]})
    assert (tmp_path / "r.json").read_text() == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
    write_csv(tmp_path / "t.csv", ["level", "size"], [[0, 1], [1, 10]])
    assert read_csv(tmp_path / "t.csv") == [
        {"level": "0", "size": "1"},
        {"level": "1", "size": "10"},
    ]
