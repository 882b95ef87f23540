"""Tests for CSV ingestion and result documents."""

import json

import numpy as np
import pandas as pd
import pytest

from pydaar.core.exceptions import CsvParseError, MissingColumn, NonFinite
from pydaar.io.csv_data import ColumnRoles, ingest_csv, split_names, write_sample_csv
from pydaar.io.results import (
    confidence_set_frame,
    json_document,
    to_plain,
    write_frame_csv,
    write_json,
)


@pytest.fixture
def small_csv(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text(
        "y,x,w,z_a,z_b,other\n"
        "1.0,2.0,0.5,1,0,9\n"
        "2.0,1.0,1.5,0,1,9\n"
        "3.0,0.5,2.5,1,1,9\n",
        encoding="utf-8",
    )
    return path


class TestSplitNames:
    def test_string(self):
        assert split_names(" a, b ,,c") == ("a", "b", "c")

    def test_sequence(self):
        assert split_names(["a", " b"]) == ("a", "b")

    def test_none(self):
        assert split_names(None) == ()


class TestColumnRoles:
    def test_requires_instruments(self):
        with pytest.raises(ValueError):
            ColumnRoles("y", "x")

    def test_prefix_alone(self):
        with pytest.raises(ValueError):
            ColumnRoles("y", "x", instruments=("prefix:z", "q"))

    def test_empty_prefix(self):
        with pytest.raises(ValueError):
            ColumnRoles("y", "x", instruments="prefix:")


class TestIngestCsv:
    """Test reading samples from CSV."""

    def test_shapes(self, small_csv):
        s = ingest_csv(small_csv, ColumnRoles("y", "x", controls="w", instruments="z_a,z_b"))
        assert (s.n, s.L, s.K) == (3, 1, 2)
        np.testing.assert_array_equal(s.Y, [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(s.Z[:, 1], [0.0, 1.0, 1.0])

    def test_intercept(self, small_csv):
        s = ingest_csv(small_csv, ColumnRoles("y", "x", controls="w", instruments="z_a",
                                              add_intercept=True))
        assert s.L == 2
        np.testing.assert_array_equal(s.W[:, -1], np.ones(3))

    def test_prefix(self, small_csv):
        s = ingest_csv(small_csv, ColumnRoles("y", "x", instruments="prefix:z_"))
        assert s.K == 2
        assert s.L == 0

    def test_prefix_no_match(self, small_csv):
        with pytest.raises(MissingColumn):
            ingest_csv(small_csv, ColumnRoles("y", "x", instruments="prefix:q_"))

    def test_missing_column(self, small_csv):
        with pytest.raises(MissingColumn, match="z_c"):
            ingest_csv(small_csv, ColumnRoles("y", "x", instruments="z_a,z_c"))

    def test_role_overlap(self, small_csv):
        with pytest.raises(ValueError, match="more than one role"):
            ingest_csv(small_csv, ColumnRoles("y", "x", controls="z_a", instruments="z_a"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ingest_csv(tmp_path / "absent.csv", ColumnRoles("y", "x", instruments="z"))

    def test_parse_error_location(self, tmp_path):
        """Test that the bad field is reported with its file row and column."""
        path = tmp_path / "bad.csv"
        path.write_text("y,x,z\n1,2,3\n4,5,6\n7,eight,9\n", encoding="utf-8")
        with pytest.raises(CsvParseError, match=r"row 4, column 'x'"):
            ingest_csv(path, ColumnRoles("y", "x", instruments="z"))

    def test_non_finite(self, tmp_path):
        path = tmp_path / "nan.csv"
        path.write_text("y,x,z\n1,2,3\n4,nan,6\n", encoding="utf-8")
        with pytest.raises(NonFinite, match="row 3"):
            ingest_csv(path, ColumnRoles("y", "x", instruments="z"))

    def test_round_trip(self, dkm_raw, tmp_path):
        """Test that a written sample reads back exactly."""
        path = tmp_path / "sample.csv"
        roles = write_sample_csv(dkm_raw, path)
        back = ingest_csv(path, roles)
        np.testing.assert_array_equal(back.Y, dkm_raw.Y)
        np.testing.assert_array_equal(back.W, dkm_raw.W)
        np.testing.assert_array_equal(back.Z, dkm_raw.Z)
        assert roles.instruments == ("z1", "z2", "z3", "z4", "z5")


class TestResults:
    """Test JSON and CSV result documents."""

    def test_non_finite_strings(self):
        doc = json.loads(json_document({"p_n": float("inf"), "q_n": -np.inf, "x": np.nan}))
        assert (doc["p_n"], doc["q_n"], doc["x"]) == ("inf", "-inf", "nan")
        assert doc["schema_version"] == "1.0"

    def test_to_plain(self):
        from pydaar.core.types import Method

        plain = to_plain({"a": np.arange(3), "b": np.float64(0.5), "c": np.bool_(True),
                          "d": Method.BS, "e": (np.int64(2),)})
        assert plain == {"a": [0, 1, 2], "b": 0.5, "c": True, "d": "BS", "e": [2]}

    def test_sorted_keys(self):
        text = json_document({"b": 1, "a": 2})
        assert text.index('"a"') < text.index('"b"')

    def test_write_json(self, tmp_path):
        path = tmp_path / "out.json"
        text = write_json({"value": 1}, path)
        assert path.read_text(encoding="utf-8") == text + "\n"

    def test_confidence_frame(self, tmp_path):
        path = tmp_path / "cs.csv"
        write_frame_csv(confidence_set_frame(np.array([0.0, 0.5]), np.array([True, False])), path)
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["beta", "accepted"]
        assert list(frame["accepted"]) == [True, False]
