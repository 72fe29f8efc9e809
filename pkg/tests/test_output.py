import json
import math
import pytest
import sys
import os
sys.path.insert(1, os.path.abspath('.'))
from cochainlab.output.csv_sink import HEADER_PREFIX, CsvSink, CsvSinkException, format_value, read_body, render_body
from cochainlab.output.json_sidecar import JsonSidecar, JsonSidecarException


class TestCsvSink:
    def test_write(self, tmp_path):
        path = str(tmp_path / "nested" / "out.csv")
        CsvSink(path).write(("a", "b"), [(1, 0.5), (2, None)])
        with open(path) as f:
            lines = f.read().splitlines()
        assert lines[0].startswith(HEADER_PREFIX)
        assert lines[1:] == ["a,b", "1,0.5", "2,"]
        assert read_body(path) == ["a,b", "1,0.5", "2,"]

    def test_bad_row(self, tmp_path):
        with pytest.raises(CsvSinkException):
            CsvSink(str(tmp_path / "out.csv")).write(("a", "b"), [(1,)])

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(CsvSinkException):
            CsvSink(str(blocker / "out.csv")).write(("a",), [(1,)])

    def test_missing_file(self, tmp_path):
        with pytest.raises(CsvSinkException):
            read_body(str(tmp_path / "missing.csv"))

    def test_body_is_stable(self):
        rows = [(0, 0.1 + 0.2, True)]
        assert render_body(("x", "y", "z"), rows) == render_body(("x", "y", "z"), rows)


class TestFormatValue:
    def test_values(self):
        assert format_value(True) == 1
        assert format_value(False) == 0
        assert format_value(None) == ""
        assert format_value(0.1 + 0.2) == "0.30000000000000004"
        assert format_value("-3:20;4:15") == "-3:20;4:15"


class TestJsonSidecar:
    def test_beside(self):
        assert JsonSidecar.beside(os.path.join("results", "run.csv")).path == os.path.join("results", "run.json")

    def test_write(self, tmp_path):
        path = str(tmp_path / "run.json")
        JsonSidecar(path).write({"seed": 1}, {"ratio": math.nan, "bound": math.inf, "lows": [-math.inf]}, 1.5)
        with open(path) as f:
            payload = json.load(f)
        assert set(payload) == {"config", "summary", "runtime_seconds", "version"}
        assert payload["summary"] == {"ratio": None, "bound": "inf", "lows": ["-inf"]}
        assert payload["runtime_seconds"] == 1.5

    def test_unserializable(self, tmp_path):
        with pytest.raises(JsonSidecarException):
            JsonSidecar(str(tmp_path / "run.json")).write({"bad": object()}, {}, 0.0)
