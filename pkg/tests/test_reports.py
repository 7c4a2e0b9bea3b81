import csv
import json
import math

import numpy as np
import pytest

from hyperbench.reports import CSV_COLUMNS, Report, ReportEntry, sanitize, write_report


def sample_report() -> Report:
    return Report(
        command="constants",
        seed=7,
        config={"alpha": np.float64(0.5), "n": np.int64(2)},
        definitions={"dist": "an upper bound"},
        entries=[
            ReportEntry(name="a", bound=1.0, bracket_lo=0.5, bracket_hi=0.75, status="pass", formula="x <= 1"),
            ReportEntry(name="b", bound=math.inf, status="inconclusive", formula="y <= inf", note="wide"),
        ],
        details={"nan": float("nan"), "nested": [np.float32(1.5), {"k": math.inf}]},
    )


def test_sanitize_replaces_non_finite():
    assert sanitize({"x": math.nan, "y": [math.inf, 2.0], "z": np.int64(3)}) == {"x": None, "y": [None, 2.0], "z": 3}


def test_entry_drops_infinities():
    entry = ReportEntry(name="e", bound=math.inf, bracket_hi=-math.inf, status="pass", formula="")
    assert entry.bound is None and entry.bracket_hi is None


def test_status_aggregation():
    report = sample_report()
    assert report.status == "inconclusive"
    assert report.count("pass") == 1
    failed = report.model_copy(update={"entries": report.entries + [ReportEntry(name="c", status="fail", formula="")]})
    assert failed.status == "fail"


def test_json_layout(tmp_path):
    path = write_report(sample_report(), tmp_path / "out" / "r.json", "json")
    data = json.loads(path.read_text())
    assert next(iter(data)) == "schema"
    assert data["tool"] == "hyperbench"
    assert data["config"] == {"alpha": 0.5, "n": 2}
    assert data["details"]["nan"] is None
    assert data["entries"][1]["bound"] is None


def test_json_is_deterministic(tmp_path):
    first = write_report(sample_report(), tmp_path / "a.json").read_bytes()
    second = write_report(sample_report(), tmp_path / "b.json").read_bytes()
    assert first == second


def test_csv_columns(tmp_path):
    path = write_report(sample_report(), tmp_path / "r.csv", "csv")
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == CSV_COLUMNS
    assert rows[1]["bound"] == ""
    assert rows[0]["status"] == "pass"


def test_pdf_is_deterministic(tmp_path):
    first = write_report(sample_report(), tmp_path / "a.pdf", "pdf").read_bytes()
    second = write_report(sample_report(), tmp_path / "b.pdf", "pdf").read_bytes()
    assert first.startswith(b"%PDF")
    assert first == second


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        write_report(sample_report(), tmp_path / "r.xml", "xml")
