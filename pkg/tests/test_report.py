import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from radpoincare.harness import InequalitySpec, check_inequality, run_suite
from radpoincare.radial import smooth_bump
from radpoincare.report import CSV_COLUMNS, emit_report, format_float, parse_csv, parse_json, to_csv, to_json


@pytest.fixture(scope="module")
def report():
    return check_inequality(InequalitySpec("th3", 9, alpha=1), [smooth_bump(1, 2), smooth_bump(0.2, 0.9)])


def test_json_round_trip(report, tmp_path):
    path = tmp_path / "r.json"
    emit_report(report, "json", path)
    assert parse_json(path.read_text()) == report.to_dict()


def test_csv_round_trip_and_header(report, tmp_path):
    path = tmp_path / "r.csv"
    text = emit_report(report, "csv", path)
    assert text.splitlines()[0] == "func,lhs,rhs,deficit,rel_deficit"
    assert tuple(text.splitlines()[0].split(",")) == CSV_COLUMNS
    assert parse_csv(path.read_text()) == report.to_dict()["rows"]


def test_suite_round_trip():
    rep = run_suite([InequalitySpec("lemma3", 9), InequalitySpec("th4", 9, alpha=7)])
    assert parse_json(to_json(rep)) == rep.to_dict()
    assert parse_json(to_json(rep))["verdict"] in ("pass", "fail", "spec_error")


@given(st.floats(allow_nan=False))
def test_seventeen_digit_floats_round_trip(x):
    assert float(format_float(x)) == x
    s = format_float(x)
    if math.isfinite(x) and x != 0:
        digits = s.split("e")[0].replace("-", "").replace(".", "").lstrip("0")
        assert len(digits) <= 17


def test_verdict_enumeration_enforced():
    with pytest.raises(ValueError):
        to_json({"meta": {}, "rows": [], "verdict": "maybe"})
    with pytest.raises(ValueError):
        to_csv({"meta": {}, "rows": [], "verdict": None})


def test_unknown_format_and_io_error(report, tmp_path):
    with pytest.raises(ValueError):
        emit_report(report, "xml")
    missing = tmp_path / "no" / "such" / "dir" / "r.json"
    with pytest.raises(OSError, match="r.json"):
        emit_report(report, "json", missing)


def test_bad_csv_header():
    with pytest.raises(ValueError):
        parse_csv("a,b\n1,2\n")
