import json
from fractions import Fraction

import pytest

from negjacobi.gaussian import GaussianRational
from negjacobi.report import Discrepancy, VerificationReport, report_emit, summary_line


def _pair():
    ok = VerificationReport("b-check", True, Fraction(10), None, {"alpha": "1/2"})
    bad = VerificationReport("a-check", False, Fraction(5),
                             Discrepancy(Fraction(1, 8), Fraction(-1, 2), GaussianRational(1), GaussianRational(0, 2)))
    return ok, bad


def test_empty_summary():
    assert summary_line([]) == "passed 0 / failed 0 / total 0"
    assert report_emit([], "text") == "passed 0 / failed 0 / total 0\n"


def test_sorted_and_summarized():
    ok, bad = _pair()
    text = report_emit([ok, bad], "text")
    lines = text.splitlines()
    assert lines[0].startswith("FAIL a-check")
    assert "first difference at q^1/8 zeta^-1/2" in lines[0]
    assert lines[1].startswith("PASS b-check")
    assert lines[-1] == "passed 1 / failed 1 / total 2"


def test_json_round_trip():
    ok, bad = _pair()
    numeric = VerificationReport("c", False, None, Discrepancy(Fraction(0), Fraction(0), 1 + 2j, 0.5 - 1e-17j),
                                 {"abs_error": 1.5})
    for r in (ok, bad, numeric):
        assert VerificationReport.from_json(json.loads(json.dumps(r.to_json()))) == r
    payload = json.loads(report_emit([ok, bad], "json"))
    assert [VerificationReport.from_json(d) for d in payload["reports"]] == [bad, ok]
    assert payload["summary"] == "passed 1 / failed 1 / total 2"


def test_csv_layout():
    ok, bad = _pair()
    text = report_emit([ok, bad], "csv")
    rows = text.split("\r\n")
    assert rows[0] == "id,status,checked_to,discrepancy_q,discrepancy_z,derived_constants"
    assert rows[1].startswith("a-check,fail,5/1,1/8,-1/2")


def test_fail_needs_evidence():
    with pytest.raises(ValueError):
        VerificationReport("x", False)
    VerificationReport("x", False, derived_constants={"error": "tolerance exceeded"})


def test_unknown_format():
    with pytest.raises(ValueError):
        report_emit([], "xml")
