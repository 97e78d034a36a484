"""The built-in check battery and its report serialization."""

import json

import pytest

from qdbsim.errors import SemanticError
from qdbsim.verify import FAST_CHECKS, FULL_CHECKS, VerifyReport, run_verify


def test_fast_battery_passes():
    report = run_verify("fast")
    assert report.passed
    assert report.level == "fast"
    assert len(report.checks) == len(FAST_CHECKS)
    assert all(c.passed for c in report.checks)


def test_full_battery_passes():
    report = run_verify("full")
    assert report.passed
    assert len(report.checks) == len(FULL_CHECKS)
    assert len(FULL_CHECKS) > len(FAST_CHECKS)


def test_unknown_level_rejected():
    with pytest.raises(SemanticError):
        run_verify("extreme")


def test_report_round_trips_through_json():
    report = run_verify("fast")
    text = report.to_json()
    again = VerifyReport.from_json(text)
    assert again.level == report.level
    assert again.passed == report.passed
    assert [c.name for c in again.checks] == [c.name for c in report.checks]
    obj = json.loads(text)
    assert set(obj) == {"level", "passed", "checks"}


def test_failures_are_captured_not_raised(monkeypatch):
    import qdbsim.verify as verify_mod

    def boom():
        raise RuntimeError("simulated defect")

    patched = [(name, boom if name == "gate-matrices" else fn)
               for name, fn in verify_mod.FAST_CHECKS]
    monkeypatch.setattr(verify_mod, "FAST_CHECKS", patched)
    report = verify_mod.run_verify("fast")
    assert not report.passed
    failed = [c for c in report.checks if not c.passed]
    assert len(failed) == 1
    assert "simulated defect" in failed[0].detail
