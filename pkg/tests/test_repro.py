"""
Tests for acceptance criteria and report rendering.
"""

import json

import pytest

from omega_width.repro import (
    exact_width_fixture,
    finite_algebra_decisions,
    loop_harness,
    mmsnp_verdicts,
    run_acceptance,
    write_report,
)
from omega_width.report import ReportError, create_template_env, render_report
from omega_width.utils import envelope


@pytest.fixture
def sample_report():
    """A small report with one failing criterion."""
    return envelope(
        "report",
        {
            "seed": 42,
            "quick": True,
            "ok": False,
            "criteria": [
                {
                    "id": 1,
                    "title": "First",
                    "ok": True,
                    "details": {"b": 2, "a": 1},
                    "failures": [],
                },
                {
                    "id": 2,
                    "title": "Second",
                    "ok": False,
                    "details": {},
                    "failures": ["instance 3 disagrees"],
                },
            ],
        },
    )


class TestRenderReport:
    """Test Markdown rendering."""

    def test_table_and_failures(self, sample_report):
        text = render_report(sample_report)
        assert "Seed 42 (quick run): 1 of 2 criteria pass." in text
        assert "| 1 | First | PASS | a=1, b=2 |" in text
        assert "| 2 | Second | FAIL |" in text
        assert "## Failures in criterion 2" in text
        assert "- instance 3 disagrees" in text
        assert "Failures in criterion 1" not in text

    def test_missing_template(self, sample_report, tmp_path):
        with pytest.raises(ReportError, match="Template not found"):
            render_report(sample_report, create_template_env(tmp_path))

    def test_write_report(self, sample_report, tmp_path):
        json_path, markdown_path = write_report(sample_report, tmp_path / "report.json")
        assert markdown_path.suffix == ".md"
        assert json.loads(json_path.read_text(encoding="utf-8"))["seed"] == 42
        assert markdown_path.read_text(encoding="utf-8").startswith("# Acceptance report")


class TestCriteria:
    """Test individual acceptance criteria."""

    def test_finite_algebra_decisions(self):
        criterion = finite_algebra_decisions()
        assert criterion["id"] == 5
        assert criterion["ok"], criterion["failures"]

    def test_loop_harness(self):
        criterion = loop_harness(30, 3)
        assert criterion["ok"], criterion["failures"]
        assert criterion["details"]["trials"] == 30

    @pytest.mark.slow
    def test_mmsnp_verdicts(self):
        criterion = mmsnp_verdicts()
        assert criterion["ok"], criterion["failures"]
        assert criterion["details"]["two-coloring"] == "datalog"

    @pytest.mark.slow
    def test_exact_width_quick(self):
        criterion = exact_width_fixture(quick=True)
        assert criterion["ok"], criterion["failures"]
        assert criterion["details"]["instance_j"] == "skipped in quick runs"


@pytest.mark.slow
@pytest.mark.integration
class TestAcceptance:
    """Run the whole table in quick mode."""

    def test_quick_run_is_reproducible(self):
        seen = []
        first = run_acceptance(7, quick=True, on_criterion=lambda c: seen.append(c["id"]))
        second = run_acceptance(7, quick=True)
        assert seen == list(range(1, 9))
        assert first == second
        assert first["ok"], [c["failures"] for c in first["criteria"] if not c["ok"]]
