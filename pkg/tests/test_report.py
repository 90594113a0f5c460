"""
Tests for check reports.
"""

import json

from relconv.core.checks import CheckResult
from relconv.report import Report, ReportFormat, ReportLine, Status
from relconv.utils.logger import ANSIColor


class TestReportLine:
    """Tests for ReportLine rendering."""

    def test_pass(self):
        """A passing line is just the name and PASS."""
        assert ReportLine.from_check(CheckResult.ok("A.1")).to_text() == "A.1: PASS"

    def test_fail_with_witness(self):
        """Failures show the witness and the detail."""
        line = ReportLine.from_check(CheckResult.fail("A.2", ("0", "1"), "I∘I differs from id"), "axiom")
        assert line.status is Status.FAIL
        assert line.to_text() == "A.2: FAIL (witness 0,1; I∘I differs from id)"

    def test_expected_failure(self):
        """Expected failures read FAIL (expected; ...) without the detail."""
        result = CheckResult.fail("associativity", ("0", "0", "1"), "(δa⋆δb)⋆δc differs from δa⋆(δb⋆δc)")
        line = ReportLine.from_check(result, "convolution", on_failure=Status.EXPECTED)
        assert line.to_text() == "associativity: FAIL (expected; witness 0,0,1)"

    def test_note(self):
        """Informational verdicts are marked."""
        line = ReportLine("split", Status.NOTE, "haar", "", ("0", "[0]", "[0]"))
        assert line.to_text() == "split: FAIL (informational; witness 0,[0],[0])"

    def test_color(self):
        """Colored output wraps the status word."""
        assert ReportLine("A.1", Status.PASS).to_text(color=True) == f"A.1: {ANSIColor.green('PASS')}"
        assert ANSIColor.yellow("FAIL") in ReportLine("x", Status.EXPECTED).to_text(color=True)

    def test_to_dict(self):
        """Witnesses become lists; absent witnesses are null."""
        assert ReportLine("A.1", Status.PASS, "axiom").to_dict() == {
            "name": "A.1",
            "status": "PASS",
            "tag": "axiom",
            "detail": "",
            "witness": None,
        }


class TestReport:
    """Tests for Report."""

    def _report(self):
        report = Report("verify", "z4z2.json")
        report.extend([CheckResult.ok("A.1"), CheckResult.ok("A.2")], "axiom")
        report.add_check(CheckResult.fail("associativity", ("0", "0", "1"), "x"), "convolution", Status.EXPECTED)
        return report

    def test_expected_failures_do_not_fail(self):
        """Only FAIL lines fail a report."""
        report = self._report()
        assert report.passed
        assert report.failures == []
        report.add_check(CheckResult.fail("ideal", ("iso", "0"), "nonzero on C"))
        assert not report.passed
        assert [line.name for line in report.failures] == ["ideal"]

    def test_text(self):
        """Text output ends with the verdict."""
        lines = self._report().render(ReportFormat.TEXT).splitlines()
        assert lines[0] == "A.1: PASS"
        assert lines[-1] == "result: PASS"

    def test_json(self):
        """The JSON schema is command, file, passed and checks."""
        data = json.loads(self._report().render(ReportFormat.JSON))
        assert list(data) == ["command", "file", "passed", "checks"]
        assert data["passed"] is True
        assert data["checks"][2] == {
            "name": "associativity",
            "status": "EXPECTED",
            "tag": "convolution",
            "detail": "x",
            "witness": ["0", "0", "1"],
        }
