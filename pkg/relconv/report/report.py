"""
Report - check results rendered as text or JSON.

A report is a list of check lines. Each line has a status:

* PASS: the check holds,
* FAIL: the check fails and the run fails,
* EXPECTED: the check fails and the failure is a known consequence of
  the structure (e.g. non-associativity of a system that is not strongly split),
* NOTE: a classifier verdict that is informational only.

The JSON form is ``{"command", "file", "passed", "checks": [...]}`` with one
``{"name", "status", "tag", "detail", "witness"}`` object per line.
"""

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from relconv.core.checks import CheckResult
from relconv.utils.logger import ANSIColor

__all__ = ["Report", "ReportFormat", "ReportLine", "Status"]


class ReportFormat(Enum):
    """Supported report output formats."""

    TEXT = "text"
    JSON = "json"


class Status(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    EXPECTED = "EXPECTED"
    NOTE = "NOTE"


@dataclass(frozen=True)
class ReportLine:
    name: str
    status: Status
    tag: str = ""
    detail: str = ""
    witness: Optional[tuple[str, ...]] = None

    @classmethod
    def from_check(cls, result: CheckResult, tag: str = "", on_failure: Status = Status.FAIL) -> "ReportLine":
        status = Status.PASS if result.passed else on_failure
        return cls(result.name, status, tag, result.detail, result.witness)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "tag": self.tag,
            "detail": self.detail,
            "witness": list(self.witness) if self.witness is not None else None,
        }

    def to_text(self, color: bool = False) -> str:
        word = "PASS" if self.status is Status.PASS else "FAIL"
        shown = word
        if color:
            shown = ANSIColor.status(word) if self.status in (Status.PASS, Status.FAIL) else ANSIColor.yellow(word)
        if self.status is Status.PASS:
            return f"{self.name}: {shown}"
        notes = []
        if self.status is Status.EXPECTED:
            notes.append("expected")
        elif self.status is Status.NOTE:
            notes.append("informational")
        if self.witness is not None:
            notes.append(f"witness {','.join(self.witness)}")
        if self.detail and self.status is Status.FAIL:
            notes.append(self.detail)
        return f"{self.name}: {shown} ({'; '.join(notes)})" if notes else f"{self.name}: {shown}"


@dataclass
class Report:
    """The outcome of one CLI command."""

    command: str
    file: str
    lines: list[ReportLine] = field(default_factory=list)

    def add(self, line: ReportLine) -> ReportLine:
        self.lines.append(line)
        return line

    def add_check(self, result: CheckResult, tag: str = "", on_failure: Status = Status.FAIL) -> ReportLine:
        return self.add(ReportLine.from_check(result, tag, on_failure))

    def extend(self, results: Iterable[CheckResult], tag: str = "") -> None:
        for r in results:
            self.add_check(r, tag)

    @property
    def passed(self) -> bool:
        return all(line.status is not Status.FAIL for line in self.lines)

    @property
    def failures(self) -> Sequence[ReportLine]:
        return [line for line in self.lines if line.status is Status.FAIL]

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "file": self.file,
            "passed": self.passed,
            "checks": [line.to_dict() for line in self.lines],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self, color: bool = False) -> str:
        body = [line.to_text(color) for line in self.lines]
        verdict = "PASS" if self.passed else "FAIL"
        body.append(f"result: {ANSIColor.status(verdict) if color else verdict}")
        return "\n".join(body)

    def render(self, fmt: ReportFormat, color: bool = False) -> str:
        if fmt is ReportFormat.JSON:
            return self.to_json()
        return self.to_text(color)
