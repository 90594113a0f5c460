"""Check reports."""

from relconv.report.report import Report, ReportFormat, ReportLine, Status

__all__ = ["Report", "ReportFormat", "ReportLine", "Status"]
