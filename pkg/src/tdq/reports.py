"""Report documents: JSON is the contract, the text table is convenience."""

from __future__ import annotations

from typing import Optional

from .battery import VerificationReport

__all__ = ["build_report_document", "text_table", "exit_code_for"]


def exit_code_for(report: VerificationReport) -> int:
    """0 when no identity failed (skips allowed), 1 otherwise."""
    return 0 if report.passed else 1


def build_report_document(report: VerificationReport,
                          instance: Optional[dict] = None) -> dict:
    doc = report.to_dict()
    doc["instance"] = instance or {}
    doc["exit_code"] = exit_code_for(report)
    return doc


def text_table(report: VerificationReport) -> str:
    width = max((len(e.id) for e in report.entries), default=2) + 2
    lines = []
    for e in report.entries:
        marker = {"pass": "ok", "fail": "FAIL", "skipped-needs-Astar": "skip"}[e.status]
        lines.append(f"{e.id:<{width}} {marker:<5} {e.anchor}")
        if e.status == "fail" and e.witness:
            count = e.witness.get("violation_count")
            if count:
                lines.append(f"{'':<{width}} {'':<5} {count} violation(s); first witness kept in the JSON report")
            if "error" in e.witness:
                lines.append(f"{'':<{width}} {'':<5} error: {e.witness['error']}")
    counts = report.counts
    lines.append(
        f"total: {len(report.entries)}  pass: {counts['pass']}  "
        f"fail: {counts['fail']}  skipped: {counts['skipped-needs-Astar']}"
    )
    return "\n".join(lines)
