"""Terminal rendering, JSON report emission, and exit codes."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .discovery import RunConfig
from .executor import (
    ERROR,
    FAILED,
    FATAL_STATUSES,
    PASSED,
    SKIPPED_ASSUMPTION,
    SKIPPED_DISABLED,
    TIMEOUT,
    TestOutcome,
)

SCHEMA_VERSION = "1"

# Collection-error reason codes produced outside the extractor.
SYNTAX_ERROR = "SYNTAX_ERROR"
DECODE_ERROR = "DECODE_ERROR"
READ_ERROR = "READ_ERROR"
NO_TARGET = "NO_TARGET"
UNRESOLVED_NAME = "UNRESOLVED_NAME"
# Files skipped on request via --ignore-import-errors; informational only,
# so it never drives the exit code.
IMPORT_SKIPPED = "IMPORT_SKIPPED"


@dataclass
class CollectionError:
    path: str
    line: int | None
    reason: str
    message: str


@dataclass
class Report:
    """Aggregated, deterministic run summary."""

    outcomes: list[TestOutcome] = field(default_factory=list)
    collection_errors: list[CollectionError] = field(default_factory=list)
    wall_time: float = 0.0

    def totals(self) -> dict:
        """Counts recomputed from the underlying lists on every call."""
        counts = {
            "passed": 0,
            "failed": 0,
            "skipped_disabled": 0,
            "skipped_assumption": 0,
            "timeout": 0,
            "error": 0,
        }
        key = {
            PASSED: "passed",
            FAILED: "failed",
            SKIPPED_DISABLED: "skipped_disabled",
            SKIPPED_ASSUMPTION: "skipped_assumption",
            TIMEOUT: "timeout",
            ERROR: "error",
        }
        for outcome in self.outcomes:
            counts[key[outcome.status]] += 1
        counts["collection_errors"] = len(self.collection_errors)
        return counts


def render_terminal(report: Report, verbose: bool = False) -> str:
    """One status line per case, failure blocks, then the summary line.

    Failure blocks show the failing check, the expected repr, and the
    actual repr; stack traces never appear for assertion failures.
    """
    lines: list[str] = []
    for outcome in report.outcomes:
        line = f"{outcome.status:<19} {outcome.case_id}"
        if outcome.display_name != outcome.case_id:
            line += f" - {outcome.display_name}"
        if verbose:
            line += f" ({outcome.duration:.3f}s, {outcome.repetitions_run} run(s))"
        lines.append(line)
        if outcome.status == FAILED and outcome.failure is not None:
            f = outcome.failure
            check_text = f"check_{f.kind}({f.actual_expr}"
            if f.expected_expr is not None:
                check_text += f", {f.expected_expr}"
            check_text += ")"
            lines.append(f"    failing check: {check_text}")
            if f.expected_repr is not None:
                lines.append(f"    expected: {f.expected_repr}")
            lines.append(f"    actual:   {f.actual_repr}")
            if f.repetition_index:
                lines.append(f"    on repetition {f.repetition_index + 1}")
        elif outcome.status == ERROR and outcome.error_detail:
            detail = outcome.error_detail.splitlines()
            shown = detail if verbose else detail[-5:]
            lines.extend(f"    {text}" for text in shown)
    for error in report.collection_errors:
        location = error.path if error.line is None else f"{error.path}:{error.line}"
        lines.append(f"COLLECTION-ERROR    {location} {error.reason}: {error.message}")
    totals = report.totals()
    skipped = totals["skipped_disabled"] + totals["skipped_assumption"]
    lines.append(
        f"{totals['passed']} passed, {totals['failed']} failed, {skipped} skipped, "
        f"{totals['timeout']} timeout, {totals['error']} errors in {report.wall_time:.2f}s"
    )
    return "\n".join(lines) + "\n"


def emit_json(report: Report, path: str, config: RunConfig) -> None:
    """Write the machine-readable report; keys sorted, schema version 1."""
    document = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": {
            "paths": list(config.paths),
            "group_tags": list(config.group_tags),
            "order_tags": list(config.order_tags),
            "name_filter": config.name_filter,
            "parallelism": config.parallelism,
            "ignore_import_errors": config.ignore_import_errors,
            "default_timeout": config.default_timeout,
            "interpreter_command": list(config.interpreter_command),
            "report_path": config.report_path,
            "list_only": config.list_only,
        },
        "cases": [
            {
                "id": outcome.case_id,
                "name": outcome.display_name,
                "file": outcome.file,
                "line": outcome.line,
                "param_index": outcome.param_index,
                "tags": list(outcome.tags),
                "status": outcome.status,
                "duration_s": round(outcome.duration, 6),
                "repetitions_run": outcome.repetitions_run,
                **(
                    {"failure": dataclasses.asdict(outcome.failure)}
                    if outcome.failure is not None
                    else {}
                ),
                **(
                    {"error_detail": outcome.error_detail}
                    if outcome.error_detail is not None
                    else {}
                ),
            }
            for outcome in report.outcomes
        ],
        "collection_errors": [dataclasses.asdict(e) for e in report.collection_errors],
        "totals": report.totals(),
        "wall_time_s": round(report.wall_time, 6),
    }
    Path(path).write_text(json.dumps(document, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def exit_code(report: Report) -> int:
    """0 on a clean run, 1 on any failure/timeout/error or real collection error."""
    if any(outcome.status in FATAL_STATUSES for outcome in report.outcomes):
        return 1
    if any(error.reason != IMPORT_SKIPPED for error in report.collection_errors):
        return 1
    return 0
