"""Select, order, and run test cases in isolated interpreter subprocesses."""

from __future__ import annotations

import json
import os
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass

from .assembler import FAIL_SENTINEL_PREFIX, PASS_SENTINEL, SKIP_SENTINEL, TestCase
from .discovery import RunConfig

PASSED = "PASSED"
FAILED = "FAILED"
SKIPPED_DISABLED = "SKIPPED_DISABLED"
SKIPPED_ASSUMPTION = "SKIPPED_ASSUMPTION"
TIMEOUT = "TIMEOUT"
ERROR = "ERROR"

FATAL_STATUSES = frozenset({FAILED, TIMEOUT, ERROR})

# Process-kill allowance on top of a declared timeout.
KILL_GRACE_SECONDS = 0.5


@dataclass
class CheckFailure:
    kind: str
    actual_expr: str
    actual_repr: str
    expected_expr: str | None = None
    expected_repr: str | None = None
    check_index: int = 0
    repetition_index: int = 0


@dataclass
class TestOutcome:
    case_id: str
    display_name: str
    status: str
    duration: float
    repetitions_run: int
    file: str
    line: int
    param_index: int
    tags: list[str]
    failure: CheckFailure | None = None
    error_detail: str | None = None


def auto_parallelism() -> int:
    return os.cpu_count() or 1


def select(
    cases: list[TestCase], config: RunConfig
) -> tuple[list[TestCase], list[TestOutcome]]:
    """Partition cases into runnable ones and pre-resolved skip outcomes.

    A case is selected iff its tags intersect the group filter (when set)
    and the name filter (when set) is a substring of its display name.
    Selected disabled cases become immediate SKIPPED_DISABLED outcomes;
    unselected cases are dropped entirely.
    """
    runnable: list[TestCase] = []
    preresolved: list[TestOutcome] = []
    group = set(config.group_tags)
    for case in cases:
        if group and not (set(case.tags) & group):
            continue
        if config.name_filter is not None and config.name_filter not in case.display_name:
            continue
        if case.disabled:
            preresolved.append(
                TestOutcome(
                    case_id=case.id,
                    display_name=case.display_name,
                    status=SKIPPED_DISABLED,
                    duration=0.0,
                    repetitions_run=0,
                    file=case.file,
                    line=case.line,
                    param_index=case.param_index,
                    tags=list(case.tags),
                )
            )
        else:
            runnable.append(case)
    return runnable, preresolved


def order_bucket(tags: list[str], order_tags: list[str]) -> int:
    """Earliest order-tag bucket matching the tag set; unmatched go last."""
    for position, tag in enumerate(order_tags):
        if tag in tags:
            return position
    return len(order_tags)


def order(cases: list[TestCase], config: RunConfig) -> list[TestCase]:
    """Stable bucket sort by order tags, then (path, line, param index)."""
    return sorted(
        cases,
        key=lambda c: (order_bucket(c.tags, config.order_tags), c.file, c.line, c.param_index),
    )


def outcome_order_key(outcome: TestOutcome, config: RunConfig):
    return (
        order_bucket(outcome.tags, config.order_tags),
        outcome.file,
        outcome.line,
        outcome.param_index,
    )


def run_case(case: TestCase, config: RunConfig) -> TestOutcome:
    """Run one case's program up to ``repeated`` times in fresh subprocesses.

    The first non-pass repetition decides the status; the sentinel printed
    by the program is authoritative, and a missing sentinel means the
    interpreter died on an uncaught error.
    """
    assert case.program_path is not None, "program file must be written first"
    command = config.interpreter_command + [case.program_path]
    duration = 0.0
    repetitions = 0

    def outcome(status: str, failure: CheckFailure | None = None,
                error_detail: str | None = None) -> TestOutcome:
        return TestOutcome(
            case_id=case.id,
            display_name=case.display_name,
            status=status,
            duration=duration,
            repetitions_run=repetitions,
            file=case.file,
            line=case.line,
            param_index=case.param_index,
            tags=list(case.tags),
            failure=failure,
            error_detail=error_detail,
        )

    for repetition in range(case.repeated):
        started = time.monotonic()
        try:
            proc = subprocess.run(
                command,
                capture_output=True,
                text=True,
                encoding="utf-8",
                errors="replace",
                timeout=case.timeout,
                env=_subprocess_env(),
                cwd=os.path.dirname(case.program_path) or None,
            )
        except FileNotFoundError:
            repetitions += 1
            return outcome(ERROR, error_detail=f"interpreter not found: {command[0]}")
        except subprocess.TimeoutExpired:
            duration += time.monotonic() - started
            repetitions += 1
            return outcome(TIMEOUT)
        duration += time.monotonic() - started
        repetitions += 1
        status, failure, error_detail = _classify(proc, repetition)
        if status != PASSED:
            if error_detail:
                # Keep reports stable across runs: the per-run directory is
                # freshly named every time.
                run_dir = os.path.dirname(case.program_path)
                error_detail = error_detail.replace(run_dir, "<run-dir>")
            return outcome(status, failure=failure, error_detail=error_detail)
    return outcome(PASSED)


def run_suite(ordered_cases: list[TestCase], config: RunConfig) -> list[TestOutcome]:
    """Run cases on a worker pool, dequeuing in the established order.

    The returned list is re-sorted into the input order so the report does
    not depend on scheduling.
    """
    if not ordered_cases:
        return []
    results: dict = {}
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        futures = {pool.submit(run_case, case, config): case.id for case in ordered_cases}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return [results[case.id] for case in ordered_cases]


def _classify(
    proc: subprocess.CompletedProcess, repetition: int
) -> tuple[str, CheckFailure | None, str | None]:
    for raw_line in reversed(proc.stdout.splitlines()):
        line = raw_line.rstrip()
        if line == PASS_SENTINEL:
            return PASSED, None, None
        if line == SKIP_SENTINEL:
            return SKIPPED_ASSUMPTION, None, None
        if line.startswith(FAIL_SENTINEL_PREFIX):
            try:
                record = json.loads(line[len(FAIL_SENTINEL_PREFIX):])
            except json.JSONDecodeError:
                return ERROR, None, f"unparsable failure record: {line!r}"
            failure = CheckFailure(
                kind=record.get("kind", "?"),
                actual_expr=record.get("actual_expr", ""),
                actual_repr=record.get("actual_repr", ""),
                expected_expr=record.get("expected_expr"),
                expected_repr=record.get("expected_repr"),
                check_index=record.get("check_index", 0),
                repetition_index=repetition,
            )
            return FAILED, failure, None
    detail = proc.stderr.strip() or f"exit code {proc.returncode} with no sentinel output"
    return ERROR, None, detail


def _subprocess_env() -> dict:
    """Minimal environment: PATH plus interpreter-essential variables."""
    env = {"PYTHONIOENCODING": "utf-8"}
    for key in ("PATH", "SYSTEMROOT", "TEMP", "TMP", "TMPDIR", "LD_LIBRARY_PATH"):
        if key in os.environ:
            env[key] = os.environ[key]
    return env
