from __future__ import annotations

import sys
import textwrap
from pathlib import Path

from itest_runner.discovery import RunConfig

CORPUS = Path(__file__).parent / "corpus"


def make_config(paths, **overrides) -> RunConfig:
    """RunConfig for tests; generated programs run under this interpreter."""
    overrides.setdefault("interpreter_command", [sys.executable])
    return RunConfig(paths=[str(p) for p in paths], **overrides)


def write_source(directory: Path, name: str, text: str) -> Path:
    path = directory / name
    path.write_text(textwrap.dedent(text), encoding="utf-8")
    return path


def line_of(path: Path, needle: str) -> int:
    """1-based number of the first line containing ``needle``."""
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if needle in line:
            return number
    raise AssertionError(f"{needle!r} not found in {path}")


def outcomes_by_id(report) -> dict:
    return {outcome.case_id: outcome for outcome in report.outcomes}
