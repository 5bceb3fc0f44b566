"""Path resolution and source loading for the inline-test pipeline."""

from __future__ import annotations

import ast
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator


class NonexistentPath(Exception):
    """A path argument does not exist on the filesystem (usage error, exit 2)."""

    def __init__(self, argument: str):
        super().__init__(f"path does not exist: {argument}")
        self.argument = argument


@dataclass
class RunConfig:
    """Resolved configuration for one run.

    ``parallelism`` is always a concrete worker count here; the CLI resolves
    ``auto`` to the logical CPU count before constructing the config.
    """

    paths: list[str] = field(default_factory=lambda: ["."])
    group_tags: list[str] = field(default_factory=list)
    order_tags: list[str] = field(default_factory=list)
    name_filter: str | None = None
    parallelism: int = 1
    ignore_import_errors: bool = False
    default_timeout: float | None = None
    interpreter_command: list[str] = field(default_factory=lambda: ["python3"])
    report_path: str | None = None
    list_only: bool = False
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if len(set(self.order_tags)) != len(self.order_tags):
            raise ValueError("order tags must be distinct")
        if self.default_timeout is not None and self.default_timeout <= 0:
            raise ValueError("default timeout must be positive")


@dataclass
class SourceFile:
    """A subject file with its parsed syntax tree."""

    path: str
    text: str
    tree: ast.Module


def resolve_paths(config: RunConfig) -> list[str]:
    """Expand path arguments into the sorted, de-duplicated list of files to scan.

    Directories are walked recursively for ``.py`` files; explicit file
    arguments are kept regardless of extension. Hidden directories are
    skipped and symlinked directories are visited at most once per real
    path. The result is independent of argument order.
    """
    candidates: list[str] = []
    for argument in config.paths:
        p = Path(argument)
        if not p.exists():
            raise NonexistentPath(argument)
        if p.is_dir():
            candidates.extend(os.path.normpath(str(f)) for f in _walk_py(p))
        else:
            candidates.append(os.path.normpath(str(p)))
    # De-duplicate aliases of the same real file, keeping the lexicographically
    # smallest spelling so the choice does not depend on argument order.
    chosen: dict[str, str] = {}
    for display in candidates:
        real = os.path.realpath(display)
        current = chosen.get(real)
        if current is None or display < current:
            chosen[real] = display
    return sorted(chosen.values())


def _walk_py(root: Path) -> Iterator[Path]:
    seen = {os.path.realpath(root)}
    for dirpath, dirnames, filenames in os.walk(root, followlinks=True):
        kept = []
        for name in sorted(dirnames):
            if name.startswith("."):
                continue
            real = os.path.realpath(os.path.join(dirpath, name))
            if real in seen:
                continue
            seen.add(real)
            kept.append(name)
        dirnames[:] = kept
        for name in filenames:
            if name.endswith(".py"):
                yield Path(dirpath) / name


def load_source(path: str) -> SourceFile:
    """Read and parse one subject file.

    Raises ``UnicodeDecodeError`` for non-UTF-8 content and ``SyntaxError``
    for unparsable files; callers record either as a collection error.
    """
    text = Path(path).read_bytes().decode("utf-8")
    tree = ast.parse(text, filename=str(path))
    return SourceFile(path=str(path), text=text, tree=tree)
