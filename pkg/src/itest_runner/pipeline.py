"""End-to-end orchestration: discovery, collection, execution, reporting."""

from __future__ import annotations

import shutil
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import assembler, discovery, executor, extractor, finder, reporter
from .assembler import TestCase, UnresolvedNameError, generate_program, program_file_name
from .discovery import RunConfig
from .extractor import MalformedError, NoTargetError
from .reporter import CollectionError, Report


@dataclass
class Collection:
    cases: list[TestCase] = field(default_factory=list)
    errors: list[CollectionError] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def collect(config: RunConfig) -> Collection:
    """Scan all subject files and build the expanded, generated test cases.

    Per-file problems (syntax errors, malformed tests, unresolved names)
    become collection errors without aborting the run. With
    ``ignore_import_errors``, a file whose copied imports fail the probe is
    dropped wholesale and noted once.
    """
    collection = Collection()
    probe_cache: dict = {}
    used_ids: dict = {}
    for path in discovery.resolve_paths(config):
        try:
            source = discovery.load_source(path)
        except UnicodeDecodeError as exc:
            collection.errors.append(
                CollectionError(path, None, reporter.DECODE_ERROR, str(exc))
            )
            continue
        except SyntaxError as exc:
            collection.errors.append(
                CollectionError(path, exc.lineno, reporter.SYNTAX_ERROR, exc.msg or "syntax error")
            )
            continue
        except OSError as exc:
            collection.errors.append(
                CollectionError(path, None, reporter.READ_ERROR, str(exc))
            )
            continue
        file_cases: list[TestCase] = []
        file_errors: list[CollectionError] = []
        file_warnings: list[str] = []
        import_skip: UnresolvedNameError | None = None
        for raw in finder.find_inline_tests(source):
            try:
                target = (
                    extractor.resolve_target(raw, source)
                    if raw.is_expression_statement
                    else None
                )
                decl = extractor.extract_declaration(raw, source, target)
                count = extractor.validate_parameterization(decl)
                support = assembler.resolve_dependencies(decl, source, probe_cache)
            except MalformedError as exc:
                file_errors.append(CollectionError(exc.path, exc.line, exc.reason, exc.message))
                continue
            except NoTargetError as exc:
                file_errors.append(
                    CollectionError(exc.path, exc.line, reporter.NO_TARGET, str(exc))
                )
                continue
            except UnresolvedNameError as exc:
                if exc.missing_module is not None and config.ignore_import_errors:
                    import_skip = exc
                    break
                file_errors.append(
                    CollectionError(exc.path, exc.line, reporter.UNRESOLVED_NAME, str(exc))
                )
                continue
            for variable in extractor.unused_given_variables(decl):
                file_warnings.append(
                    f"{decl.path}:{decl.line}: given variable {variable!r} is not read "
                    "by the target statement"
                )
            file_cases.extend(
                assembler.expand(decl, count, support, config.default_timeout)
            )
        if import_skip is not None:
            collection.errors.append(
                CollectionError(
                    path,
                    import_skip.line,
                    reporter.IMPORT_SKIPPED,
                    f"file skipped: module {import_skip.missing_module!r} is not "
                    "importable (--ignore-import-errors)",
                )
            )
            continue
        for case in file_cases:
            occurrence = used_ids.get(case.id, 0)
            used_ids[case.id] = occurrence + 1
            if occurrence:  # two chains on one physical line
                case.id = f"{case.id}#{occurrence + 1}"
        collection.cases.extend(file_cases)
        collection.errors.extend(file_errors)
        collection.warnings.extend(file_warnings)
    return collection


def execute(collection: Collection, config: RunConfig) -> Report:
    """Select, order, and run the collected cases; outcomes in report order."""
    started = time.monotonic()
    runnable, preresolved = executor.select(collection.cases, config)
    ordered = executor.order(runnable, config)
    outcomes = list(preresolved)
    if ordered and not config.list_only:
        run_dir = tempfile.mkdtemp(prefix="itest-run-")
        try:
            for case in ordered:
                program_path = Path(run_dir) / program_file_name(case.id)
                program_path.write_text(generate_program(case), encoding="utf-8")
                case.program_path = str(program_path)
            outcomes.extend(executor.run_suite(ordered, config))
        finally:
            shutil.rmtree(run_dir, ignore_errors=True)
    outcomes.sort(key=lambda outcome: executor.outcome_order_key(outcome, config))
    return Report(
        outcomes=outcomes,
        collection_errors=list(collection.errors),
        wall_time=time.monotonic() - started,
    )


def run(config: RunConfig) -> tuple[Collection, Report]:
    """Collect and execute in one step; wall time covers both phases."""
    started = time.monotonic()
    collection = collect(config)
    report = execute(collection, config)
    report.wall_time = time.monotonic() - started
    return collection, report
