"""Command-line interface: flag parsing and pipeline driving."""

from __future__ import annotations

import argparse
import os
import shlex
import sys

from . import executor, pipeline, reporter
from .discovery import NonexistentPath, RunConfig

INTERPRETER_ENV_VAR = "ITEST_INTERPRETER"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itest-runner",
        description=(
            "Discover inline tests in Python source files, run each in an "
            "isolated interpreter process, and report pass/fail results. "
            "Only inline tests are run; unit tests of the scanned project "
            "are never touched."
        ),
    )
    parser.add_argument(
        "paths", nargs="*", default=["."],
        help="files or directories to scan (default: current directory)",
    )
    parser.add_argument(
        "--group", "--inlinetest-group", action="append", default=[],
        metavar="TAG", help="run only tests carrying one of these tags (repeatable)",
    )
    parser.add_argument(
        "--order", "--inlinetest-order", action="append", default=[],
        metavar="TAG", help="run tests with this tag first (repeatable, in priority order)",
    )
    parser.add_argument(
        "-k", dest="name_filter", default=None, metavar="EXPR",
        help="run only tests whose display name contains this substring",
    )
    parser.add_argument(
        "-n", dest="parallelism", default="1", metavar="N",
        help="number of parallel workers, or 'auto' for all CPU cores",
    )
    parser.add_argument(
        "--ignore-import-errors", "--inlinetest-ignore-import-errors",
        action="store_true",
        help="skip files whose test dependencies are not importable",
    )
    parser.add_argument(
        "--timeout", type=float, default=None, metavar="SECONDS",
        help="default per-test timeout for tests that declare none",
    )
    parser.add_argument(
        "--interpreter", default=None, metavar="CMD",
        help=f"interpreter command for generated programs "
             f"(default: ${INTERPRETER_ENV_VAR} or 'python3')",
    )
    parser.add_argument(
        "--report", default=None, metavar="PATH",
        help="write a machine-readable JSON report to this path",
    )
    parser.add_argument(
        "--list-only", action="store_true",
        help="list discovered tests and collection errors without executing",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def parse_args(argv: list[str] | None = None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.parallelism == "auto":
        workers = executor.auto_parallelism()
    else:
        try:
            workers = int(args.parallelism)
        except ValueError:
            parser.error(f"-n expects an integer or 'auto', got {args.parallelism!r}")
        if workers < 1:
            parser.error("-n expects a positive worker count")
    if args.timeout is not None and args.timeout <= 0:
        parser.error("--timeout must be positive")
    interpreter = args.interpreter or os.environ.get(INTERPRETER_ENV_VAR) or "python3"
    order_tags: list[str] = []
    for tag in args.order:
        if tag not in order_tags:
            order_tags.append(tag)
    return RunConfig(
        paths=list(args.paths),
        group_tags=list(args.group),
        order_tags=order_tags,
        name_filter=args.name_filter,
        parallelism=workers,
        ignore_import_errors=args.ignore_import_errors,
        default_timeout=args.timeout,
        interpreter_command=shlex.split(interpreter),
        report_path=args.report,
        list_only=args.list_only,
        verbose=args.verbose,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return int(exc.code or 0)
    try:
        if config.list_only:
            collection = pipeline.collect(config)
            report = pipeline.execute(collection, config)
            _print_listing(collection, report, config)
        else:
            collection, report = pipeline.run(config)
            sys.stdout.write(reporter.render_terminal(report, config.verbose))
    except NonexistentPath as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for warning in collection.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if config.report_path is not None:
        try:
            reporter.emit_json(report, config.report_path, config)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 2
    return reporter.exit_code(report)


def _print_listing(collection: pipeline.Collection, report, config: RunConfig) -> None:
    runnable, preresolved = executor.select(collection.cases, config)
    keep = {case.id for case in runnable} | {o.case_id for o in preresolved}
    ordered = executor.order(
        [case for case in collection.cases if case.id in keep], config
    )
    for case in ordered:
        line = case.id
        if case.display_name != case.id:
            line += f" - {case.display_name}"
        if case.tags:
            line += f" [tags: {', '.join(case.tags)}]"
        if case.disabled:
            line += " (disabled)"
        print(line)
    for error in report.collection_errors:
        location = error.path if error.line is None else f"{error.path}:{error.line}"
        print(f"COLLECTION-ERROR    {location} {error.reason}: {error.message}")
    print(f"{len(ordered)} tests discovered, {len(report.collection_errors)} collection errors")


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
