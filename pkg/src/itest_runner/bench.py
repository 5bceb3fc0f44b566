"""Duplication-scaling benchmark: per-test cost as the suite grows.

Copies one inline test N times for each requested duplication level, runs
the full pipeline, and reports total and per-test wall time plus the
marginal cost between consecutive levels. With ``--repeats`` each level is
measured several times and the best run is reported; scheduling noise only
ever adds time, so the minimum is the stable cost estimate. Results go to
a CSV table and a matplotlib figure rendered alongside it.
"""

from __future__ import annotations

import argparse
import csv
import shlex
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import executor, pipeline
from .discovery import RunConfig

SEED_HEADER = '''\
from inline import itest
import re


def label_of(names):
    for name in names:
        m = re.match("^(.+):\\\\d+$", name)
'''

SEED_TEST = '        itest().given(name, "a:0").check_eq(m.group(1), "a")\n'


@dataclass
class BenchRow:
    duplication: int
    test_count: int
    passed: int
    total_s: float  # best of the measured runs
    per_test_s: float
    marginal_s: float | None  # vs the previous level
    samples_s: list[float] = field(default_factory=list)


def build_corpus(directory: Path, duplication: int) -> Path:
    """Write one subject file with the seed inline test duplicated N times."""
    path = directory / f"dup_{duplication}.py"
    path.write_text(SEED_HEADER + SEED_TEST * duplication, encoding="utf-8")
    return path


def run_bench(
    duplications: list[int],
    parallelism: int,
    interpreter: list[str] | None = None,
    repeats: int = 1,
) -> list[BenchRow]:
    rows: list[BenchRow] = []
    previous: BenchRow | None = None
    for duplication in duplications:
        with tempfile.TemporaryDirectory(prefix="itest-bench-") as workdir:
            corpus = build_corpus(Path(workdir), duplication)
            config = RunConfig(
                paths=[str(corpus)],
                parallelism=parallelism,
                interpreter_command=list(interpreter) if interpreter else ["python3"],
            )
            samples: list[float] = []
            passed = test_count = 0
            for _ in range(max(repeats, 1)):
                started = time.monotonic()
                _, report = pipeline.run(config)
                samples.append(time.monotonic() - started)
                passed = report.totals()["passed"]
                test_count = len(report.outcomes)
        total = min(samples)
        marginal = None
        if previous is not None and duplication != previous.duplication:
            marginal = (total - previous.total_s) / (duplication - previous.duplication)
        row = BenchRow(
            duplication=duplication,
            test_count=test_count,
            passed=passed,
            total_s=total,
            per_test_s=total / max(duplication, 1),
            marginal_s=marginal,
            samples_s=samples,
        )
        rows.append(row)
        previous = row
    return rows


def write_csv(rows: list[BenchRow], path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["duplication", "test_count", "passed", "total_s", "per_test_s", "marginal_s"]
        )
        for row in rows:
            writer.writerow(
                [
                    row.duplication,
                    row.test_count,
                    row.passed,
                    f"{row.total_s:.4f}",
                    f"{row.per_test_s:.6f}",
                    "" if row.marginal_s is None else f"{row.marginal_s:.6f}",
                ]
            )


def write_figure(rows: list[BenchRow], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    counts = [row.test_count for row in rows]
    totals = [row.total_s for row in rows]
    per_test = [row.per_test_s for row in rows]

    fig, (ax_total, ax_per) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax_total.plot(counts, totals, marker="o", color="tab:blue")
    ax_total.set_xscale("log")
    ax_total.set_yscale("log")
    ax_total.set_xlabel("inline tests")
    ax_total.set_ylabel("total time [s]")
    ax_total.set_title("Total run time")
    ax_total.grid(True, which="both", alpha=0.3)

    ax_per.plot(counts, per_test, marker="s", color="tab:orange")
    ax_per.set_xscale("log")
    ax_per.set_xlabel("inline tests")
    ax_per.set_ylabel("time per test [s]")
    ax_per.set_title("Per-test time")
    ax_per.grid(True, which="both", alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="itest-bench",
        description="Measure inline-test runner cost under test duplication.",
    )
    parser.add_argument(
        "--dups", default="1,10,100,1000", metavar="N,N,...",
        help="comma-separated duplication levels (default: 1,10,100,1000)",
    )
    parser.add_argument(
        "-n", dest="parallelism", default="auto", metavar="N",
        help="worker count or 'auto' (default: auto)",
    )
    parser.add_argument(
        "--interpreter", default="python3", metavar="CMD",
        help="interpreter command for generated programs",
    )
    parser.add_argument(
        "--repeats", type=int, default=1, metavar="N",
        help="measured runs per level; the best one is reported (default: 1)",
    )
    parser.add_argument(
        "--out", default="bench-out", metavar="DIR",
        help="output directory for results.csv and scaling.png",
    )
    args = parser.parse_args(argv)
    try:
        duplications = [int(part) for part in args.dups.split(",") if part.strip()]
    except ValueError:
        parser.error(f"--dups expects integers, got {args.dups!r}")
    if not duplications or any(d < 1 for d in duplications):
        parser.error("--dups expects positive integers")
    if args.repeats < 1:
        parser.error("--repeats expects a positive integer")
    workers = (
        executor.auto_parallelism()
        if args.parallelism == "auto"
        else max(1, int(args.parallelism))
    )

    rows = run_bench(
        duplications, workers, shlex.split(args.interpreter), repeats=args.repeats
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    figure_path = out_dir / "scaling.png"
    write_csv(rows, csv_path)
    write_figure(rows, figure_path)

    print(f"{'dup':>6} {'tests':>7} {'total[s]':>10} {'per-test[s]':>12} {'marginal[s]':>12}")
    for row in rows:
        marginal = "-" if row.marginal_s is None else f"{row.marginal_s:.4f}"
        print(
            f"{row.duplication:>6} {row.test_count:>7} {row.total_s:>10.3f} "
            f"{row.per_test_s:>12.4f} {marginal:>12}"
        )
    print(f"wrote {csv_path} and {figure_path}")
    bad = [row for row in rows if row.passed != row.test_count]
    return 1 if bad else 0


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
