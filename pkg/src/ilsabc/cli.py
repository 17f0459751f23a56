"""Command-line interface: ``ilsabc run | table2 | list``.

Exit status is 0 on success, 2 for usage errors and 3 for runtime errors.
Reports go to ``--out``; progress lines go to standard error.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys
from pathlib import Path

from .golden import MODES, GoldenSectionConfig
from .harness import ALGORITHMS, REPORT_FORMATS, ar_from_reports, default_config, run_experiment, write_report
from .problems import ENGINEERING_PROBLEMS, HEATER_VARIANTS, TRANSISTOR_VARIANTS, make_problem, registered_problems

USAGE_ERROR = 2
RUNTIME_ERROR = 3

PROBLEM_LABELS = {name: f"{letter} ({name})" for letter, name in zip("ABCD", ENGINEERING_PROBLEMS)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="file of key=value lines mirroring these flags")
    p.add_argument("--runs", type=_positive, default=25)
    p.add_argument("--seed", type=int, default=1, help="base seed; run i uses seed + i")
    p.add_argument("--colony", type=_positive, help="colony, DE population and PSO swarm size (40)")
    p.add_argument("--limit", type=_positive, help="scout stagnation limit (100)")
    p.add_argument("--cycles", type=int, help="maximum cycles or generations (10000)")
    p.add_argument("--nfe-budget", type=_positive, help="maximum objective evaluations per run (100000)")
    p.add_argument("--diversity-tol", type=float, help="stop once the population spread falls below this; 0 disables")
    p.add_argument("--perturb", choices=("single", "all"), help="coordinates moved per bee update")
    p.add_argument("--gs-mode", choices=MODES, default="paper")
    p.add_argument("--gs-iters", type=_positive, default=10)
    p.add_argument("--gs-tol", type=float, default=0.01)
    p.add_argument("--heater-variant", choices=HEATER_VARIANTS, default="printed")
    p.add_argument("--transistor-variant", choices=TRANSISTOR_VARIANTS, default="printed")
    p.add_argument("--transistor-upper", type=float, default=15.0)
    p.add_argument("--dimension", type=_positive, default=10, help="dimension of the synthetic problems")
    p.add_argument("--jobs", type=_positive, default=1, help="worker threads per experiment")
    p.add_argument("--format", choices=REPORT_FORMATS, default="csv")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--quiet", action="store_true", help="suppress progress on standard error")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ilsabc", description="Bee colony optimizers and benchmark campaigns.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one or more experiments and write a report")
    run.add_argument("--problem", default="all", help="problem name or 'all' for the engineering set")
    run.add_argument("--algorithm", default="all", help="algorithm name or 'all'")
    _add_common(run)

    table2 = sub.add_parser("table2", help="all algorithms on the engineering set, AR against ils-abc")
    _add_common(table2)

    sub.add_parser("list", help="list problems and algorithms")
    return parser


def read_config(path: str) -> list[str]:
    """Turn ``key = value`` lines into ``--key value`` arguments."""
    args = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    for number, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("_", "-"), value.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{number}: expected key=value, got {line!r}")
        if key == "config":
            raise UsageError(f"{path}:{number}: nested config files are not supported")
        args.append(f"--{key}")
        if key != "quiet":
            args.extend(shlex.split(value))
    return args


def expand_config(argv: list[str]) -> list[str]:
    """Insert the flags of a ``--config`` file right after the subcommand.

    Flags given on the command line come later and therefore win.
    """
    path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if path is None or not argv:
        return argv
    return argv[:1] + read_config(path) + argv[1:]


def _select(value: str, known, kind: str) -> list[str]:
    if value == "all":
        return list(known)
    names = [v.strip() for v in value.split(",")]
    for name in names:
        if name not in known:
            raise UsageError(f"unknown {kind} {name!r}; choose from {', '.join(known)} or 'all'")
    return names


def _check_writable(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write report to {path}: directory is missing or read-only")
    if os.path.isdir(path):
        raise OSError(f"cannot write report to {path}: is a directory")


def _campaign(args, problems, algorithms):
    overrides = dict(
        colony_size=args.colony,
        population=args.colony,
        swarm=args.colony,
        limit=args.limit,
        max_cycles=args.cycles,
        max_nfe=args.nfe_budget,
        diversity_tol=args.diversity_tol,
        perturb_mode=args.perturb,
    )
    gs = GoldenSectionConfig(mode=args.gs_mode, max_iters=args.gs_iters, width_tol=args.gs_tol)
    reports = []
    for name in problems:
        problem = make_problem(
            name,
            heater_variant=args.heater_variant,
            transistor_variant=args.transistor_variant,
            transistor_upper=args.transistor_upper,
            dimension=args.dimension,
        )
        for algorithm in algorithms:
            config = default_config(algorithm, **overrides)

            def progress(index, result, name=name, algorithm=algorithm):
                if not args.quiet:
                    print(
                        f"{name} {algorithm} run {index + 1}/{args.runs} seed {result.seed}: "
                        f"best {result.best_value:.6g} nfe {result.nfe}",
                        file=sys.stderr,
                    )

            reports.append(
                run_experiment(problem, algorithm, config, args.runs, args.seed,
                               gs if algorithm == "ils-abc" else None, args.jobs, progress)
            )
    return reports


def _summary_line(report) -> str:
    return (
        f"{report.problem:>11} {report.algorithm:>8}  best {report.best_value:.6g}  "
        f"mean {report.mean_value:.6g}  std {report.std_value:.3g}  mean nfe {report.mean_nfe:.0f}"
    )


def cmd_list(args) -> int:
    print("problems:", " ".join(registered_problems()))
    print("engineering set:", " ".join(ENGINEERING_PROBLEMS))
    print("algorithms:", " ".join(ALGORITHMS))
    return 0


def cmd_run(args) -> int:
    problems = _select(args.problem, registered_problems(), "problem")
    if args.problem == "all":
        problems = list(ENGINEERING_PROBLEMS)
    algorithms = _select(args.algorithm, ALGORITHMS, "algorithm")
    if args.out:
        _check_writable(args.out)
    reports = _campaign(args, problems, algorithms)
    if args.out:
        write_report(reports[0] if len(reports) == 1 else reports, args.format, args.out)
    for report in reports:
        print(_summary_line(report))
    return 0


def cmd_table2(args) -> int:
    if args.out:
        _check_writable(args.out)
    reports = _campaign(args, ENGINEERING_PROBLEMS, ALGORITHMS)
    if args.out:
        write_report(reports, args.format, args.out)
    print(ar_from_reports(reports).format(labels=PROBLEM_LABELS))
    return 0


COMMANDS = {"run": cmd_run, "table2": cmd_table2, "list": cmd_list}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(expand_config(argv))
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (OSError, ValueError, KeyError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
