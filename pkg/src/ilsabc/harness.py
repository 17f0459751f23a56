"""Multi-seed experiment campaigns, summary statistics and reports."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import colony
from .baselines import DEConfig, PSOConfig, run_de, run_pso
from .colony import ColonyConfig, GoldenSectionOnlooker
from .golden import GoldenSectionConfig
from .problems import Problem, Sense, make_problem
from .tracking import RunResult

__all__ = [
    "ALGORITHMS",
    "RunResult",
    "ExperimentReport",
    "ARTable",
    "default_config",
    "run_once",
    "run_experiment",
    "summarize",
    "acceleration_rate",
    "ar_table",
    "mean_nfe_matrix",
    "nfe_to_reach",
    "write_report",
    "read_report",
    "read_csv_rows",
    "ar_from_reports",
    "report_to_dict",
    "report_from_dict",
    "CSV_COLUMNS",
]

ALGORITHMS = ("abc", "ils-abc", "de", "pso")

CSV_COLUMNS = ("problem", "algorithm", "seed", "best_value", "nfe", "nfe_to_best", "cycles", "wall_time_s")

REPORT_FORMATS = ("csv", "json")


def default_config(algorithm: str, **overrides):
    """Default configuration object for ``algorithm`` with field overrides.

    Overrides that the algorithm's config does not know are ignored, so one
    set of command-line options can drive every algorithm.
    """
    if algorithm in ("abc", "ils-abc"):
        cls = ColonyConfig
    elif algorithm == "de":
        cls = DEConfig
    elif algorithm == "pso":
        cls = PSOConfig
    else:
        raise KeyError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    names = {f.name for f in dataclasses.fields(cls)}
    return cls(**{k: v for k, v in overrides.items() if k in names and v is not None})


def run_once(
    problem: Problem,
    algorithm: str,
    config=None,
    seed: int = 0,
    gs: GoldenSectionConfig | None = None,
) -> RunResult:
    """One seeded run; ``config.rng_seed`` is replaced by ``seed``."""
    if config is None:
        config = default_config(algorithm)
    config = dataclasses.replace(config, rng_seed=seed)
    if algorithm == "abc":
        return colony.run(problem, config)
    if algorithm == "ils-abc":
        return colony.run(problem, config, update=GoldenSectionOnlooker(gs or GoldenSectionConfig()))
    if algorithm == "de":
        return run_de(problem, config)
    if algorithm == "pso":
        return run_pso(problem, config)
    raise KeyError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")


def summarize(values: Sequence[float]) -> tuple[float, float, float, float]:
    """Mean, sample standard deviation (0 for a single value), min and max."""
    values = [float(v) for v in values]
    if not values:
        raise ValueError("cannot summarize an empty sequence")
    if len(values) == 1:
        return values[0], 0.0, values[0], values[0]
    if all(map(math.isfinite, values)):
        mean, std = statistics.fmean(values), statistics.stdev(values)
    else:  # sentinel values; statistics cannot take infinities
        with np.errstate(invalid="ignore"):
            mean, std = float(np.mean(values)), float(np.std(values, ddof=1))
    return mean, std, min(values), max(values)


@dataclass
class ExperimentReport:
    problem: str
    algorithm: str
    sense: str
    config: dict
    runs: list[RunResult] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        return [r.best_value for r in self.runs]

    @property
    def mean_value(self) -> float:
        return summarize(self.values)[0]

    @property
    def std_value(self) -> float:
        return summarize(self.values)[1]

    @property
    def best_value(self) -> float:
        _, _, lo, hi = summarize(self.values)
        return hi if self.sense == Sense.MAXIMIZE.value else lo

    @property
    def mean_nfe(self) -> float:
        return summarize([r.nfe for r in self.runs])[0]

    @property
    def mean_nfe_to_best(self) -> float:
        return summarize([r.nfe_to_best for r in self.runs])[0]

    @property
    def mean_cycles(self) -> float:
        return summarize([r.cycles for r in self.runs])[0]

    @property
    def mean_time(self) -> float:
        return summarize([r.wall_time for r in self.runs])[0]

    def same_outcome(self, other: "ExperimentReport") -> bool:
        """Equality ignoring wall-clock times."""
        return (
            (self.problem, self.algorithm, self.sense, self.config)
            == (other.problem, other.algorithm, other.sense, other.config)
            and len(self.runs) == len(other.runs)
            and all(a.same_outcome(b) for a, b in zip(self.runs, other.runs))
        )


def run_experiment(
    problem: Problem | str,
    algorithm: str,
    config=None,
    n_runs: int = 25,
    base_seed: int = 1,
    gs: GoldenSectionConfig | None = None,
    jobs: int = 1,
    progress: Callable[[int, RunResult], None] | None = None,
) -> ExperimentReport:
    """Run ``n_runs`` independent runs with seeds ``base_seed + index``.

    Runs may execute on ``jobs`` worker threads; results are collected by run
    index, so the report does not depend on scheduling.
    """
    if isinstance(problem, str):
        problem = make_problem(problem)
    if algorithm not in ALGORITHMS:
        raise KeyError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    if n_runs < 1:
        raise ValueError("n_runs must be positive")
    if config is None:
        config = default_config(algorithm)
    if algorithm == "ils-abc" and gs is None:
        gs = GoldenSectionConfig()

    def one(index):
        result = run_once(problem, algorithm, config, base_seed + index, gs)
        if progress is not None:
            progress(index, result)
        return result

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(one, range(n_runs)))
    else:
        runs = [one(i) for i in range(n_runs)]

    snapshot = dataclasses.asdict(config)
    snapshot.pop("rng_seed", None)
    snapshot["base_seed"] = base_seed
    if algorithm == "ils-abc":
        snapshot["golden_section"] = dataclasses.asdict(gs)
    return ExperimentReport(problem.name, algorithm, problem.sense.value, snapshot, runs)


def nfe_to_reach(result: RunResult, target: float, sense: str = "minimize") -> int | None:
    """First NFE at which the best-so-far value reached ``target``."""
    for nfe, value in result.trace:
        if (value <= target) if sense == "minimize" else (value >= target):
            return nfe
    return None


# --------------------------------------------------------------------------
# acceleration rate


def acceleration_rate(nfe_one: float, nfe_other: float) -> float:
    """Percentage of evaluations ``other`` saves relative to ``one``."""
    if nfe_one <= 0:
        raise ValueError("reference NFE must be positive")
    return (nfe_one - nfe_other) / nfe_one * 100.0


@dataclass(frozen=True)
class ARTable:
    problems: tuple[str, ...]
    baselines: tuple[str, ...]
    reference: str
    rates: dict  # (problem, baseline) -> AR percent
    averages: dict  # baseline -> mean AR

    def format(self, digits: int = 1, labels: Mapping[str, str] | None = None) -> str:
        labels = labels or {}
        head = ["problem"] + [f"{b} vs {self.reference}" for b in self.baselines]
        rows = [
            [labels.get(p, p)] + [f"{self.rates[p, b]:.{digits}f}" for b in self.baselines]
            for p in self.problems
        ]
        rows.append(["average"] + [f"{self.averages[b]:.{digits}f}" for b in self.baselines])
        widths = [max(len(r[c]) for r in [head] + rows) for c in range(len(head))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in [head] + rows]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "reference": self.reference,
            "problems": list(self.problems),
            "baselines": list(self.baselines),
            "rates": {p: {b: self.rates[p, b] for b in self.baselines} for p in self.problems},
            "averages": dict(self.averages),
        }


def ar_table(mean_nfe: Mapping[str, Mapping[str, float]], reference: str = "ils-abc") -> ARTable:
    """AR of every algorithm against ``reference``, per problem plus column means.

    ``mean_nfe`` maps algorithm -> problem -> mean NFE.
    """
    if reference not in mean_nfe:
        raise ValueError(f"reference algorithm {reference!r} missing")
    problems = tuple(mean_nfe[reference])
    for alg, per_problem in mean_nfe.items():
        if set(per_problem) != set(problems):
            raise ValueError(f"problem set of {alg!r} does not match {reference!r}")
    baselines = tuple(a for a in mean_nfe if a != reference)
    rates = {
        (p, b): acceleration_rate(mean_nfe[b][p], mean_nfe[reference][p])
        for p in problems
        for b in baselines
    }
    averages = {b: float(np.mean([rates[p, b] for p in problems])) for b in baselines}
    return ARTable(problems, baselines, reference, rates, averages)


def mean_nfe_matrix(reports: Sequence[ExperimentReport]) -> dict[str, dict[str, float]]:
    matrix: dict[str, dict[str, float]] = {}
    for rep in reports:
        matrix.setdefault(rep.algorithm, {})[rep.problem] = rep.mean_nfe
    return matrix


# --------------------------------------------------------------------------
# serialization


def _num(x) -> str:
    return format(float(x), ".17g") if isinstance(x, float) else str(x)


def report_to_dict(report: ExperimentReport) -> dict:
    return {
        "problem": report.problem,
        "algorithm": report.algorithm,
        "sense": report.sense,
        "config": report.config,
        "summary": {
            "mean_value": report.mean_value,
            "std_value": report.std_value,
            "best_value": report.best_value,
            "mean_nfe": report.mean_nfe,
            "mean_nfe_to_best": report.mean_nfe_to_best,
            "mean_time": report.mean_time,
        },
        "runs": [
            {
                "seed": r.seed,
                "best_x": list(r.best_x),
                "best_value": r.best_value,
                "nfe": r.nfe,
                "nfe_to_best": r.nfe_to_best,
                "cycles": r.cycles,
                "wall_time": r.wall_time,
                "trace": [list(t) for t in r.trace],
                "diagnostics": r.diagnostics,
            }
            for r in report.runs
        ],
    }


def report_from_dict(data: dict) -> ExperimentReport:
    runs = [
        RunResult(
            best_x=tuple(float(v) for v in r["best_x"]),
            best_value=float(r["best_value"]),
            nfe=int(r["nfe"]),
            nfe_to_best=int(r["nfe_to_best"]),
            cycles=int(r["cycles"]),
            wall_time=float(r["wall_time"]),
            seed=int(r["seed"]),
            trace=tuple((int(n), float(v)) for n, v in r["trace"]),
            diagnostics=dict(r.get("diagnostics", {})),
        )
        for r in data["runs"]
    ]
    return ExperimentReport(data["problem"], data["algorithm"], data["sense"], data["config"], runs)


def _csv_rows(report: ExperimentReport) -> list[list[str]]:
    rows = [
        [report.problem, report.algorithm, str(r.seed), _num(r.best_value), str(r.nfe),
         str(r.nfe_to_best), str(r.cycles), _num(r.wall_time)]
        for r in report.runs
    ]
    rows.append([
        report.problem, report.algorithm, "mean", _num(report.mean_value), _num(report.mean_nfe),
        _num(report.mean_nfe_to_best), _num(report.mean_cycles), _num(report.mean_time),
    ])
    return rows


def write_report(report: ExperimentReport | Sequence[ExperimentReport], fmt: str, path) -> None:
    """Write one or several reports as CSV or JSON.

    CSV has one row per run followed by a summary row (``seed == "mean"``)
    per report. JSON holds a single object, or a list for several reports.
    """
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; choose from {', '.join(REPORT_FORMATS)}")
    reports = [report] if isinstance(report, ExperimentReport) else list(report)
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "csv":
                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS)
                for rep in reports:
                    writer.writerows(_csv_rows(rep))
            else:
                payload = [report_to_dict(r) for r in reports]
                json.dump(payload[0] if isinstance(report, ExperimentReport) else payload, fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report to {path}: {exc.strerror}") from exc


def read_report(path) -> ExperimentReport | list[ExperimentReport]:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, list):
        return [report_from_dict(d) for d in data]
    return report_from_dict(data)


def read_csv_rows(path) -> list[dict]:
    """Parse a CSV report; numeric columns come back as numbers."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for key in ("best_value", "wall_time_s"):
            row[key] = float(row[key])
        for key in ("nfe", "nfe_to_best", "cycles"):
            row[key] = float(row[key]) if row["seed"] == "mean" else int(row[key])
        if row["seed"] != "mean":
            row["seed"] = int(row["seed"])
    return rows


def ar_from_reports(reports: Sequence[ExperimentReport], reference: str = "ils-abc") -> ARTable:
    return ar_table(mean_nfe_matrix(reports), reference)
