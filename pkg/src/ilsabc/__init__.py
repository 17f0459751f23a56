"""Artificial Bee Colony with golden-section onlooker search, plus baselines and a benchmark harness."""

from .colony import ColonyConfig, run
from .golden import GoldenSectionConfig, golden_section_search
from .harness import ExperimentReport, RunResult, acceleration_rate, ar_table, run_experiment
from .problems import Problem, Sense, make_problem

__all__ = [
    "ColonyConfig",
    "GoldenSectionConfig",
    "ExperimentReport",
    "Problem",
    "RunResult",
    "Sense",
    "acceleration_rate",
    "ar_table",
    "golden_section_search",
    "make_problem",
    "run",
    "run_experiment",
]

__version__ = "0.1.0"
