"""Evaluation bookkeeping shared by every optimizer.

All objective calls go through an :class:`Evaluator`, which owns the NFE
counter, enforces the evaluation budget and memorizes the best point ever
evaluated together with the evaluation index at which it was found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .problems import Problem

__all__ = ["BudgetExhausted", "Evaluator", "RunResult"]


class BudgetExhausted(Exception):
    """Raised by :class:`Evaluator` when the evaluation budget is spent."""


@dataclass(frozen=True)
class RunResult:
    """Outcome of one optimizer run.

    ``best_value`` and the values in ``trace`` are in the problem's native
    sense. ``trace`` holds ``(nfe, best_value)`` at every best-so-far
    improvement.
    """

    best_x: tuple[float, ...]
    best_value: float
    nfe: int
    nfe_to_best: int
    cycles: int
    wall_time: float
    seed: int
    trace: tuple[tuple[int, float], ...] = ()
    diagnostics: dict = field(default_factory=dict)

    def same_outcome(self, other: "RunResult") -> bool:
        """Equality ignoring wall-clock time."""
        return (
            self.best_x == other.best_x
            and self.best_value == other.best_value
            and self.nfe == other.nfe
            and self.nfe_to_best == other.nfe_to_best
            and self.cycles == other.cycles
            and self.seed == other.seed
            and self.trace == other.trace
            and self.diagnostics == other.diagnostics
        )


class Evaluator:
    """Counting, budget-enforcing wrapper around ``problem.cost``."""

    def __init__(self, problem: Problem, max_nfe: int | None = None):
        self.problem = problem
        self.max_nfe = math.inf if max_nfe is None else max_nfe
        self.nfe = 0
        self.best_x: np.ndarray | None = None
        self.best_cost = math.inf
        self.nfe_to_best = 0
        self.trace: list[tuple[int, float]] = []

    @property
    def exhausted(self) -> bool:
        return self.nfe >= self.max_nfe

    def __call__(self, x) -> float:
        if self.nfe >= self.max_nfe:
            raise BudgetExhausted
        ev = self.problem.evaluate(x)
        self.nfe += 1
        cost = self.problem.to_cost(ev.value)
        if math.isnan(cost):
            cost = math.inf
        if cost < self.best_cost or self.best_x is None:
            self.best_x = ev.x.copy()
            self.best_cost = cost
            self.nfe_to_best = self.nfe
            self.trace.append((self.nfe, self.problem.to_native(cost)))
        return cost

    def result(self, cycles: int, seed: int, wall_time: float, diagnostics=None) -> RunResult:
        if self.best_x is None:
            raise RuntimeError("no evaluation was performed")
        return RunResult(
            best_x=tuple(float(v) for v in self.best_x),
            best_value=float(self.problem.to_native(self.best_cost)),
            nfe=self.nfe,
            nfe_to_best=self.nfe_to_best,
            cycles=cycles,
            wall_time=wall_time,
            seed=seed,
            trace=tuple((int(n), float(v)) for n, v in self.trace),
            diagnostics=dict(diagnostics or {}),
        )
