"""Golden-section search over a scalar scale factor.

Two interval-update rules are available:

``paper``
    Both interior points are recomputed and evaluated every iteration. When
    ``g(F1) < g(F2)`` the upper end moves to ``F1``, otherwise the lower end
    moves to ``F2``. Each iteration shrinks the interval by ``1/delta**2``, but
    the minimizer can fall outside the new interval.
``standard``
    Classical golden-section search: ``g(F1) < g(F2)`` keeps ``[a, F2]``,
    otherwise ``[F1, b]``; one interior point is reused, so each iteration
    costs one evaluation and shrinks the interval by ``1/delta``.

In both modes a tie takes the else-branch, and the point returned is the best
one actually evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "GOLDEN_RATIO",
    "GoldenSectionConfig",
    "GoldenSectionResult",
    "golden_section_search",
    "interior_points",
]

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

MODES = ("paper", "standard")


@dataclass(frozen=True)
class GoldenSectionConfig:
    a0: float = -1.0
    b0: float = 1.0
    mode: str = "paper"
    max_iters: int = 10
    width_tol: float = 0.01

    def __post_init__(self):
        if not self.a0 < self.b0:
            raise ValueError(f"need a0 < b0, got [{self.a0}, {self.b0}]")
        if self.mode not in MODES:
            raise ValueError(f"unknown golden-section mode {self.mode!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.width_tol > 0:
            raise ValueError("width_tol must be positive")


@dataclass(frozen=True)
class GoldenSectionResult:
    f_z_best: float
    value_best: float
    evaluations: int
    final_interval: tuple[float, float]
    iterations: int
    intervals: tuple[tuple[float, float], ...] = ()

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in self.intervals)


def interior_points(a: float, b: float) -> tuple[float, float]:
    step = (b - a) / GOLDEN_RATIO
    return b - step, a + step


def golden_section_search(
    g: Callable[[float], float], config: GoldenSectionConfig = GoldenSectionConfig()
) -> GoldenSectionResult:
    """Minimize ``g`` over ``[config.a0, config.b0]``.

    Stops after ``max_iters`` interval updates or once the interval width is
    at most ``width_tol``. ``intervals`` records the bracket before the first
    update and after each one.
    """
    a, b = config.a0, config.b0
    best_f, best_val = None, math.inf
    evaluations = 0

    def probe(f):
        nonlocal best_f, best_val, evaluations
        val = g(f)
        evaluations += 1
        if math.isnan(val):
            val = math.inf
        if best_f is None or val < best_val:
            best_f, best_val = f, val
        return val

    intervals = [(a, b)]
    iterations = 0
    if config.mode == "paper":
        while iterations < config.max_iters and b - a > config.width_tol:
            f1, f2 = interior_points(a, b)
            v1, v2 = probe(f1), probe(f2)
            if v1 < v2:
                b = f1
            else:
                a = f2
            iterations += 1
            intervals.append((a, b))
    else:
        f1, f2 = interior_points(a, b)
        v1, v2 = probe(f1), probe(f2)
        while iterations < config.max_iters and b - a > config.width_tol:
            if v1 < v2:
                b, f2, v2 = f2, f1, v1
                f1 = b - (b - a) / GOLDEN_RATIO
                v1 = probe(f1)
            else:
                a, f1, v1 = f1, f2, v2
                f2 = a + (b - a) / GOLDEN_RATIO
                v2 = probe(f2)
            iterations += 1
            intervals.append((a, b))

    return GoldenSectionResult(
        f_z_best=best_f,
        value_best=best_val,
        evaluations=evaluations,
        final_interval=(a, b),
        iterations=iterations,
        intervals=tuple(intervals),
    )
