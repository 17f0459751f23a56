"""Objective functions and box-bounded problem definitions.

The four engineering-design problems (transistor modelling, gas production
facility, roughened solar air heater, compound gear train) plus a few
synthetic functions used as property-test substrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Sense",
    "Problem",
    "Evaluation",
    "transistor_objective",
    "gas_objective",
    "heater_objective",
    "gear_objective",
    "sphere_objective",
    "rastrigin_objective",
    "rosenbrock_objective",
    "make_problem",
    "PROBLEMS",
    "GEAR_TARGET",
]


class Sense(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


@dataclass(frozen=True)
class Evaluation:
    x: np.ndarray
    value: float


@dataclass(frozen=True, eq=False)
class Problem:
    """Box-bounded objective.

    ``objective`` returns the value in the problem's native sense. Optimizers
    work on :meth:`cost`, which is always to be minimized.
    """

    name: str
    lower: np.ndarray
    upper: np.ndarray
    objective: Callable[[np.ndarray], float]
    sense: Sense = Sense.MINIMIZE
    integral: np.ndarray = field(default=None)

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-D and of equal length")
        if not np.all(lower < upper):
            raise ValueError(f"{self.name}: every lower bound must be below its upper bound")
        integral = self.integral
        if integral is None:
            integral = np.zeros(lower.size, dtype=bool)
        integral = np.asarray(integral, dtype=bool)
        if integral.shape != lower.shape:
            raise ValueError("integral mask length does not match dimension")
        for arr in (lower, upper, integral):
            arr.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "integral", integral)
        object.__setattr__(self, "sense", Sense(self.sense))

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def worst(self) -> float:
        """Native-sense sentinel for singular or overflowing evaluations."""
        return math.inf if self.sense is Sense.MINIMIZE else -math.inf

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(
                f"{self.name}: expected a vector of length {self.dimension}, got shape {x.shape}"
            )
        return x

    def clamp(self, x) -> np.ndarray:
        return np.clip(self._check(x), self.lower, self.upper)

    def prepare(self, x) -> np.ndarray:
        """Round the integral coordinates; the result is what gets evaluated."""
        x = self._check(x)
        if self.integral.any():
            x = np.where(self.integral, np.rint(x), x)
        return x

    def evaluate(self, x) -> Evaluation:
        x = self.prepare(x)
        value = float(self.objective(x))
        if math.isnan(value):
            value = self.worst
        return Evaluation(x, value)

    def to_cost(self, value: float) -> float:
        return value if self.sense is Sense.MINIMIZE else -value

    # the map is an involution
    to_native = to_cost

    def cost(self, x) -> float:
        return self.to_cost(self.evaluate(x).value)

    def random_position(self, rng: np.random.Generator) -> np.ndarray:
        return self.lower + rng.random(self.dimension) * (self.upper - self.lower)


# --------------------------------------------------------------------------
# (A) transistor modelling

_TRANSISTOR_G = np.array(
    [
        [0.485, 0.752, 0.869, 0.982],
        [0.369, 1.254, 0.703, 1.455],
        [5.2095, 10.0677, 22.9274, 20.2153],
        [23.3037, 101.779, 111.461, 191.267],
        [28.5132, 111.8467, 134.3884, 211.4823],
    ]
)
_TRANSISTOR_G.setflags(write=False)
_TRANSISTOR_COLUMNS = tuple(tuple(float(v) for v in col) for col in _TRANSISTOR_G.T)

TRANSISTOR_VARIANTS = ("printed", "reference")


def transistor_objective(x, variant: str = "printed") -> float:
    """Least-sum-of-squares residual of the nine transistor equations.

    ``variant="printed"`` multiplies the bracketed exponential term by ``g5k``
    (and ``g5k * x1`` for beta). ``variant="reference"`` subtracts those terms
    instead, which is the form that reproduces the published solution values.
    """
    if variant not in TRANSISTOR_VARIANTS:
        raise ValueError(f"unknown transistor variant {variant!r}")
    x1, x2, x3, x4, x5, x6, x7, x8, x9 = (float(v) for v in x)
    printed = variant == "printed"
    c = 1.0 - x1 * x2
    total = (x1 * x3 - x2 * x4) ** 2
    try:
        for g1, g2, g3, g4, g5 in _TRANSISTOR_COLUMNS:
            ea = math.exp(x5 * (g1 - g3 * x7 * 1e-3 - g5 * x8 * 1e-3)) - 1.0
            eb = math.exp(x6 * (g1 - g2 - g3 * x7 * 1e-3 + g4 * x9 * 1e-3)) - 1.0
            if printed:
                alpha = c * x3 * ea * g5 + g4 * x2
                beta = c * x4 * eb * g5 * x1 + g4
            else:
                alpha = c * x3 * ea - g5 + g4 * x2
                beta = c * x4 * eb - g5 * x1 + g4
            total += alpha * alpha + beta * beta
    except OverflowError:
        return math.inf
    return total if math.isfinite(total) else math.inf


# --------------------------------------------------------------------------
# (B) gas production facility


def gas_objective(x) -> float:
    x1, x2 = float(x[0]), float(x[1])
    if x2 <= 0.0:
        return math.inf
    t = (40.0 - x1) * math.log(x2 / 200.0)
    if t <= 0.0:
        # bracket raised to -0.85 is singular at x1 = 40
        return math.inf
    return (
        61.8
        + 5.72 * x1
        + 0.2623 * t**-0.85
        + 0.087 * t
        + 700.23 * x2**-0.75
    )


# --------------------------------------------------------------------------
# (C) artificially roughened solar air heater

HEATER_VARIANTS = ("printed", "literature")


def heater_objective(x, variant: str = "printed") -> float:
    """Thermohydraulic performance (to be maximized).

    ``printed`` uses ``x3**0.53`` inside the roughness friction factor;
    ``literature`` uses ``x2**0.53`` (the relative pitch, as in ``R_M``).
    """
    x1, x2, x3 = float(x[0]), float(x[1]), float(x[2])
    if variant == "printed":
        rough = x3
    elif variant == "literature":
        rough = x2
    else:
        raise ValueError(f"unknown heater variant {variant!r}")
    if x1 <= 0.0 or x2 <= 0.0 or x3 <= 0.0:
        return -math.inf
    r_m = 0.95 * x2**0.53
    f_s = 0.079 * x3**-0.25
    denom = 0.95 * rough**0.53 + 2.5 * math.log(1.0 / (2.0 * x1)) ** 2 - 3.75
    if denom == 0.0:
        return -math.inf
    f_r = 2.0 * denom**-2
    f_bar = (f_s + f_r) / 2.0
    e_plus = x1 * x3 * math.sqrt(f_bar / 2.0)
    if e_plus <= 0.0:
        return -math.inf
    g_h = 4.5 * e_plus**0.28 * 0.7**0.57
    return 2.51 * math.log(e_plus) + 5.5 - 0.1 * r_m - g_h


# --------------------------------------------------------------------------
# (D) compound gear train

GEAR_TARGET = 1.0 / 6.931


def gear_objective(x) -> float:
    """Squared deviation of ``x1*x2 / (x3*x4)`` from 1/6.931, on rounded teeth."""
    t1, t2, t3, t4 = (float(v) for v in np.rint(np.asarray(x, dtype=float)))
    d = GEAR_TARGET - (t1 * t2) / (t3 * t4)
    return d * d


# --------------------------------------------------------------------------
# synthetic


def sphere_objective(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.dot(x, x))


def rastrigin_objective(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def rosenbrock_objective(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


# --------------------------------------------------------------------------
# registry


def _transistor(variant="printed", transistor_upper=15.0, **_):
    if variant not in TRANSISTOR_VARIANTS:
        raise ValueError(f"unknown transistor variant {variant!r}")
    return Problem(
        "transistor",
        np.zeros(9),
        np.full(9, float(transistor_upper)),
        partial(transistor_objective, variant=variant),
    )


def _gas(**_):
    return Problem("gas", [17.5, 300.0], [40.0, 600.0], gas_objective)


def _heater(variant="printed", **_):
    if variant not in HEATER_VARIANTS:
        raise ValueError(f"unknown heater variant {variant!r}")
    return Problem(
        "heater",
        [0.02, 10.0, 3000.0],
        [0.8, 40.0, 20000.0],
        partial(heater_objective, variant=variant),
        sense=Sense.MAXIMIZE,
    )


def _gear(**_):
    return Problem(
        "gear",
        np.full(4, 12.0),
        np.full(4, 60.0),
        gear_objective,
        integral=np.ones(4, dtype=bool),
    )


def _synthetic(name, func, bound):
    def build(dimension=10, **_):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        return Problem(name, np.full(dimension, -bound), np.full(dimension, bound), func)

    return build


PROBLEMS: dict[str, Callable[..., Problem]] = {
    "transistor": _transistor,
    "gas": _gas,
    "heater": _heater,
    "gear": _gear,
    "sphere": _synthetic("sphere", sphere_objective, 5.12),
    "rastrigin": _synthetic("rastrigin", rastrigin_objective, 5.12),
    "rosenbrock": _synthetic("rosenbrock", rosenbrock_objective, 2.048),
}

ENGINEERING_PROBLEMS = ("transistor", "gas", "heater", "gear")


def make_problem(
    name: str,
    *,
    heater_variant: str = "printed",
    transistor_variant: str = "printed",
    transistor_upper: float = 15.0,
    dimension: int = 10,
) -> Problem:
    """Build a registered problem by name.

    Raises
    ------
    KeyError
        If ``name`` is not registered.
    """
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}") from None
    if name == "heater":
        return factory(variant=heater_variant)
    if name == "transistor":
        return factory(variant=transistor_variant, transistor_upper=transistor_upper)
    return factory(dimension=dimension)


def registered_problems() -> Sequence[str]:
    return tuple(PROBLEMS)
