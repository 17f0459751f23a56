"""Artificial Bee Colony engine and the golden-section onlooker variant.

A cycle runs the employed phase, computes the roulette probabilities, runs
the onlooker phase with an injectable update strategy, and finally lets at
most one scout replace the most stagnant food source. Every phase mutates the
:class:`ColonyState` in place and returns it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .golden import GoldenSectionConfig, GoldenSectionResult, golden_section_search
from .problems import Problem
from .tracking import BudgetExhausted, Evaluator, RunResult

__all__ = [
    "ColonyConfig",
    "FoodSource",
    "ColonyState",
    "fitness_of",
    "mutate",
    "initialize_colony",
    "employed_phase",
    "selection_probabilities",
    "roulette",
    "onlooker_phase",
    "scout_phase",
    "canonical_update",
    "ils_onlooker_update",
    "GoldenSectionOnlooker",
    "sign_memory_update",
    "run",
]

PERTURB_MODES = ("single", "all")


@dataclass(frozen=True)
class ColonyConfig:
    colony_size: int = 40
    limit: int = 100
    max_cycles: int = 10000
    max_nfe: int = 100_000
    diversity_tol: float = 1e-4
    onlooker_count: Optional[int] = None
    perturb_mode: str = "single"
    rng_seed: int = 0

    def __post_init__(self):
        if self.colony_size < 1:
            raise ValueError("colony_size must be positive")
        if self.limit < 1:
            raise ValueError("limit must be positive")
        if self.max_cycles < 0:
            raise ValueError("max_cycles must be non-negative")
        if self.max_nfe < self.colony_size:
            raise ValueError("max_nfe must cover at least the initial colony")
        if self.diversity_tol < 0:
            raise ValueError("diversity_tol must be non-negative (0 disables the rule)")
        if self.onlooker_count is not None and self.onlooker_count < 1:
            raise ValueError("onlooker_count must be positive")
        if self.perturb_mode not in PERTURB_MODES:
            raise ValueError(f"unknown perturb_mode {self.perturb_mode!r}")

    @property
    def onlookers(self) -> int:
        return self.colony_size if self.onlooker_count is None else self.onlooker_count


def fitness_of(value: float) -> float:
    """Map a minimization-scale value to a non-negative fitness."""
    if math.isnan(value) or value == math.inf:
        return 0.0
    if value >= 0:
        return 1.0 / (1.0 + value)
    return 1.0 + abs(value)


@dataclass
class FoodSource:
    position: np.ndarray
    value: float
    fitness: float = field(init=False)
    trials: int = 0

    def __post_init__(self):
        self.fitness = fitness_of(self.value)

    def replace(self, position: np.ndarray, value: float) -> None:
        self.position = position
        self.value = value
        self.fitness = fitness_of(value)
        self.trials = 0

    def copy(self) -> "FoodSource":
        return FoodSource(self.position.copy(), self.value, self.trials)


@dataclass
class ColonyState:
    sources: list[FoodSource]
    evaluator: Evaluator
    cycle: int = 0
    sign_memory: Optional[float] = None
    negative_successes: int = 0

    @property
    def nfe(self) -> int:
        return self.evaluator.nfe

    @property
    def best(self) -> FoodSource:
        """Best food source ever evaluated (position as evaluated)."""
        ev = self.evaluator
        return FoodSource(ev.best_x.copy(), ev.best_cost)

    def evaluate(self, x) -> float:
        return self.evaluator(x)

    def greedy(self, i: int, candidate: np.ndarray, value: float) -> bool:
        """Tournament between source ``i`` and ``candidate``; returns acceptance."""
        src = self.sources[i]
        if fitness_of(value) > src.fitness:
            src.replace(candidate, value)
            return True
        src.trials += 1
        return False

    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.sources])


def mutate(x_i, x_k, dims, phi, problem: Problem | None = None) -> np.ndarray:
    """``v_j = x_ij + phi_j (x_ij - x_kj)`` on ``dims``; other coordinates copied."""
    x_i = np.asarray(x_i, dtype=float)
    x_k = np.asarray(x_k, dtype=float)
    v = x_i.copy()
    v[dims] = x_i[dims] + np.asarray(phi, dtype=float) * (x_i[dims] - x_k[dims])
    if problem is not None:
        v = problem.clamp(v)
    return v


def _partner(i: int, size: int, rng: np.random.Generator) -> int:
    k = int(rng.integers(size - 1))
    return k + 1 if k >= i else k


def _dims(n: int, config: ColonyConfig, rng: np.random.Generator) -> np.ndarray:
    if config.perturb_mode == "all":
        return np.arange(n)
    return np.array([int(rng.integers(n))])


def initialize_colony(
    problem: Problem,
    config: ColonyConfig,
    rng: np.random.Generator,
    evaluator: Evaluator | None = None,
) -> ColonyState:
    if evaluator is None:
        evaluator = Evaluator(problem, config.max_nfe)
    sources = []
    for _ in range(config.colony_size):
        x = problem.random_position(rng)
        sources.append(FoodSource(x, evaluator(x)))
    return ColonyState(sources, evaluator)


def canonical_update(state: ColonyState, i: int, problem: Problem, config: ColonyConfig, rng) -> int:
    """One random-step move of source ``i`` followed by greedy selection."""
    size = len(state.sources)
    if size < 2:
        # no partner to learn from
        state.sources[i].trials += 1
        return 0
    x_i = state.sources[i].position
    k = _partner(i, size, rng)
    dims = _dims(problem.dimension, config, rng)
    phi = rng.uniform(-1.0, 1.0, dims.size)
    v = mutate(x_i, state.sources[k].position, dims, phi, problem)
    state.greedy(i, v, state.evaluate(v))
    return 1


def employed_phase(state: ColonyState, problem: Problem, config: ColonyConfig, rng) -> ColonyState:
    for i in range(len(state.sources)):
        canonical_update(state, i, problem, config, rng)
    return state


def selection_probabilities(state_or_fitness) -> np.ndarray:
    if isinstance(state_or_fitness, ColonyState):
        fit = np.array([s.fitness for s in state_or_fitness.sources])
    else:
        fit = np.asarray(state_or_fitness, dtype=float)
    total = fit.sum()
    if not total > 0 or not math.isfinite(total):
        return np.full(fit.size, 1.0 / fit.size)
    return fit / total


def roulette(probs: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(idx, probs.size - 1)


UpdateStrategy = Callable[[ColonyState, int, Problem, ColonyConfig, np.random.Generator], int]


def onlooker_phase(
    state: ColonyState,
    problem: Problem,
    config: ColonyConfig,
    rng,
    update: UpdateStrategy = canonical_update,
) -> ColonyState:
    probs = selection_probabilities(state)
    for _ in range(config.onlookers):
        update(state, roulette(probs, rng), problem, config, rng)
    return state


def scout_phase(state: ColonyState, problem: Problem, config: ColonyConfig, rng) -> ColonyState:
    trials = [s.trials for s in state.sources]
    i = int(np.argmax(trials))
    if trials[i] >= config.limit:
        x = problem.random_position(rng)
        state.sources[i].replace(x, state.evaluate(x))
    return state


def sign_memory_update(result: GoldenSectionResult, memory, accepted: bool):
    """Remember ``|F|`` when a negative scale factor produced an accepted move."""
    if accepted and result.f_z_best < 0:
        return abs(result.f_z_best)
    return memory


def ils_onlooker_update(
    state: ColonyState,
    i: int,
    problem: Problem,
    config: ColonyConfig,
    gs: GoldenSectionConfig,
    rng,
) -> int:
    """Golden-section search over the scale factor of the move of source ``i``.

    The partner and perturbed coordinates are drawn once, so the search runs
    over a fixed line ``x_i + F (x_i - x_k)``. The best trial found competes
    greedily with ``x_i``. Returns the number of objective evaluations.
    """
    size = len(state.sources)
    if size < 2:
        state.sources[i].trials += 1
        return 0
    x_i = state.sources[i].position
    k = _partner(i, size, rng)
    dims = _dims(problem.dimension, config, rng)
    step = x_i[dims] - state.sources[k].position[dims]

    def trial(f):
        v = x_i.copy()
        v[dims] = x_i[dims] + f * step
        return problem.clamp(v)

    res = golden_section_search(lambda f: state.evaluate(trial(f)), gs)
    accepted = state.greedy(i, trial(res.f_z_best), res.value_best)
    state.sign_memory = sign_memory_update(res, state.sign_memory, accepted)
    if accepted and res.f_z_best < 0:
        state.negative_successes += 1
    return res.evaluations


class GoldenSectionOnlooker:
    """Onlooker strategy binding a :class:`GoldenSectionConfig`."""

    def __init__(self, gs: GoldenSectionConfig = GoldenSectionConfig()):
        self.gs = gs

    def __call__(self, state, i, problem, config, rng) -> int:
        return ils_onlooker_update(state, i, problem, config, self.gs, rng)


def _collapsed(state: ColonyState, tol: float) -> bool:
    values = state.values()
    return bool(values.max() - values.min() < tol)


def run(
    problem: Problem,
    config: ColonyConfig = ColonyConfig(),
    rng: np.random.Generator | None = None,
    update: UpdateStrategy = canonical_update,
) -> RunResult:
    """Run the colony until a stopping rule fires.

    Stops when ``max_cycles`` cycles have run, the evaluation budget is spent
    (possibly mid-phase), or the spread of objective values over the current
    food sources drops below ``diversity_tol``.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    start = time.perf_counter()
    state = initialize_colony(problem, config, rng)
    try:
        while (
            state.cycle < config.max_cycles
            and not state.evaluator.exhausted
            and not _collapsed(state, config.diversity_tol)
        ):
            state.cycle += 1
            employed_phase(state, problem, config, rng)
            onlooker_phase(state, problem, config, rng, update)
            scout_phase(state, problem, config, rng)
    except BudgetExhausted:
        pass
    diagnostics = {}
    if isinstance(update, GoldenSectionOnlooker):
        diagnostics = {
            "sign_memory": state.sign_memory,
            "negative_successes": state.negative_successes,
        }
    return state.evaluator.result(
        cycles=state.cycle,
        seed=config.rng_seed,
        wall_time=time.perf_counter() - start,
        diagnostics=diagnostics,
    )
