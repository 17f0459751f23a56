"""Reference optimizers: DE/rand/1/bin and global-best PSO.

Both share the colony engine's stopping rules (generation cap, evaluation
budget, population spread) and its :class:`~ilsabc.tracking.Evaluator`
accounting.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .problems import Problem
from .tracking import BudgetExhausted, Evaluator, RunResult

__all__ = [
    "DEConfig",
    "PSOConfig",
    "de_mutation",
    "binomial_crossover",
    "pso_velocity",
    "run_de",
    "run_pso",
]


def _check_stopping(cfg, size):
    if cfg.max_cycles < 0:
        raise ValueError("max_cycles must be non-negative")
    if cfg.max_nfe < size:
        raise ValueError("max_nfe must cover at least the initial population")
    if cfg.diversity_tol < 0:
        raise ValueError("diversity_tol must be non-negative (0 disables the rule)")


@dataclass(frozen=True)
class DEConfig:
    population: int = 40
    weight: float = 0.5
    crossover: float = 0.9
    max_cycles: int = 10000
    max_nfe: int = 100_000
    diversity_tol: float = 1e-4
    rng_seed: int = 0

    def __post_init__(self):
        if self.population < 4:
            raise ValueError("DE needs a population of at least 4")
        if not 0.0 <= self.crossover <= 1.0:
            raise ValueError("crossover rate must lie in [0, 1]")
        _check_stopping(self, self.population)


@dataclass(frozen=True)
class PSOConfig:
    swarm: int = 40
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    velocity_clamp: float = 0.5
    max_cycles: int = 10000
    max_nfe: int = 100_000
    diversity_tol: float = 1e-4
    rng_seed: int = 0

    def __post_init__(self):
        if self.swarm < 2:
            raise ValueError("PSO needs a swarm of at least 2")
        if not self.velocity_clamp > 0:
            raise ValueError("velocity_clamp must be positive")
        _check_stopping(self, self.swarm)


def de_mutation(x_r1, x_r2, x_r3, weight: float) -> np.ndarray:
    return np.asarray(x_r1) + weight * (np.asarray(x_r2) - np.asarray(x_r3))


def binomial_crossover(target, donor, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Take donor coordinates with probability ``rate``; one random coordinate always."""
    target = np.asarray(target, dtype=float)
    mask = rng.random(target.size) < rate
    mask[rng.integers(target.size)] = True
    return np.where(mask, donor, target)


def _spread(costs: np.ndarray) -> float:
    return costs.max() - costs.min()


def run_de(problem: Problem, config: DEConfig = DEConfig(), rng=None) -> RunResult:
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    start = time.perf_counter()
    ev = Evaluator(problem, config.max_nfe)
    size = config.population
    pop = np.array([problem.random_position(rng) for _ in range(size)])
    costs = np.array([ev(x) for x in pop])
    generation = 0
    try:
        while (
            generation < config.max_cycles
            and not ev.exhausted
            and not _spread(costs) < config.diversity_tol
        ):
            generation += 1
            new_pop, new_costs = pop.copy(), costs.copy()
            for i in range(size):
                r = rng.choice(size - 1, 3, replace=False)
                r1, r2, r3 = np.where(r >= i, r + 1, r)
                donor = de_mutation(pop[r1], pop[r2], pop[r3], config.weight)
                trial = problem.clamp(binomial_crossover(pop[i], donor, config.crossover, rng))
                c = ev(trial)
                if c <= costs[i]:
                    new_pop[i], new_costs[i] = trial, c
            pop, costs = new_pop, new_costs
    except BudgetExhausted:
        pass
    return ev.result(generation, config.rng_seed, time.perf_counter() - start)


def pso_velocity(v, x, pbest, gbest, config: PSOConfig, rng, vmax) -> np.ndarray:
    r1 = rng.random(x.shape)
    r2 = rng.random(x.shape)
    v = (
        config.inertia * v
        + config.cognitive * r1 * (pbest - x)
        + config.social * r2 * (gbest - x)
    )
    return np.clip(v, -vmax, vmax)


def run_pso(problem: Problem, config: PSOConfig = PSOConfig(), rng=None, history=None) -> RunResult:
    """Synchronous global-best PSO.

    ``history``, if a list, receives a copy of the swarm positions after
    initialization and after every iteration.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    start = time.perf_counter()
    ev = Evaluator(problem, config.max_nfe)
    size = config.swarm
    vmax = config.velocity_clamp * (problem.upper - problem.lower)
    x = np.array([problem.random_position(rng) for _ in range(size)])
    v = rng.uniform(-vmax, vmax, size=x.shape)
    costs = np.array([ev(p) for p in x])
    pbest, pbest_cost = x.copy(), costs.copy()
    g = int(np.argmin(pbest_cost))
    if history is not None:
        history.append(x.copy())
    iteration = 0
    try:
        while (
            iteration < config.max_cycles
            and not ev.exhausted
            and not _spread(costs) < config.diversity_tol
        ):
            iteration += 1
            v = pso_velocity(v, x, pbest, pbest[g], config, rng, vmax)
            x = np.clip(x + v, problem.lower, problem.upper)
            for i in range(size):
                costs[i] = ev(x[i])
                if costs[i] < pbest_cost[i]:
                    pbest[i], pbest_cost[i] = x[i], costs[i]
            g = int(np.argmin(pbest_cost))
            if history is not None:
                history.append(x.copy())
    except BudgetExhausted:
        pass
    return ev.result(iteration, config.rng_seed, time.perf_counter() - start)
