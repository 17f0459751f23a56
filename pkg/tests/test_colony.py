import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ilsabc import colony
from ilsabc.colony import (
    ColonyConfig,
    ColonyState,
    FoodSource,
    GoldenSectionOnlooker,
    canonical_update,
    employed_phase,
    fitness_of,
    ils_onlooker_update,
    initialize_colony,
    mutate,
    onlooker_phase,
    roulette,
    scout_phase,
    selection_probabilities,
    sign_memory_update,
)
from ilsabc.golden import GoldenSectionConfig, GoldenSectionResult
from ilsabc.problems import Problem, make_problem, sphere_objective
from ilsabc.tracking import Evaluator


class FixedUniform:
    """Stands in for a generator whose uniform draws are all ``u``."""

    def __init__(self, u):
        self.u = u

    def random(self, size=None):
        return np.full(size, self.u)


class Counting:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.f(x)


def counted(problem):
    counter = Counting(problem.objective)
    return dataclasses.replace(problem, objective=counter), counter


def constant_problem(value, n=2):
    return Problem("const", np.full(n, -1.0), np.full(n, 1.0), lambda x: value)


def state_with(problem, positions, values, trials=None, max_nfe=10**6):
    trials = trials or [0] * len(positions)
    sources = [FoodSource(np.asarray(p, dtype=float), v, t) for p, v, t in zip(positions, values, trials)]
    ev = Evaluator(problem, max_nfe)
    # seed the evaluator's best with the supplied sources without spending evaluations
    best = int(np.argmin(values))
    ev.best_x, ev.best_cost = np.asarray(positions[best], dtype=float), float(values[best])
    return ColonyState(sources, ev)


# ---------------------------------------------------------------- initialization


@pytest.mark.parametrize("u, expected", [(0.0, 17.5), (1.0, 40.0)])
def test_initial_coordinate_endpoints(u, expected):
    p = make_problem("gas")
    assert p.random_position(FixedUniform(u))[0] == expected


def test_initial_coordinate_midpoint():
    p = Problem("box", [-1.0], [1.0], sphere_objective)
    assert p.random_position(FixedUniform(0.5))[0] == 0.0


def test_initialize_colony_counts_and_bounds():
    p, counter = counted(make_problem("heater"))
    cfg = ColonyConfig(colony_size=12)
    state = initialize_colony(p, cfg, np.random.default_rng(0))
    assert len(state.sources) == 12
    assert state.nfe == counter.calls == 12
    for s in state.sources:
        assert np.all(s.position >= p.lower) and np.all(s.position <= p.upper)
        assert s.trials == 0
        assert s.fitness == fitness_of(s.value)
    assert state.best.value == min(s.value for s in state.sources)


# ---------------------------------------------------------------- fitness / mutation


@pytest.mark.parametrize("value, fit", [(0.0, 1.0), (3.0, 0.25), (-2.0, 3.0), (math.inf, 0.0)])
def test_fitness_of(value, fit):
    assert fitness_of(value) == fit


def test_mutate_examples():
    np.testing.assert_array_equal(mutate([2, 3], [1, 5], [0], [0.5]), [2.5, 3])
    assert mutate([0.0, 7.0], [4.0, 1.0], [0], [-1.0])[0] == 4.0


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3), st.lists(st.floats(-10, 10), min_size=3, max_size=3))
def test_mutate_zero_phi_is_identity(xi, xk):
    np.testing.assert_array_equal(mutate(xi, xk, np.arange(3), np.zeros(3)), xi)


def test_mutate_clamps():
    p = make_problem("gas")
    v = mutate([39.0, 590.0], [17.5, 300.0], [0, 1], [1.0, 1.0], p)
    np.testing.assert_array_equal(v, [40.0, 600.0])


# ---------------------------------------------------------------- employed phase


def test_employed_improvement_resets_trials():
    p = constant_problem(0.0)
    state = state_with(p, [[0.1, 0.1], [0.2, -0.3], [0.5, 0.5]], [5.0, 5.0, 5.0], [3, 7, 1])
    employed_phase(state, p, ColonyConfig(colony_size=3), np.random.default_rng(1))
    assert [s.trials for s in state.sources] == [0, 0, 0]
    assert all(s.value == 0.0 and s.fitness == 1.0 for s in state.sources)


def test_employed_worsening_increments_trials():
    p = constant_problem(1.0)
    positions = [[0.1, 0.1], [0.2, -0.3], [0.5, 0.5]]
    state = state_with(p, positions, [0.0, 0.0, 0.0], [3, 7, 1])
    employed_phase(state, p, ColonyConfig(colony_size=3), np.random.default_rng(1))
    assert [s.trials for s in state.sources] == [4, 8, 2]
    for s, x in zip(state.sources, positions):
        np.testing.assert_array_equal(s.position, x)


def test_employed_phase_spends_one_evaluation_per_source():
    p, counter = counted(make_problem("sphere", dimension=3))
    cfg = ColonyConfig(colony_size=10)
    rng = np.random.default_rng(2)
    state = initialize_colony(p, cfg, rng)
    before = state.nfe
    employed_phase(state, p, cfg, rng)
    assert state.nfe - before == 10
    assert state.nfe == counter.calls


def test_partner_differs_from_self():
    rng = np.random.default_rng(0)
    for size in (2, 3, 7):
        for i in range(size):
            ks = {colony._partner(i, size, rng) for _ in range(200)}
            assert i not in ks
            assert ks == set(range(size)) - {i}


# ---------------------------------------------------------------- selection


def test_selection_probability_examples():
    np.testing.assert_allclose(selection_probabilities([1.0, 3.0]), [0.25, 0.75])
    np.testing.assert_allclose(selection_probabilities([2.0] * 4), [0.25] * 4)
    np.testing.assert_allclose(selection_probabilities([0.0] * 5), [0.2] * 5)


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=60))
def test_selection_probabilities_normalized(fit):
    assert abs(selection_probabilities(fit).sum() - 1.0) <= 1e-12


def test_single_source_always_selected():
    rng = np.random.default_rng(0)
    assert all(roulette(np.array([1.0]), rng) == 0 for _ in range(100))


@pytest.mark.parametrize("fit", [[1.0, 3.0, 0.5, 2.5, 0.0, 3.0], [0.0, 0.0, 0.0, 0.0]])
def test_roulette_frequencies(fit):
    probs = selection_probabilities(fit)
    rng = np.random.default_rng(42)
    n = 100_000
    counts = np.bincount([roulette(probs, rng) for _ in range(n)], minlength=len(fit))
    se = np.sqrt(n * probs * (1 - probs))
    assert np.all(np.abs(counts - n * probs) <= 3 * se + 1e-9)


# ---------------------------------------------------------------- onlooker phase


def test_canonical_onlookers_spend_one_evaluation_each():
    p, counter = counted(make_problem("rastrigin", dimension=4))
    cfg = ColonyConfig(colony_size=8)
    rng = np.random.default_rng(3)
    state = initialize_colony(p, cfg, rng)
    before = state.nfe
    onlooker_phase(state, p, cfg, rng)
    assert state.nfe - before == 8 == cfg.onlookers
    assert state.nfe == counter.calls


def test_onlooker_count_override():
    p = make_problem("sphere", dimension=2)
    cfg = ColonyConfig(colony_size=8, onlooker_count=3)
    rng = np.random.default_rng(3)
    state = initialize_colony(p, cfg, rng)
    onlooker_phase(state, p, cfg, rng)
    assert state.nfe == 11


def test_single_source_colony_runs():
    p = make_problem("sphere", dimension=2)
    res = colony.run(p, ColonyConfig(colony_size=1, max_cycles=5, diversity_tol=0), update=GoldenSectionOnlooker())
    # no partner exists, so neither bee phase can evaluate and the scout never fires
    assert res.nfe == 1
    assert res.cycles == 5


# ---------------------------------------------------------------- scouts


def test_no_scout_below_limit():
    p, counter = counted(make_problem("sphere", dimension=2))
    state = state_with(p, [[0.1, 0.1], [0.2, 0.2]], [0.02, 0.08], [99, 50])
    scout_phase(state, p, ColonyConfig(colony_size=2), np.random.default_rng(0))
    assert state.nfe == counter.calls == 0
    assert [s.trials for s in state.sources] == [99, 50]


def test_scout_replaces_source_at_limit():
    p, counter = counted(make_problem("sphere", dimension=2))
    state = state_with(p, [[0.1, 0.1], [0.2, 0.2]], [0.02, 0.08], [3, 100])
    scout_phase(state, p, ColonyConfig(colony_size=2), np.random.default_rng(0))
    assert state.nfe == counter.calls == 1
    assert state.sources[1].trials == 0
    assert not np.array_equal(state.sources[1].position, [0.2, 0.2])
    np.testing.assert_array_equal(state.sources[0].position, [0.1, 0.1])


@pytest.mark.parametrize("trials, replaced", [([100, 150, 120], 1), ([130, 90, 130], 0)])
def test_at_most_one_scout(trials, replaced):
    p = make_problem("sphere", dimension=2)
    positions = [[0.1, 0.1], [0.2, 0.2], [0.3, 0.3]]
    state = state_with(p, positions, [0.02, 0.08, 0.18], trials)
    scout_phase(state, p, ColonyConfig(colony_size=3), np.random.default_rng(0))
    assert state.nfe == 1
    for i, s in enumerate(state.sources):
        if i == replaced:
            assert s.trials == 0
        else:
            assert s.trials == trials[i]
            np.testing.assert_array_equal(s.position, positions[i])


def test_scouted_best_is_remembered():
    p = make_problem("sphere", dimension=2)
    state = state_with(p, [[0.0, 0.0], [0.5, 0.5]], [0.0, 0.5], [200, 0])
    scout_phase(state, p, ColonyConfig(colony_size=2), np.random.default_rng(0))
    assert state.sources[0].value > 0
    assert state.best.value == 0.0


# ---------------------------------------------------------------- run


def test_zero_cycles_returns_initial_best():
    p = make_problem("gear")
    cfg = ColonyConfig(max_cycles=0, rng_seed=4)
    res = colony.run(p, cfg)
    state = initialize_colony(p, cfg, np.random.default_rng(4))
    assert res.nfe == 40
    assert res.cycles == 0
    assert res.best_value == state.best.value


def test_collapsed_population_stops():
    res = colony.run(constant_problem(3.0), ColonyConfig(colony_size=10))
    assert res.cycles == 0
    assert res.nfe == 10


def test_budget_is_never_exceeded():
    p, counter = counted(make_problem("rosenbrock", dimension=5))
    for update in (canonical_update, GoldenSectionOnlooker()):
        counter.calls = 0
        res = colony.run(p, ColonyConfig(max_nfe=1234, diversity_tol=0), update=update)
        assert res.nfe == counter.calls == 1234
        assert res.nfe_to_best <= res.nfe


def test_max_cycles_stop():
    res = colony.run(make_problem("rastrigin", dimension=3), ColonyConfig(max_cycles=7, diversity_tol=0))
    assert res.cycles == 7
    assert 40 + 7 * 80 <= res.nfe <= 40 + 7 * 81


def test_sphere_2d_converges():
    p = make_problem("sphere", dimension=2)
    worst = max(
        colony.run(p, ColonyConfig(max_nfe=10_000, diversity_tol=0, rng_seed=s)).best_value
        for s in range(25)
    )
    assert worst <= 1e-6


def test_run_is_deterministic():
    p = make_problem("heater")
    cfg = ColonyConfig(max_nfe=3000, rng_seed=9)
    a = colony.run(p, cfg, update=GoldenSectionOnlooker())
    b = colony.run(p, cfg, update=GoldenSectionOnlooker())
    assert a.same_outcome(b)
    assert a.best_x == b.best_x and a.trace == b.trace


def test_maximization_reported_in_native_sense():
    res = colony.run(make_problem("heater"), ColonyConfig(max_nfe=2000, rng_seed=1))
    assert res.best_value > 0
    assert res.best_value == pytest.approx(make_problem("heater").evaluate(res.best_x).value)


def test_gear_best_is_integral():
    res = colony.run(make_problem("gear"), ColonyConfig(max_nfe=2000, rng_seed=1))
    assert all(v == int(v) and 12 <= v <= 60 for v in res.best_x)


def test_config_validation():
    with pytest.raises(ValueError):
        ColonyConfig(perturb_mode="some")
    with pytest.raises(ValueError):
        ColonyConfig(colony_size=40, max_nfe=10)
    with pytest.raises(ValueError):
        ColonyConfig(diversity_tol=-1)


def test_defaults():
    cfg = ColonyConfig()
    assert (cfg.colony_size, cfg.limit, cfg.max_cycles, cfg.diversity_tol) == (40, 100, 10000, 1e-4)
    assert cfg.onlookers == 40


# ---------------------------------------------------------------- phase-level invariants


def _phases(update):
    return [
        ("employed", lambda s, p, c, r: employed_phase(s, p, c, r)),
        ("onlooker", lambda s, p, c, r: onlooker_phase(s, p, c, r, update)),
        ("scout", lambda s, p, c, r: scout_phase(s, p, c, r)),
    ]


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from(["sphere", "rastrigin", "gear", "heater", "gas", "transistor"]),
    st.sampled_from(["single", "all"]),
    st.booleans(),
    st.integers(0, 2**32 - 1),
)
def test_phase_invariants(name, mode, ils, seed):
    p, counter = counted(make_problem(name, dimension=4))
    cfg = ColonyConfig(colony_size=6, limit=3, perturb_mode=mode)
    update = GoldenSectionOnlooker() if ils else canonical_update
    rng = np.random.default_rng(seed)
    state = initialize_colony(p, cfg, rng)
    best = state.best.value
    for _ in range(4):
        for label, phase in _phases(update):
            phase(state, p, cfg, rng)
            assert state.nfe == counter.calls, label
            for s in state.sources:
                assert np.all(s.position >= p.lower) and np.all(s.position <= p.upper), label
                assert s.fitness == fitness_of(s.value)
            assert state.best.value <= min(s.value for s in state.sources)
            assert state.best.value <= best
            best = state.best.value


# ---------------------------------------------------------------- ILS onlooker


def _two_source_state(xi, xk):
    p = make_problem("sphere", dimension=2)
    state = state_with(p, [xi, xk], [sphere_objective(xi), sphere_objective(xk)])
    return p, state


def test_ils_zero_step_keeps_source():
    p, state = _two_source_state([0.5, 0.5], [0.5, 0.5])
    cfg = ColonyConfig(colony_size=2, perturb_mode="all")
    n = ils_onlooker_update(state, 0, p, cfg, GoldenSectionConfig(), np.random.default_rng(0))
    assert n == 12
    np.testing.assert_array_equal(state.sources[0].position, [0.5, 0.5])
    assert state.sources[0].trials == 1


def test_ils_line_search_reaches_partner_side():
    # g(F) = (1 + F)^2 along the first coordinate, minimized at F = -1
    p, state = _two_source_state([1.0, 0.0], [0.0, 0.0])
    cfg = ColonyConfig(colony_size=2, perturb_mode="all")
    before = state.nfe
    n = ils_onlooker_update(state, 0, p, cfg, GoldenSectionConfig(), np.random.default_rng(0))
    assert state.nfe - before == n == 12
    src = state.sources[0]
    assert src.trials == 0
    assert src.position[0] == pytest.approx(0.0, abs=0.01)
    assert src.position[1] == 0.0
    assert state.sign_memory == pytest.approx(1.0, abs=0.01)
    assert state.negative_successes == 1


def test_ils_standard_mode_evaluations():
    p, state = _two_source_state([1.0, 0.0], [0.0, 0.0])
    cfg = ColonyConfig(colony_size=2, perturb_mode="all")
    gs = GoldenSectionConfig(mode="standard")
    n = ils_onlooker_update(state, 0, p, cfg, gs, np.random.default_rng(0))
    assert n == 12  # two initial probes plus ten reused-point iterations
    assert state.nfe == n


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["paper", "standard"]))
def test_ils_never_worsens_source(seed, mode):
    p = make_problem("rastrigin", dimension=3)
    cfg = ColonyConfig(colony_size=5)
    rng = np.random.default_rng(seed)
    state = initialize_colony(p, cfg, rng)
    for _ in range(10):
        i = int(rng.integers(5))
        before = state.sources[i].value
        ils_onlooker_update(state, i, p, cfg, GoldenSectionConfig(mode=mode), rng)
        assert state.sources[i].value <= before


def _gs_result(f):
    return GoldenSectionResult(f_z_best=f, value_best=0.0, evaluations=2, final_interval=(-1, 1), iterations=1)


@pytest.mark.parametrize(
    "f, accepted, memory, expected",
    [(-0.4, True, None, 0.4), (0.6, True, 0.2, 0.2), (-0.4, False, 0.2, 0.2)],
)
def test_sign_memory_update(f, accepted, memory, expected):
    assert sign_memory_update(_gs_result(f), memory, accepted) == expected
