import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aoitraj import (
    DomainError,
    GaParams,
    Objective,
    TransitCostMatrix,
    dp_ave_aoi,
    dp_max_aoi,
    fitness,
    ga_solve,
    greedy_solve,
    mutate,
    objective_value,
    pmx_crossover,
    random_scenario,
    transit_matrix,
)
from aoitraj.heuristic import _duplicate_rows, _mutate_rows, _pmx_batch

from .helpers import random_eta

FAST = GaParams(population_size=200, generations=150, seed=1)


def _is_perm(row, m):
    return sorted(int(v) for v in row) == list(range(1, m + 1))


class ForcedRng:
    def __init__(self, picks):
        self.picks = list(picks)

    def choice(self, n, size, replace):
        return np.array(self.picks.pop(0))


# -- fitness ---------------------------------------------------------------

def test_fitness_example():
    eps = 1e-9
    phi = fitness([10.0, 20.0, 30.0], alpha=2, eps=eps)
    assert phi[0] == 1.0
    assert phi[1] == pytest.approx(0.25, rel=1e-9)
    assert phi[2] == pytest.approx((eps / (20 + eps)) ** 2, rel=1e-12)


def test_fitness_degenerate_population():
    assert np.all(fitness([5.0, 5.0, 5.0]) == 1.0)


def test_fitness_alpha_spread():
    ls = [3.0, 7.0, 4.0, 9.0]
    p1, p2 = fitness(ls, alpha=1.0), fitness(ls, alpha=2.0)
    assert list(np.argsort(p1)) == list(np.argsort(p2))
    assert p2.max() - p2.min() > p1.max() - p1.min()


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 10**6), min_size=2, max_size=30), st.floats(1.01, 5.0))
def test_fitness_reverses_length_order(ticks, alpha):
    # grid spacing stays resolvable next to eps
    ls = [0.01 * t for t in ticks]
    phi = fitness(ls, alpha)
    assert np.all((phi >= 0) & (phi <= 1))
    for i in range(len(ls)):
        for j in range(len(ls)):
            if ls[i] < ls[j]:
                assert phi[i] > phi[j]
    if len(set(ls)) > 1:
        assert phi[int(np.argmin(ls))] == 1.0


def test_fitness_rejects_empty():
    with pytest.raises(DomainError):
        fitness([])


# -- crossover --------------------------------------------------------------

def test_pmx_golden():
    # b's segment 4 5 1 lands in positions 2..4; 1 -> 4 -> 2 and 5 -> 3 repair the ends
    assert pmx_crossover([1, 2, 3, 4, 5], [3, 4, 5, 1, 2], 2, 4) == ((2, 4, 5, 1, 3), (5, 2, 3, 4, 1))


def test_pmx_identical_parents():
    p = (4, 1, 3, 2, 5, 6)
    assert pmx_crossover(p, p, 2, 5) == (p, p)


def test_pmx_full_segment_swaps_parents():
    a, b = (1, 2, 3), (3, 1, 2)
    assert pmx_crossover(a, b, 1, 3) == (b, a)


@pytest.mark.parametrize("cuts", [(0, 2), (2, 2), (3, 2), (1, 6)])
def test_pmx_rejects_bad_cuts(cuts):
    with pytest.raises(DomainError):
        pmx_crossover([1, 2, 3, 4, 5], [5, 4, 3, 2, 1], *cuts)


def test_pmx_closure_10k():
    rng = np.random.default_rng(0)
    n, m = 10_000, 12
    a = rng.permuted(np.tile(np.arange(1, m + 1), (n, 1)), axis=1)
    b = rng.permuted(np.tile(np.arange(1, m + 1), (n, 1)), axis=1)
    x = rng.integers(0, m, n)
    y = rng.integers(0, m - 1, n)
    y += y >= x
    lo, hi = np.minimum(x, y), np.maximum(x, y) + 1
    kids = _pmx_batch(a, b, lo, hi)
    assert np.all(np.sort(kids, axis=1) == np.arange(1, m + 1))
    seg = (np.arange(m) >= lo[:, None]) & (np.arange(m) < hi[:, None])
    assert np.all(kids[seg] == b[seg])


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_pmx_scalar_properties(data):
    m = data.draw(st.integers(2, 10))
    a = data.draw(st.permutations(range(1, m + 1)))
    b = data.draw(st.permutations(range(1, m + 1)))
    c1 = data.draw(st.integers(1, m - 1))
    c2 = data.draw(st.integers(c1 + 1, m))
    k1, k2 = pmx_crossover(a, b, c1, c2)
    assert _is_perm(k1, m) and _is_perm(k2, m)
    assert k1[c1 - 1:c2] == tuple(b[c1 - 1:c2])
    assert k2[c1 - 1:c2] == tuple(a[c1 - 1:c2])
    # genes of a that do not clash keep their place
    for pos in range(m):
        if not c1 - 1 <= pos < c2 and a[pos] not in b[c1 - 1:c2]:
            assert k1[pos] == a[pos]


# -- mutation ---------------------------------------------------------------

def test_mutate_single_node_unchanged():
    assert mutate([1], 3, np.random.default_rng(0)) == (1,)


def test_mutate_forced_swap():
    assert mutate([1, 2, 3], 1, ForcedRng([[0, 2]])) == (3, 2, 1)


def test_mutate_closure_and_distance():
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        m = int(rng.integers(1, 15))
        swaps = int(rng.integers(1, 5))
        traj = tuple(int(v) for v in rng.permutation(m) + 1)
        out = mutate(traj, swaps, rng)
        assert _is_perm(out, m)
        assert sum(x != y for x, y in zip(traj, out)) <= 2 * swaps


def test_batch_mutation_closure():
    rng = np.random.default_rng(6)
    pop = rng.permuted(np.tile(np.arange(1, 9), (500, 1)), axis=1)
    before = pop.copy()
    rows = np.arange(100, 500)
    _mutate_rows(pop, rows, 3, rng)
    assert np.all(np.sort(pop, axis=1) == np.arange(1, 9))
    assert np.all(pop[:100] == before[:100])
    assert np.all((pop != before).sum(axis=1) <= 6)


def test_duplicate_rows():
    pop = np.array([[1, 2, 3], [2, 1, 3], [1, 2, 3], [2, 1, 3], [3, 2, 1]])
    assert list(_duplicate_rows(pop, 1)) == [2, 3]
    assert list(_duplicate_rows(pop[[2, 0]], 2)) == []


# -- GA ---------------------------------------------------------------------

def test_ga_params_defaults_and_validation():
    p = GaParams()
    assert (p.population_size, p.generations, p.acceleration) == (1000, 10_000, 2.0)
    assert (p.selection_threshold, p.mutation_prob) == (0.8, 0.01)
    assert p.epsilon == 1e-9 and p.mutation_swaps == 3 and p.elitism == 1
    for bad in (
        dict(population_size=1), dict(generations=0), dict(acceleration=1.0),
        dict(selection_threshold=1.5), dict(mutation_prob=-0.1), dict(epsilon=0.0),
        dict(mutation_swaps=0), dict(elitism=-1), dict(population_size=4, elitism=4),
    ):
        with pytest.raises(DomainError):
            GaParams(**bad)


def test_ga_single_node():
    eta = TransitCostMatrix([[0, 1.0], [2.0, 0]])
    res = ga_solve(eta, "max-aoi", FAST)
    assert res.trajectory == (1,) and res.objective_value == 2.0


def test_ga_deterministic():
    eta = transit_matrix(random_scenario(10, seed=8))
    a = ga_solve(eta, "ave-aoi", FAST)
    b = ga_solve(eta, "ave-aoi", FAST)
    assert a.trajectory == b.trajectory and a.objective_value == b.objective_value


def test_ga_objective_value_consistent():
    eta = transit_matrix(random_scenario(10, seed=9))
    for obj in Objective:
        res = ga_solve(eta, obj, FAST)
        assert res.objective_value == pytest.approx(objective_value(res.trajectory, eta, obj), rel=1e-12)
        assert res.algorithm == "ga"


@pytest.mark.parametrize("objective", list(Objective))
def test_ga_population_closure_and_elitism(objective):
    eta = transit_matrix(random_scenario(11, seed=10))
    best = []

    def hook(gen, pop, lengths):
        assert np.all(np.sort(pop, axis=1) == np.arange(1, 12))
        assert np.all(np.diff(lengths) >= 0)
        best.append(lengths[0])

    ga_solve(eta, objective, GaParams(population_size=100, generations=120, seed=3), on_generation=hook)
    assert len(best) == 121
    assert all(b <= a for a, b in zip(best, best[1:]))


def test_ga_degenerate_costs():
    eta = TransitCostMatrix(np.full((6, 6), 3.0))
    res = ga_solve(eta, "max-aoi", GaParams(population_size=20, generations=10))
    assert res.objective_value == pytest.approx(15.0)


def test_ga_selection_fallback_with_zero_threshold_edge():
    # threshold 1 admits only exact minima, forcing the top-2 fallback most generations
    eta = transit_matrix(random_scenario(7, seed=4))
    res = ga_solve(eta, "max-aoi", GaParams(population_size=30, generations=40, selection_threshold=1.0))
    assert sorted(res.trajectory) == list(range(1, 8))


def test_ga_seed_with_greedy_never_worse_than_greedy():
    eta = transit_matrix(random_scenario(15, seed=12))
    greedy = greedy_solve(eta, "max-aoi")
    res = ga_solve(eta, "max-aoi", GaParams(population_size=50, generations=5, seed_with_greedy=True))
    assert res.objective_value <= greedy.objective_value


@pytest.mark.parametrize("seed", range(8))
def test_ga_never_beats_dp(seed):
    m = 4 + seed % 5
    eta = transit_matrix(random_scenario(m, seed=400 + seed))
    for dp, obj in ((dp_max_aoi, "max-aoi"), (dp_ave_aoi, "ave-aoi")):
        opt = dp(eta).objective_value
        res = ga_solve(eta, obj, GaParams(population_size=200, generations=200, seed=seed))
        assert res.objective_value >= opt * (1 - 1e-12)


# -- greedy -----------------------------------------------------------------

def test_greedy_two_node(two_node_eta):
    assert greedy_solve(two_node_eta).trajectory == (2, 1)


def test_greedy_single_node():
    assert greedy_solve(TransitCostMatrix([[0, 1.0], [2.0, 0]])).trajectory == (1,)


def test_greedy_tie_break_smaller_id():
    eta = TransitCostMatrix(np.full((5, 5), 1.0))
    # every choice ties: last stop is node 1, then 2 precedes it, ...
    assert greedy_solve(eta).trajectory == (4, 3, 2, 1)


def test_greedy_backward_rule_by_hand():
    e = np.array([
        [0, 1, 1, 1],
        [9, 0, 2, 7],
        [8, 5, 0, 1],
        [4, 3, 6, 0],
    ], dtype=float)
    # last = argmin eta[i,0] = 3; before 3: argmin(eta[1,3]=7, eta[2,3]=1) = 2; then 1
    assert greedy_solve(TransitCostMatrix(e)).trajectory == (1, 2, 3)


@pytest.mark.parametrize("seed", range(20))
def test_greedy_objective_independent(seed):
    eta = random_eta(np.random.default_rng(seed), 3 + seed)
    a = greedy_solve(eta, "max-aoi")
    b = greedy_solve(eta, "ave-aoi")
    assert a.trajectory == b.trajectory
    assert b.objective_value == pytest.approx(objective_value(b.trajectory, eta, "ave-aoi"))
