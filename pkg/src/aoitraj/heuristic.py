"""Genetic algorithm and greedy baseline for networks beyond the DP cap."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .metrics import Objective, Trajectory, batch_objective, check_trajectory, objective_value
from .exact import SolveResult
from .netmodel import TransitCostMatrix


@dataclass(frozen=True)
class GaParams:
    """Tunables of the GA.

    Defaults are the published settings (1000 chromosomes, 10^4
    generations, acceleration 2, selection threshold 0.8, mutation
    probability 0.01).  ``mutation_swaps``, ``elitism`` and ``epsilon``
    are not pinned down by the method description and use 3, 1 and 1e-9.
    ``seed_with_greedy`` plants the greedy tour in the initial population.
    """

    population_size: int = 1000
    generations: int = 10_000
    acceleration: float = 2.0
    selection_threshold: float = 0.8
    mutation_prob: float = 0.01
    epsilon: float = 1e-9
    mutation_swaps: int = 3
    elitism: int = 1
    seed: int = 0
    seed_with_greedy: bool = False
    unique_population: bool = True

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise DomainError("population_size must be >= 2")
        if self.generations < 1:
            raise DomainError("generations must be >= 1")
        if not self.acceleration > 1:
            raise DomainError("acceleration must be > 1")
        if not 0 <= self.selection_threshold <= 1:
            raise DomainError("selection_threshold must lie in [0, 1]")
        if not 0 <= self.mutation_prob <= 1:
            raise DomainError("mutation_prob must lie in [0, 1]")
        if not self.epsilon > 0:
            raise DomainError("epsilon must be > 0")
        if self.mutation_swaps < 1:
            raise DomainError("mutation_swaps must be >= 1")
        if not 0 <= self.elitism < self.population_size:
            raise DomainError("elitism must lie in [0, population_size)")


def fitness(lengths: Sequence[float] | np.ndarray, alpha: float = 2.0, eps: float = 1e-9) -> np.ndarray:
    """Normalised fitness ``(1 - (l - l_min) / (l_max - l_min + eps)) ** alpha``.

    Evaluated as ``((l_max - l + eps) / (l_max - l_min + eps)) ** alpha``,
    which is the same quantity without the cancellation near ``l_max``.
    """
    ls = np.asarray(lengths, dtype=float)
    if ls.size == 0:
        raise DomainError("fitness needs at least one length")
    lo, hi = ls.min(), ls.max()
    return ((hi - ls + eps) / (hi - lo + eps)) ** alpha


def _pmx_batch(a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Child of each row pair carrying ``b``'s segment [lo, hi) in ``a``'s frame.

    A gene of ``a`` outside the segment that already appears inside it is
    replaced by following the segment mapping b[j] -> a[j] until it no
    longer collides.
    """
    n, m = a.shape
    pos = np.arange(m)
    seg = (pos >= lo[:, None]) & (pos < hi[:, None])
    child = np.where(seg, b, a)
    where_b = np.empty((n, m + 1), dtype=np.int64)
    where_b[np.arange(n)[:, None], b] = pos
    rows = np.arange(n)[:, None]
    val = a.copy()
    for _ in range(m):
        j = where_b[rows, val]
        clash = ~seg & seg[rows, j]
        if not clash.any():
            break
        val = np.where(clash, a[rows, j], val)
    return np.where(seg, child, val)


def pmx_crossover(
    parent_a: Sequence[int], parent_b: Sequence[int], cut1: int, cut2: int
) -> tuple[Trajectory, Trajectory]:
    """Partially mapped crossover with an inclusive 1-based segment [cut1, cut2].

    The first child keeps ``parent_a`` outside the segment and takes
    ``parent_b``'s segment; the second child is the mirror image.
    """
    a = np.asarray(parent_a, dtype=np.int64)
    b = np.asarray(parent_b, dtype=np.int64)
    m = len(a)
    check_trajectory(a, m)
    check_trajectory(b, m)
    if not 1 <= cut1 < cut2 <= m:
        raise DomainError(f"cut points must satisfy 1 <= cut1 < cut2 <= {m}, got ({cut1}, {cut2})")
    lo = np.array([cut1 - 1, cut1 - 1])
    hi = np.array([cut2, cut2])
    kids = _pmx_batch(np.stack([a, b]), np.stack([b, a]), lo, hi)
    return tuple(int(v) for v in kids[0]), tuple(int(v) for v in kids[1])


def mutate(traj: Sequence[int], swaps: int, rng: np.random.Generator) -> Trajectory:
    """Exchange two randomly chosen positions ``swaps`` times."""
    genes = list(traj)
    if len(genes) < 2:
        return tuple(genes)
    for _ in range(swaps):
        i, j = rng.choice(len(genes), size=2, replace=False)
        genes[i], genes[j] = genes[j], genes[i]
    return tuple(int(g) for g in genes)


def _mutate_rows(pop: np.ndarray, rows: np.ndarray, swaps: int, rng: np.random.Generator) -> None:
    # in-place batch version of ``mutate`` for the selected rows
    if len(rows) == 0:
        return
    m = pop.shape[1]
    for _ in range(swaps):
        i = rng.integers(0, m, size=len(rows))
        j = rng.integers(0, m - 1, size=len(rows))
        j += j >= i
        gi, gj = pop[rows, i], pop[rows, j]
        pop[rows, i], pop[rows, j] = gj, gi


def _draw_cuts(rng: np.random.Generator, m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    # two distinct positions per pair, uniform over unordered pairs
    x = rng.integers(0, m, size=n)
    y = rng.integers(0, m - 1, size=n)
    y += y >= x
    return np.minimum(x, y), np.maximum(x, y) + 1


def _row_keys(pop: np.ndarray) -> np.ndarray:
    m = pop.shape[1]
    if (m + 1) ** m < 2**63:
        return pop @ ((m + 1) ** np.arange(m, dtype=np.int64))
    return np.ascontiguousarray(pop).view(np.dtype((np.void, pop.itemsize * m))).ravel()


def _duplicate_rows(pop: np.ndarray, protect: int) -> np.ndarray:
    # later copies of an earlier row; rows below ``protect`` always stay
    _, first = np.unique(_row_keys(pop), return_index=True)
    dup = np.ones(len(pop), dtype=bool)
    dup[first] = False
    dup[:protect] = False
    return np.flatnonzero(dup)


GenerationHook = Callable[[int, np.ndarray, np.ndarray], None]


def ga_solve(
    eta: TransitCostMatrix,
    objective: Objective | str,
    params: GaParams | None = None,
    on_generation: Optional[GenerationHook] = None,
) -> SolveResult:
    """Evolve visit orders and return the best one in the final population.

    ``on_generation(n, population, lengths)`` is called after every
    generation's evaluation with the population sorted best-first.
    """
    objective = Objective(objective)
    params = params or GaParams()
    m = eta.m
    t0 = time.perf_counter()
    if m == 1:
        traj = (1,)
        return SolveResult(traj, objective_value(traj, eta, objective), objective, "ga", 0.0)

    rng = np.random.default_rng(params.seed)
    n_c = params.population_size
    pop = rng.permuted(np.tile(np.arange(1, m + 1, dtype=np.int64), (n_c, 1)), axis=1)
    if params.seed_with_greedy:
        pop[0] = greedy_solve(eta).trajectory

    elite = params.elitism
    for gen in range(params.generations):
        lengths = batch_objective(pop, eta, objective)
        order = np.argsort(lengths, kind="stable")
        pop, lengths = pop[order], lengths[order]
        if on_generation is not None:
            on_generation(gen, pop, lengths)

        phi = fitness(lengths, params.acceleration, params.epsilon)
        pool = np.flatnonzero(phi >= params.selection_threshold)
        if len(pool) < 2:
            pool = np.arange(2)
        pool = rng.permutation(pool)
        n_pairs = len(pool) // 2
        mothers = pop[pool[0:2 * n_pairs:2]]
        fathers = pop[pool[1:2 * n_pairs:2]]
        lo, hi = _draw_cuts(rng, m, n_pairs)
        offspring = np.concatenate(
            [_pmx_batch(mothers, fathers, lo, hi), _pmx_batch(fathers, mothers, lo, hi)]
        )

        # offspring overwrite the worst chromosomes; the elite is never touched
        n_new = min(len(offspring), n_c - elite)
        pop = np.concatenate([pop[:n_c - n_new], offspring[:n_new]])

        hits = np.flatnonzero(rng.random(n_c - elite) < params.mutation_prob) + elite
        if params.unique_population:
            hits = np.union1d(hits, _duplicate_rows(pop, elite))
        _mutate_rows(pop, hits, params.mutation_swaps, rng)

    lengths = batch_objective(pop, eta, objective)
    order = np.argsort(lengths, kind="stable")
    if on_generation is not None:
        on_generation(params.generations, pop[order], lengths[order])
    traj = check_trajectory(pop[order[0]], m)
    return SolveResult(traj, objective_value(traj, eta, objective), objective, "ga", time.perf_counter() - t0)


def greedy_solve(eta: TransitCostMatrix, objective: Objective | str = Objective.MAX_AOI) -> SolveResult:
    """Backward nearest-neighbour tour.

    The node cheapest to fly home from becomes the last stop; each earlier
    stop is the unmarked node cheapest to reach the current one.  The rule
    never looks at the objective, which only decides the reported value.
    """
    objective = Objective(objective)
    t0 = time.perf_counter()
    e = eta.values
    m = eta.m
    unmarked = list(range(1, m + 1))
    backwards = []
    target = 0
    while unmarked:
        # list order is ascending id, so argmin picks the smallest id on ties
        nxt = unmarked[int(np.argmin([e[j, target] for j in unmarked]))]
        backwards.append(nxt)
        unmarked.remove(nxt)
        target = nxt
    traj = tuple(reversed(backwards))
    return SolveResult(traj, objective_value(traj, eta, objective), objective, "greedy", time.perf_counter() - t0)
