"""Exact planners: bitmask DP over (node, remaining set) and exhaustive search.

Both DP variants share one routine.  ``f(i, S)`` is the cheapest way to
start at node i, visit every node in S once and land at the data center:

    f(i, {})  = eta[i, 0]
    f(i, S)   = min_{k in S}  w(|S|) * eta[i, k] + f(k, S - {k})

with ``w = 1`` for the max-age objective and ``w = (M - |S|) / M`` for the
average-age objective (a node with |S| nodes still ahead of it is the
(M - |S|)-th stop, and its outgoing leg counts towards that many ages).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError
from .metrics import Objective, Trajectory, batch_objective, check_trajectory, objective_value
from .netmodel import TransitCostMatrix

MAX_DP_NODES = 24
MAX_BRUTE_NODES = 10


@dataclass(frozen=True)
class SolveResult:
    trajectory: Trajectory
    objective_value: float
    objective: Objective
    algorithm: str
    wall_time: float = 0.0


@dataclass(frozen=True)
class DpTable:
    """Filled DP table.

    ``cost[S, i]`` is f(i, S) (or g(i, S)) for node index i = id - 1 and
    bitmask S over the same indices; states with i in S hold ``inf``.
    ``successor[S, i]`` is the index of the node visited right after i,
    or -1 for the base states S = {}.
    """

    cost: np.ndarray
    successor: np.ndarray
    weighted: bool

    @property
    def m(self) -> int:
        return self.cost.shape[1]

    def lookup(self, node: int, remaining: set[int] | frozenset[int]) -> float:
        """f/g value for a node id and a set of node ids still to visit."""
        mask = 0
        for k in remaining:
            mask |= 1 << (k - 1)
        return float(self.cost[mask, node - 1])


def _popcounts(n_bits: int) -> np.ndarray:
    masks = np.arange(1 << n_bits, dtype=np.int64)
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(masks).astype(np.int64)
    pc = np.zeros_like(masks)
    for b in range(n_bits):
        pc += (masks >> b) & 1
    return pc


def _check_capacity(m: int, cap: int, what: str) -> None:
    if m > cap:
        raise CapacityError(
            f"{what} supports at most {cap} sensor nodes, got {m}; use the genetic algorithm (ga) instead"
        )


def solve_table(eta: TransitCostMatrix, weighted: bool) -> DpTable:
    """Fill the DP table in order of increasing |S|."""
    m = eta.m
    _check_capacity(m, MAX_DP_NODES, "the DP solver")
    e = np.array(eta.values[1:, 1:], dtype=float)
    np.fill_diagonal(e, np.inf)
    home = eta.values[1:, 0]

    n_masks = 1 << m
    cost = np.full((n_masks, m), np.inf)
    succ = np.full((n_masks, m), -1, dtype=np.int8)
    cost[0, :] = home

    pc = _popcounts(m)
    order = np.argsort(pc, kind="stable")
    bounds = np.searchsorted(pc[order], np.arange(m + 1))
    node_bits = (1 << np.arange(m, dtype=np.int64))

    for size in range(1, m):
        masks = order[bounds[size]:bounds[size + 1]]
        w = (m - size) / m if weighted else 1.0
        best = np.full((len(masks), m), np.inf)
        arg = np.full((len(masks), m), -1, dtype=np.int8)
        # ascending k with strict '<' keeps the smallest successor on ties
        for k in range(m):
            rows = np.flatnonzero(masks & node_bits[k])
            prev = masks[rows] ^ node_bits[k]
            cand = (w * e[:, k])[None, :] + cost[prev, k][:, None]
            sub = best[rows]
            better = cand < sub
            sub[better] = cand[better]
            best[rows] = sub
            subarg = arg[rows]
            subarg[better] = k
            arg[rows] = subarg
        inside = (masks[:, None] & node_bits[None, :]) != 0
        best[inside] = np.inf
        arg[inside] = -1
        cost[masks] = best
        succ[masks] = arg

    return DpTable(cost=cost, successor=succ, weighted=weighted)


def backtrace(table: DpTable) -> tuple[Trajectory, float]:
    """Pick the best first node (smallest id on ties) and follow successors."""
    m = table.m
    full = (1 << m) - 1
    starts = np.array([table.cost[full ^ (1 << i), i] for i in range(m)])
    cur = int(np.argmin(starts))
    value = float(starts[cur])
    remaining = full ^ (1 << cur)
    path = [cur]
    while remaining:
        nxt = int(table.successor[remaining, cur])
        path.append(nxt)
        remaining ^= 1 << nxt
        cur = nxt
    return tuple(i + 1 for i in path), value


def _dp(eta: TransitCostMatrix, objective: Objective) -> SolveResult:
    t0 = time.perf_counter()
    table = solve_table(eta, weighted=objective is Objective.AVE_AOI)
    traj, value = backtrace(table)
    return SolveResult(traj, value, objective, "dp", time.perf_counter() - t0)


def dp_max_aoi(eta: TransitCostMatrix) -> SolveResult:
    """Trajectory minimising the age of the oldest sample (shortest Hamiltonian path)."""
    return _dp(eta, Objective.MAX_AOI)


def dp_ave_aoi(eta: TransitCostMatrix, m: int | None = None) -> SolveResult:
    """Trajectory minimising the mean sample age (stage-weighted shortest path).

    ``m`` defaults to the matrix size and must agree with it when given.
    """
    if m is not None and m != eta.m:
        raise ValueError(f"m={m} does not match a matrix over {eta.m} nodes")
    return _dp(eta, Objective.AVE_AOI)


def dp_solve(eta: TransitCostMatrix, objective: Objective | str) -> SolveResult:
    return _dp(eta, Objective(objective))


@lru_cache(maxsize=None)
def _all_orders(m: int) -> np.ndarray:
    arr = np.array(list(itertools.permutations(range(1, m + 1))), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def brute_force(eta: TransitCostMatrix, objective: Objective | str, chunk: int = 1 << 17) -> SolveResult:
    """Score every one of the M! trajectories; lexicographically first minimiser wins."""
    objective = Objective(objective)
    m = eta.m
    _check_capacity(m, MAX_BRUTE_NODES, "brute force")
    t0 = time.perf_counter()
    orders = _all_orders(m)
    best_val, best_idx = np.inf, -1
    for start in range(0, len(orders), chunk):
        vals = batch_objective(orders[start:start + chunk], eta, objective)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_idx = float(vals[j]), start + j
    traj = check_trajectory(orders[best_idx], m)
    return SolveResult(traj, objective_value(traj, eta, objective), objective, "brute", time.perf_counter() - t0)
