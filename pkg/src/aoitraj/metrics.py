"""Age-of-information bookkeeping for a fixed visit order.

Positions are 1-based throughout, matching "the i-th visited node": position
1 is the first node the UAV hovers over after takeoff, position M the last
one before it returns to the data center.  A trajectory is any sequence
holding each node id 1..M exactly once; the data center (id 0) is implicit
at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DomainError
from .netmodel import TransitCostMatrix

Trajectory = tuple[int, ...]


class Objective(str, Enum):
    MAX_AOI = "max-aoi"
    AVE_AOI = "ave-aoi"

    def __str__(self) -> str:
        return self.value


def check_trajectory(order: Sequence[int], m: int) -> Trajectory:
    """Return ``order`` as a tuple, raising if it is not a permutation of 1..m."""
    traj = tuple(int(v) for v in order)
    if sorted(traj) != list(range(1, m + 1)):
        raise DomainError(f"trajectory {list(traj)} is not a permutation of 1..{m}")
    return traj


def _check_position(i: int, m: int) -> None:
    if not 1 <= i <= m:
        raise DomainError(f"position must lie in 1..{m}, got {i}")


def legs(traj: Sequence[int], eta: TransitCostMatrix) -> list[float]:
    """Inter-visit costs along the path: leg k runs from position k to k+1.

    The last leg closes the path at the data center.  The takeoff leg is not
    part of the list.
    """
    traj = check_trajectory(traj, eta.m)
    e = eta.values
    stops = traj + (0,)
    return [float(e[stops[k], stops[k + 1]]) for k in range(len(traj))]


def node_age(traj: Sequence[int], eta: TransitCostMatrix, i: int) -> float:
    """Age at landing of the sample taken at position ``i``."""
    _check_position(i, eta.m)
    return math.fsum(legs(traj, eta)[i - 1:])


def weighted_partial_age(traj: Sequence[int], eta: TransitCostMatrix, i: int) -> float:
    """Stage-weighted suffix length ``sum_{k>=i} (k/M) * leg_k``."""
    m = eta.m
    _check_position(i, m)
    ls = legs(traj, eta)
    return math.fsum((k / m) * ls[k - 1] for k in range(i, m + 1))


def average_age(traj: Sequence[int], eta: TransitCostMatrix) -> float:
    """Mean of the per-node ages at landing."""
    ls = legs(traj, eta)
    ages = [math.fsum(ls[k:]) for k in range(len(ls))]
    return math.fsum(ages) / len(ages)


def sample_times(
    traj: Sequence[int], eta: TransitCostMatrix, takeoff_leg: float | None = None
) -> list[float]:
    """Instants T_0..T_{M+1}; T_0 = 0 is takeoff and T_{M+1} is landing.

    ``takeoff_leg`` defaults to the flight time from the data center to the
    first node.
    """
    traj = check_trajectory(traj, eta.m)
    if takeoff_leg is None:
        takeoff_leg = eta[0, traj[0]]
    ls = legs(traj, eta)
    return [0.0] + [takeoff_leg + math.fsum(ls[:k]) for k in range(len(ls) + 1)]


def age_at_time(
    traj: Sequence[int],
    eta: TransitCostMatrix,
    takeoff_leg: float | None,
    i: int,
    t: float,
) -> float:
    """Age ``(t - T_i)^+`` of the information sampled at position ``i``."""
    _check_position(i, eta.m)
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    return max(0.0, t - sample_times(traj, eta, takeoff_leg)[i])


def objective_value(traj: Sequence[int], eta: TransitCostMatrix, objective: Objective | str) -> float:
    """Planning objective: oldest age (max-aoi) or stage-weighted length (ave-aoi)."""
    objective = Objective(objective)
    if objective is Objective.MAX_AOI:
        return node_age(traj, eta, 1)
    return weighted_partial_age(traj, eta, 1)


@dataclass(frozen=True)
class AoiReport:
    """Evaluation of one trajectory.

    ``ages`` and ``weighted_partials`` are indexed by trajectory position
    (element 0 is position 1).  ``timestamps[i]`` is T_i, with T_0 = 0 at
    takeoff, so it has M+1 entries.
    """

    trajectory: Trajectory
    ages: tuple[float, ...]
    weighted_partials: tuple[float, ...]
    max_age: float
    avg_age: float
    timestamps: tuple[float, ...]
    mission_end: float

    def value(self, objective: Objective | str) -> float:
        if Objective(objective) is Objective.MAX_AOI:
            return self.max_age
        return self.weighted_partials[0]


def evaluate(
    traj: Sequence[int], eta: TransitCostMatrix, takeoff_leg: float | None = None
) -> AoiReport:
    traj = check_trajectory(traj, eta.m)
    m = eta.m
    ls = legs(traj, eta)
    ages = tuple(math.fsum(ls[k:]) for k in range(m))
    partials = tuple(math.fsum((k / m) * ls[k - 1] for k in range(i, m + 1)) for i in range(1, m + 1))
    times = sample_times(traj, eta, takeoff_leg)
    return AoiReport(
        trajectory=traj,
        ages=ages,
        weighted_partials=partials,
        max_age=ages[0],
        avg_age=math.fsum(ages) / m,
        timestamps=tuple(times[:-1]),
        mission_end=times[1] + ages[0],
    )


def batch_objective(orders: np.ndarray, eta: TransitCostMatrix, objective: Objective | str) -> np.ndarray:
    """Vectorised objective for an (n, M) array of trajectories.

    The average is taken as the mean of suffix sums, not through the
    stage-weighted form, so it stays independent of the DP recursion.
    """
    objective = Objective(objective)
    orders = np.asarray(orders)
    e = eta.values
    stops = np.concatenate([orders, np.zeros((orders.shape[0], 1), dtype=orders.dtype)], axis=1)
    ls = e[stops[:, :-1], stops[:, 1:]]
    if objective is Objective.MAX_AOI:
        return ls.sum(axis=1)
    ages = np.cumsum(ls[:, ::-1], axis=1)[:, ::-1]
    return ages.mean(axis=1)
