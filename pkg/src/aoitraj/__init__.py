"""Age-of-information-optimal data-collection tours for a UAV.

A UAV leaves a data center, hovers over every ground sensor node once to
collect a fresh sample, and flies home.  The age of each sample at landing
depends only on the visit order, so planning reduces to a (stage-weighted)
shortest Hamiltonian path over a matrix of inter-visit times.
"""

from .errors import CapacityError, DomainError
from .netmodel import (
    RadioParams,
    Scenario,
    SensorNode,
    TransitCostMatrix,
    random_scenario,
    transit_matrix,
    upload_time,
    uplink_rate,
)
from .metrics import (
    AoiReport,
    Objective,
    age_at_time,
    average_age,
    evaluate,
    node_age,
    objective_value,
    weighted_partial_age,
)
from .exact import SolveResult, brute_force, dp_ave_aoi, dp_max_aoi
from .heuristic import GaParams, fitness, ga_solve, greedy_solve, mutate, pmx_crossover

__all__ = [
    "AoiReport",
    "CapacityError",
    "DomainError",
    "GaParams",
    "Objective",
    "RadioParams",
    "Scenario",
    "SensorNode",
    "SolveResult",
    "TransitCostMatrix",
    "age_at_time",
    "average_age",
    "brute_force",
    "dp_ave_aoi",
    "dp_max_aoi",
    "evaluate",
    "fitness",
    "ga_solve",
    "greedy_solve",
    "mutate",
    "node_age",
    "objective_value",
    "pmx_crossover",
    "random_scenario",
    "transit_matrix",
    "upload_time",
    "uplink_rate",
    "weighted_partial_age",
]

__version__ = "0.1.0"
