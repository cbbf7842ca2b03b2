import numpy as np

from aoitraj import TransitCostMatrix


def random_eta(rng: np.random.Generator, m: int, low: float = 0.1, high: float = 100.0) -> TransitCostMatrix:
    return TransitCostMatrix(rng.uniform(low, high, size=(m + 1, m + 1)))
