"""
Benchmark objectives on the unit box, for exercising the optimizer.

Each function takes a position in [0, 1]^d and returns a non-negative
value whose known minimum is 0.
"""
from typing import Callable, Dict

import numpy as np

from utils.errors import ConfigError

RASTRIGIN_SPAN = 5.12


# Sphere centred in the box
# f(0.5, ..., 0.5) = 0
def sphere(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum((x - 0.5) ** 2))


# Rastrigin rescaled so the box maps onto [-5.12, 5.12]^d
# f(0.5, ..., 0.5) = 0
def rastrigin(x) -> float:
    z = (np.asarray(x, dtype=float) - 0.5) * 2 * RASTRIGIN_SPAN
    return float(10 * z.size + np.sum(z ** 2 - 10 * np.cos(2 * np.pi * z)))


# Absolute distance to a quarter
# f(0.25, ..., 0.25) = 0
def absolute(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(np.abs(x - 0.25)))


BENCHMARKS: Dict[str, Callable[[np.ndarray], float]] = {
    "sphere": sphere,
    "rastrigin": rastrigin,
    "absolute": absolute,
}

OPTIMA: Dict[str, float] = {"sphere": 0.5, "rastrigin": 0.5, "absolute": 0.25}


def get_benchmark(name: str) -> Callable[[np.ndarray], float]:
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise ConfigError(f"unknown benchmark '{name}' (choose from {', '.join(BENCHMARKS)})") from None
