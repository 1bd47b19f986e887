"""Evaluation quantities: per-node reciprocals and the fairness index."""

from __future__ import annotations

import numpy as np

from .errors import DivisionByZeroAvailability, EmptyInput
from .model import Allocation, SystemConfig, availability_vector


def fairness_index(values) -> float:
    """Jain-style fairness index: (sum v)**2 / (n * sum v**2).

    Equals 1 exactly when all values are equal and decreases as they
    spread.  Empty or all-zero input has no defined index and raises
    EmptyInput rather than returning 0/0.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyInput("fairness index of an empty value list")
    square_sum = float(np.sum(values**2))
    if square_sum == 0.0:
        raise EmptyInput("fairness index of an all-zero value list")
    return float(np.sum(values)) ** 2 / (values.size * square_sum)


def per_node_reciprocals(alloc: Allocation, config: SystemConfig) -> list[float]:
    """Reciprocal steady-state availability of each node; sums to the objective."""
    avail = availability_vector(alloc, config)
    zero = avail == 0.0
    if zero.any():
        raise DivisionByZeroAvailability(int(np.argmax(zero)))
    return [float(x) for x in 1.0 / avail]
