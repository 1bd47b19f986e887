"""Independent verification machinery.

Three checkers that deliberately avoid the closed-form solver's algebra:

* a numeric minimiser of one scheduler's row objective (grid enumeration
  over the simplex refined by pairwise line searches), used to validate
  the closed-form best response;
* an equilibrium checker that asks whether any scheduler could gain by
  switching to its numerically optimised row;
* a Monte-Carlo splitter that draws actual Poisson traffic and routes it
  by the allocation, validating the arrival-composition layer.

The availability formula itself is taken as given and is NOT re-derived
or simulated here: reproducing the underlying retrial/crash queue would
require distributional details the model does not pin down.  Only the
layer that composes per-scheduler streams into per-node arrival rates is
simulation-checked.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .model import Allocation, SystemConfig, objective

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_GRID_POINTS = 100_000


def _row_objective_fn(i: int, alloc: Allocation, config: SystemConfig):
    """Objective as a function of scheduler i's row, +inf when infeasible."""
    lam = config.arrival_rates()
    weights = config.load_weights()
    others = alloc.entries.T @ lam - lam[i] * alloc.entries[i]
    lam_i = float(lam[i])

    def fn(row) -> float:
        avail = 1.0 - (others + lam_i * np.asarray(row)) * weights
        if (avail <= 0.0).any() or (avail > 1.0).any():
            return math.inf
        return float(np.sum(1.0 / avail))

    return fn


def _grid_levels(m: int, resolution: float) -> int:
    """Largest grid refinement whose simplex lattice stays enumerable."""
    levels = max(1, round(1.0 / resolution))
    while levels > 1 and math.comb(levels + m - 1, m - 1) > _MAX_GRID_POINTS:
        levels -= 1
    return levels


def _simplex_lattice(m: int, levels: int) -> np.ndarray:
    """All length-m nonnegative integer compositions of `levels`, scaled to 1."""
    points = []
    for cuts in combinations(range(levels + m - 1), m - 1):
        prev = -1
        comp = []
        for c in cuts:
            comp.append(c - prev - 1)
            prev = c
        comp.append(levels + m - 2 - prev)
        points.append(comp)
    return np.array(points, dtype=float) / levels


def _line_search(fn, row: np.ndarray, p: int, q: int, tol: float) -> np.ndarray:
    """Golden-section minimisation along moving mass from node q to node p."""
    lo, hi = -float(row[p]), float(row[q])
    if hi - lo <= tol:
        return row

    def g(t):
        candidate = np.array(row)
        candidate[p] += t
        candidate[q] -= t
        return fn(candidate)

    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = g(x1), g(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = g(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = g(x2)
    t = (a + b) / 2.0
    best = np.array(row)
    best[p] = min(max(best[p] + t, 0.0), 1.0)
    best[q] = min(max(best[q] - t, 0.0), 1.0)
    if fn(best) <= fn(row):
        return best
    return row


def numeric_best_response(i: int, alloc: Allocation, config: SystemConfig,
                          resolution: float = 1e-3) -> np.ndarray:
    """Minimise scheduler i's row objective without the closed form.

    Small node counts (m <= 6) are seeded by enumerating a simplex lattice
    (the lattice is coarsened automatically when a full grid at the given
    resolution would not be enumerable); the seed is then refined by
    repeated pairwise mass-moving line searches, which converge to the
    global optimum because the row objective is strictly convex on the
    simplex.  Larger instances skip the lattice and descend from uniform.

    A scheduler with zero arrival rate has a flat objective; its current
    row is returned unchanged.
    """
    m = config.n_nodes
    lam_i = config.schedulers[i].lam
    if lam_i == 0.0:
        return np.array(alloc.entries[i])

    fn = _row_objective_fn(i, alloc, config)

    if m == 1:
        return np.ones(1)
    if m <= 6:
        lattice = _simplex_lattice(m, _grid_levels(m, resolution))
        lam = config.arrival_rates()
        weights = config.load_weights()
        others = alloc.entries.T @ lam - lam[i] * alloc.entries[i]
        avail = 1.0 - (others + lam_i * lattice) * weights
        feasible = (avail > 0.0).all(axis=1)
        values = np.full(lattice.shape[0], np.inf)
        values[feasible] = np.sum(1.0 / avail[feasible], axis=1)
        row = np.array(lattice[int(np.argmin(values))])
    else:
        row = np.full(m, 1.0 / m)
    if not math.isfinite(fn(row)):
        row = np.full(m, 1.0 / m)

    tol = min(resolution, 1e-6) * 1e-3
    for _ in range(500):
        before = np.array(row)
        for p in range(m):
            for q in range(p + 1, m):
                row = _line_search(fn, row, p, q, tol)
        row = np.maximum(row, 0.0)
        row /= row.sum()
        if np.max(np.abs(row - before)) < 1e-10:
            break
    return row


def nash_check(alloc: Allocation, config: SystemConfig,
               tolerance: float = 1e-6) -> tuple[bool, float]:
    """Can any scheduler lower the objective by switching to its numeric
    best response?  Returns (no_scheduler_can, worst_gain)."""
    worst = 0.0
    current = objective(alloc, config)
    for i in range(config.n_schedulers):
        candidate = numeric_best_response(i, alloc, config)
        value = objective(alloc.replace_row(i, candidate), config)
        worst = max(worst, current - value)
    return worst <= tolerance, worst


def traffic_empirical_rates(alloc: Allocation, config: SystemConfig,
                            horizon: float, seed: int) -> np.ndarray:
    """Simulate Poisson traffic through the allocation and measure per-node rates.

    Each scheduler's arrival count over the horizon is Poisson with mean
    lam_i * horizon, and the arrivals are split across nodes by one
    multinomial draw with the row's probabilities, which is exactly
    independent per-arrival thinning.  Randomness comes from numpy's
    seeded PCG64 generator, so runs are bit-reproducible and portable.
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    rng = np.random.default_rng(seed)
    counts = np.zeros(config.n_nodes)
    for i in range(config.n_schedulers):
        lam_i = config.schedulers[i].lam
        arrivals = int(rng.poisson(lam_i * horizon))
        if arrivals == 0:
            continue
        row = np.asarray(alloc.entries[i], dtype=float)
        counts += rng.multinomial(arrivals, row / row.sum())
    return counts / horizon
