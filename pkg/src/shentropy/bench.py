"""Timing harness comparing direct and recursive basis evaluation."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .basis import STRATEGIES, OpCounter, evaluate_basis, n_coefficients
from .grid import equiangular_grid

__all__ = ["BenchRow", "fit_exponent", "run_bench", "time_basis"]

CHUNK_BYTES = 16 << 20


@dataclass
class BenchRow:
    strategy: str
    L: int
    n_points: int
    seconds: float
    flops: int
    repeats: int

    @property
    def per_point_seconds(self) -> float:
        return self.seconds / self.n_points

    @property
    def per_point_flops(self) -> float:
        return self.flops / self.n_points

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "L": self.L,
            "N": self.n_points,
            "seconds": self.seconds,
            "per_point_seconds": self.per_point_seconds,
            "flops": self.flops,
            "per_point_flops": self.per_point_flops,
            "repeats": self.repeats,
        }


def _points(n_points: int):
    side = math.isqrt(n_points)
    if side * side == n_points:
        g = equiangular_grid(side, side)
        return g.node_thetas, g.node_phis
    # deterministic scattered points otherwise
    rng = np.random.default_rng(0)
    return np.arccos(rng.uniform(-1, 1, n_points)), rng.uniform(0, 2 * np.pi, n_points)


def time_basis(L: int, theta, phi, strategy: str, budget: float = 1.0,
               min_repeats: int = 3, max_repeats: int = 50) -> tuple[float, int, int]:
    """Best-of-repeats wall time for the full basis on all points.

    Rows are evaluated in chunks of at most CHUNK_BYTES of output so memory
    stays bounded; chunks are discarded after evaluation.
    """
    rows = max(64, CHUNK_BYTES // (16 * n_coefficients(L)))
    counter = OpCounter()
    for lo in range(0, len(theta), rows):
        evaluate_basis(L, theta[lo : lo + rows], phi[lo : lo + rows], strategy, counter=counter)
    best, total, n = math.inf, 0.0, 0
    while n < min_repeats or (total < budget and n < max_repeats):
        t0 = time.perf_counter()
        for lo in range(0, len(theta), rows):
            evaluate_basis(L, theta[lo : lo + rows], phi[lo : lo + rows], strategy)
        dt = time.perf_counter() - t0
        best, total, n = min(best, dt), total + dt, n + 1
    return best, counter.flops, n


def run_bench(lmaxes=(8, 16, 32, 64), sizes=(8281,), strategies=STRATEGIES,
              budget: float = 1.0, progress=None) -> list[BenchRow]:
    rows = []
    for n_points in sizes:
        theta, phi = _points(n_points)
        for L in lmaxes:
            for strategy in strategies:
                seconds, flops, reps = time_basis(L, theta, phi, strategy, budget)
                row = BenchRow(strategy, L, n_points, seconds, flops, reps)
                rows.append(row)
                if progress:
                    progress(row)
    return rows


def fit_exponent(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(slope)
