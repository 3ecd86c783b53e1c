"""Complex spherical harmonics, direct and recursive.

Convention::

    Y_{l,m}(theta, phi) = K_{l,m} P_{l,m}(cos theta) exp(i m phi),
    K_{l,m} = (-1)**m sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)

with ``P_{l,m}`` carrying its own ``(-1)**m`` (see :mod:`shentropy.legendre`),
so the two signs cancel for ``m >= 0``.  Negative orders follow
``Y_{l,-m} = (-1)**m conj(Y_{l,m})``.

Columns of every basis matrix are in l-major order, m ascending from -l to l;
``lm_index(l, m) = l*l + l + m``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError
from .grid import SphereGrid
from .legendre import (
    _direct,
    _split,
    _split_coefficients,
    horner,
    horner_dd,
    factorial_ratio,
    recurrence_coefficients,
)

__all__ = [
    "BasisEvaluation",
    "OpCounter",
    "SphericalPoint",
    "basis_matrix",
    "evaluate_basis",
    "lm_index",
    "lm_pairs",
    "n_coefficients",
    "normalization_constant",
    "sh_direct",
    "sh_direct_all",
    "sh_recursive_ladder",
]

DEFAULT_MEMORY_BUDGET = 1 << 30  # bytes

# Real floating-point operations per point, per (l, m >= 0) entry.
RECURSIVE_FLOPS_PER_ENTRY = 20
DIRECT_FLOPS_PER_STEP = 27  # compensated Horner step
PLAIN_FLOPS_PER_STEP = 2
DIRECT_FLOPS_PER_ENTRY = 8

# Plain Horner is used for a direct column only when its a-priori error bound
# 2 n u |K| sum|c_k| on |Y| stays below this; otherwise double-double.
PLAIN_HORNER_TOL = 1e-14

STRATEGIES = ("recursive", "direct")


def lm_index(l: int, m: int) -> int:
    return l * l + l + m


def n_coefficients(L: int) -> int:
    return (L + 1) ** 2


def lm_pairs(L: int) -> list[tuple[int, int]]:
    return [(l, m) for l in range(L + 1) for m in range(-l, l + 1)]


@dataclass
class OpCounter:
    """Tally of floating-point work done by basis evaluation."""

    flops: int = 0
    entries: int = 0
    points: int = 0

    def per_point(self) -> float:
        return self.flops / self.points if self.points else 0.0


@dataclass(frozen=True)
class SphericalPoint:
    theta: float
    phi: float

    def __post_init__(self):
        theta = float(self.theta)
        if not (0.0 <= theta <= math.pi):
            raise DomainError(f"theta must lie in [0, pi], got {theta}")
        phi = float(self.phi) % (2.0 * math.pi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)


@lru_cache(maxsize=None)
def normalization_constant(l: int, m: int) -> float:
    """K_{l,m}; the factorial ratio is a running product."""
    if l < 0 or abs(m) > l:
        raise DomainError(f"need |m| <= l, got l={l}, m={m}")
    sign = -1.0 if m % 2 else 1.0
    return sign * math.sqrt((2 * l + 1) / (4.0 * math.pi) * factorial_ratio(l, m))


def _direct_column(l, m, x, s, phi):
    # m >= 0 only
    p = _direct(l, m, x, s**m if m else 1.0)
    col = normalization_constant(l, m) * p
    if m:
        return col * np.exp(1j * m * phi)
    return col.astype(complex)


def _point_arrays(point):
    if not isinstance(point, SphericalPoint):
        point = SphericalPoint(*point)
    return np.array([point.theta]), np.array([point.phi])


def sh_direct(l: int, m: int, point) -> complex:
    """Y_{l,m} at one point from the closed-form definition."""
    if l < 0 or abs(m) > l:
        raise DomainError(f"need |m| <= l, got l={l}, m={m}")
    theta, phi = _point_arrays(point)
    val = complex(_direct_column(l, abs(m), np.cos(theta), np.sin(theta), phi)[0])
    if m < 0:
        val = (-1) ** m * val.conjugate()
    return val


@lru_cache(maxsize=None)
def _plain_horner_ok(l: int, m: int) -> bool:
    hi, _ = _split_coefficients(l, m)
    u = np.finfo(float).eps / 2
    bound = 2 * len(hi) * u * abs(normalization_constant(l, m)) * float(np.sum(np.abs(hi)))
    return bound <= PLAIN_HORNER_TOL


@dataclass(frozen=True)
class BasisEvaluation:
    """All Y_{l,m} at one point for l <= L, in canonical order."""

    L: int
    values: np.ndarray
    strategy: str

    def __getitem__(self, lm: tuple[int, int]) -> complex:
        l, m = lm
        if l > self.L or abs(m) > l:
            raise KeyError(lm)
        return complex(self.values[lm_index(l, m)])

    def __len__(self) -> int:
        return len(self.values)

    def as_dict(self) -> dict[tuple[int, int], complex]:
        return {lm: complex(v) for lm, v in zip(lm_pairs(self.L), self.values)}


@lru_cache(maxsize=None)
def _ladder_coefficients(l: int):
    a = (2 * l - 1) / l  # a_{l-1}
    b = (l - 1) / l  # b_{l-1}
    rc = [recurrence_coefficients(l, m) for m in range(l + 1)]
    along = np.array([a * c.alpha for c in rc[:l]])
    diag = np.array([m * a * c.beta for m, c in enumerate(rc)])[1:]
    back = np.array([b * c.gamma for c in rc[: l - 1]])
    return along, diag, back


def _fill_negative(out, l):
    # out is coefficient-major: out[lm_index, point]
    base = lm_index(l, 0)
    m = np.arange(1, l + 1)
    sign = np.where(m % 2, -1.0, 1.0)[:, None]
    out[base - l : base] = (sign * np.conj(out[base + 1 : base + l + 1]))[::-1]


def _recursive_block(L, x, s, phi, es):
    out = np.empty((n_coefficients(L), len(x)), dtype=complex)
    out[0] = _direct_column(0, 0, x, s, phi)
    if L >= 1:
        out[lm_index(1, 0)] = _direct_column(1, 0, x, s, phi)
        out[lm_index(1, 1)] = _direct_column(1, 1, x, s, phi)
        _fill_negative(out, 1)
    for l in range(2, L + 1):
        along, diag, back = _ladder_coefficients(l)
        base = lm_index(l, 0)
        prev1 = out[lm_index(l - 1, 0) : lm_index(l - 1, l - 1) + 1]
        prev2 = out[lm_index(l - 2, 0) : lm_index(l - 2, l - 2) + 1]
        row = out[base : base + l + 1]
        row[:l] = (along[:, None] * x) * prev1
        row[l] = 0.0
        row[1:] += (diag[:, None] * es) * prev1
        row[: l - 1] -= back[:, None] * prev2
        _fill_negative(out, l)
    return out


def _direct_block(L, x, s, phi, es):
    out = np.empty((n_coefficients(L), len(x)), dtype=complex)
    xs = _split(x)
    for m in range(L + 1):
        # (-1)^m sin^m(theta) exp(i m phi), shared by every degree at this order
        sign = -1.0 if m % 2 else 1.0
        wphase = (sign * s**m) * np.exp(1j * m * phi) if m else np.ones(len(x), dtype=complex)
        for l in range(m, L + 1):
            hi, lo = _split_coefficients(l, m)
            if _plain_horner_ok(l, m):
                poly = horner(hi, x)
            else:
                poly, _ = horner_dd(hi, lo, x, xs)
            np.multiply(normalization_constant(l, m) * poly, wphase, out=out[lm_index(l, m)])
    for l in range(1, L + 1):
        _fill_negative(out, l)
    return out


def _count(strategy, L, n):
    entries = (L + 1) * (L + 2) // 2
    if strategy == "recursive":
        flops = RECURSIVE_FLOPS_PER_ENTRY * entries
    else:
        flops = DIRECT_FLOPS_PER_ENTRY * entries
        for l in range(L + 1):
            for m in range(l + 1):
                per_step = PLAIN_FLOPS_PER_STEP if _plain_horner_ok(l, m) else DIRECT_FLOPS_PER_STEP
                flops += per_step * (l - m)
    return flops * n, entries * n


def evaluate_basis(L: int, theta, phi, strategy: str = "recursive", workers: int = 1,
                   counter: OpCounter | None = None) -> np.ndarray:
    """Basis matrix of shape (len(theta), (L+1)**2) at scattered points.

    The result is a transposed view of a coefficient-major buffer, so each
    column is contiguous in memory.
    """
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if int(L) != L or L < 0:
        raise DomainError(f"L must be a nonnegative integer, got {L}")
    L = int(L)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if theta.shape != phi.shape or theta.ndim != 1:
        raise DomainError("theta and phi must be 1-D arrays of equal length")
    if np.any(theta < 0) or np.any(theta > math.pi):
        raise DomainError("theta must lie in [0, pi]")
    # trig evaluated once on the full arrays so chunking cannot change results
    x, s = np.cos(theta), np.sin(theta)
    es = np.exp(1j * phi) * s
    block = _recursive_block if strategy == "recursive" else _direct_block
    if workers <= 1 or len(theta) < 2 * workers:
        out = block(L, x, s, phi, es).T
    else:
        bounds = np.linspace(0, len(theta), workers + 1).astype(int)
        chunks = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: block(L, x[c], s[c], phi[c], es[c]), chunks))
        out = np.concatenate(parts, axis=1).T
    if counter is not None:
        flops, entries = _count(strategy, L, len(theta))
        counter.flops += flops
        counter.entries += entries
        counter.points += len(theta)
    return out


def basis_matrix(L: int, grid, strategy: str = "recursive", *,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET, workers: int = 1,
                 counter: OpCounter | None = None) -> np.ndarray:
    """Y_{l,m} at every node of ``grid`` (a SphereGrid or a (thetas, phis) pair).

    Row i is node i (theta-major for SphereGrid), column ``lm_index(l, m)``.
    """
    if isinstance(grid, SphereGrid):
        theta, phi = grid.node_thetas, grid.node_phis
    else:
        theta, phi = (np.atleast_1d(np.asarray(a, dtype=float)) for a in grid)
    if len(theta) == 0:
        raise DomainError("grid has no nodes")
    nbytes = len(theta) * n_coefficients(L) * 16
    if nbytes > memory_budget:
        raise ResourceError(
            f"basis matrix for L={L} on {len(theta)} nodes needs {nbytes} bytes, "
            f"budget is {memory_budget}"
        )
    return evaluate_basis(L, theta, phi, strategy, workers=workers, counter=counter)


def sh_recursive_ladder(L: int, point) -> BasisEvaluation:
    """All Y_{l,m}, l <= L, at one point via the degree recurrence."""
    theta, phi = _point_arrays(point)
    return BasisEvaluation(int(L), evaluate_basis(L, theta, phi, "recursive")[0], "recursive")


def sh_direct_all(L: int, point) -> BasisEvaluation:
    theta, phi = _point_arrays(point)
    return BasisEvaluation(int(L), evaluate_basis(L, theta, phi, "direct")[0], "direct")
