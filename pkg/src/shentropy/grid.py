"""Structured sampling grids on the sphere with quadrature weights."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["SphereGrid", "gauss_grid", "equiangular_grid", "WEIGHT_SUM_RTOL"]

FOUR_PI = 4.0 * math.pi

#: relative tolerance on sum(weights) == 4 pi, per grid kind
WEIGHT_SUM_RTOL = {"gauss-legendre": 1e-12, "equiangular": 1e-3}


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Product grid of colatitudes x longitudes.

    Nodes are ordered theta-major: node ``i * n_phi + j`` sits at
    ``(thetas[i], phis[j])``.  ``weights`` has shape ``(n_theta, n_phi)``
    and is in steradians.
    """

    kind: str
    thetas: np.ndarray
    phis: np.ndarray
    weights: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        phis = np.asarray(self.phis, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if thetas.ndim != 1 or phis.ndim != 1 or len(thetas) == 0 or len(phis) == 0:
            raise DomainError("thetas and phis must be nonempty 1-D arrays")
        if weights.shape != (len(thetas), len(phis)):
            raise DomainError(
                f"weights shape {weights.shape} does not match grid {(len(thetas), len(phis))}"
            )
        if np.any(thetas < 0) or np.any(thetas > math.pi):
            raise DomainError("colatitudes must lie in [0, pi]")
        if not np.all(weights > 0):
            raise DomainError("quadrature weights must be positive")
        for arr in (thetas, phis, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "weights", weights)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.thetas), len(self.phis)

    @property
    def n_nodes(self) -> int:
        return len(self.thetas) * len(self.phis)

    @property
    def node_thetas(self) -> np.ndarray:
        return np.repeat(self.thetas, len(self.phis))

    @property
    def node_phis(self) -> np.ndarray:
        return np.tile(self.phis, len(self.thetas))

    @property
    def node_weights(self) -> np.ndarray:
        return self.weights.ravel()

    @property
    def total_weight(self) -> float:
        return float(math.fsum(self.node_weights))

    @property
    def band_limit(self) -> int | None:
        """Largest L for which analysis is exact; None if not guaranteed."""
        if self.kind == "gauss-legendre":
            return int(self.params["L"])
        return None

    @property
    def alias_free_limit(self) -> int:
        n = min(self.shape)
        return (n - 1) // 2

    def weight_sum_error(self) -> float:
        return abs(self.total_weight - FOUR_PI) / FOUR_PI

    def weight_sum_tolerance(self) -> float:
        """Allowed relative deviation of the weight sum from 4 pi.

        Non-Gauss grids get at least the midpoint-rule error bound
        pi * dtheta**2 / 48 for the integral of sin(theta), so coarse
        equiangular grids are not rejected for honest quadrature error.
        """
        if self.kind == "gauss-legendre":
            return WEIGHT_SUM_RTOL[self.kind]
        dtheta = math.pi / len(self.thetas)
        return max(WEIGHT_SUM_RTOL["equiangular"], math.pi * dtheta**2 / 48)

    def check_weight_sum(self, rtol: float | None = None) -> None:
        tol = self.weight_sum_tolerance() if rtol is None else rtol
        err = self.weight_sum_error()
        if err > tol:
            raise DomainError(
                f"weights sum to {self.total_weight!r}, relative error {err:.3e} from 4*pi exceeds {tol:g}"
            )


def gauss_grid(L: int) -> SphereGrid:
    """Gauss-Legendre grid exact for products of harmonics of degree <= L.

    L + 1 Gauss nodes in cos(theta), 2L + 2 uniform longitudes.
    """
    if int(L) != L or L < 0:
        raise DomainError(f"L must be a nonnegative integer, got {L}")
    L = int(L)
    x, w = np.polynomial.legendre.leggauss(L + 1)
    order = np.argsort(-x)  # ascending theta
    thetas = np.arccos(x[order])
    n_phi = 2 * L + 2
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    weights = np.outer(w[order], np.full(n_phi, 2.0 * math.pi / n_phi))
    return SphereGrid("gauss-legendre", thetas, phis, weights, {"L": L})


def equiangular_grid(n_theta: int, n_phi: int) -> SphereGrid:
    """Midpoint equiangular grid with weights sin(theta) dtheta dphi."""
    if n_theta < 2 or n_phi < 2:
        raise DomainError(f"need n_theta, n_phi >= 2, got {n_theta}, {n_phi}")
    d_theta = math.pi / n_theta
    d_phi = 2.0 * math.pi / n_phi
    thetas = (np.arange(n_theta) + 0.5) * d_theta
    phis = np.arange(n_phi) * d_phi
    weights = np.outer(np.sin(thetas) * d_theta, np.full(n_phi, d_phi))
    return SphereGrid(
        "equiangular", thetas, phis, weights, {"n_theta": int(n_theta), "n_phi": int(n_phi)}
    )
