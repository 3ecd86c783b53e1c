"""Synthetic star-shaped test surfaces.

Every shape is a radial function ``r(theta, phi) = 1 + sum Re(c_{l,m} Y_{l,m})``
sampled on a grid, optionally embedded as the 3-channel surface
``(r sin(t) cos(p), r sin(t) sin(p), r cos(t))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import basis_matrix, lm_index
from .errors import DomainError
from .grid import SphereGrid, equiangular_grid, gauss_grid
from .transform import SampledSphericalField

__all__ = ["KINDS", "ShapeSpec", "builtin_shapes", "generate", "radial_amplitudes"]

KINDS = ("unit-sphere", "radial-harmonic-bump", "random-bandlimited")


@dataclass(frozen=True)
class ShapeSpec:
    """Recipe for a synthetic shape.

    ``amplitudes`` is a tuple of ``(l, m, c)`` for radial-harmonic-bump; the
    random kind draws complex amplitudes of size ``scale / (l + 1)`` for every
    0 <= m <= l <= max_degree from ``seed``.  ``grid_size`` is ``(L,)`` for a
    gauss grid or ``(n_theta, n_phi)`` for an equiangular one; left empty, a
    gauss grid resolving ``degree + 4`` is used.
    """

    kind: str
    max_degree: int = 0
    amplitudes: tuple = ()
    seed: int | None = None
    channels: int = 1
    grid_kind: str = "gauss-legendre"
    grid_size: tuple = ()
    scale: float = 0.3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown shape kind {self.kind!r}; expected one of {KINDS}")
        if self.max_degree < 0:
            raise DomainError("max_degree must be nonnegative")
        if self.channels not in (1, 3):
            raise DomainError("channels must be 1 or 3")
        if self.grid_kind not in ("gauss-legendre", "equiangular"):
            raise DomainError(f"unknown grid kind {self.grid_kind!r}")
        amps = tuple((int(l), int(m), complex(c)) for l, m, c in self.amplitudes)
        for l, m, c in amps:
            if l < 0 or abs(m) > l:
                raise DomainError(f"invalid amplitude index ({l}, {m})")
            if not np.isfinite(c):
                raise DomainError(f"amplitude for ({l}, {m}) is not finite")
        object.__setattr__(self, "amplitudes", amps)
        if self.kind == "radial-harmonic-bump" and amps:
            top = max(l for l, _, _ in amps)
            object.__setattr__(self, "max_degree", max(self.max_degree, top))
        if self.kind == "random-bandlimited" and self.seed is None:
            raise DomainError("random-bandlimited shapes need a seed")
        if not np.isfinite(self.scale):
            raise DomainError("scale must be finite")

    @property
    def radial_degree(self) -> int:
        """Highest occupied degree of the radial function."""
        if self.kind == "unit-sphere":
            return 0
        return self.max_degree

    @property
    def degree(self) -> int:
        """Highest occupied degree of the sampled field (the embedding adds one)."""
        return self.radial_degree + (1 if self.channels == 3 else 0)

    def make_grid(self) -> SphereGrid:
        if self.grid_kind == "gauss-legendre":
            L = self.grid_size[0] if self.grid_size else self.degree + 4
            return gauss_grid(L)
        if len(self.grid_size) != 2:
            raise DomainError("equiangular grids need grid_size = (n_theta, n_phi)")
        return equiangular_grid(*self.grid_size)


def radial_amplitudes(spec: ShapeSpec) -> list[tuple[int, int, complex]]:
    """The (l, m, c) terms added to r = 1."""
    if spec.kind == "unit-sphere":
        return []
    if spec.kind == "radial-harmonic-bump":
        return list(spec.amplitudes)
    rng = np.random.default_rng(spec.seed)
    out = []
    for l in range(1, spec.max_degree + 1):
        size = spec.scale / (l + 1)
        for m in range(l + 1):
            re, im = rng.standard_normal(2)
            out.append((l, m, complex(size * re, size * im if m else 0.0)))
    return out


def generate(spec: ShapeSpec, grid: SphereGrid | None = None) -> SampledSphericalField:
    grid = spec.make_grid() if grid is None else grid
    r = np.ones(grid.n_nodes)
    terms = radial_amplitudes(spec)
    if terms:
        Y = basis_matrix(max(l for l, _, _ in terms), grid)
        for l, m, c in terms:
            r += (c * Y[:, lm_index(l, m)]).real
    if spec.channels == 1:
        return SampledSphericalField(grid, r)
    t, p = grid.node_thetas, grid.node_phis
    xyz = np.column_stack((r * np.sin(t) * np.cos(p), r * np.sin(t) * np.sin(p), r * np.cos(t)))
    return SampledSphericalField(grid, xyz)


def builtin_shapes(channels: int = 1) -> dict[str, ShapeSpec]:
    """Named smooth shapes used by tests and demos."""
    return {
        "unit-sphere": ShapeSpec("unit-sphere", channels=channels),
        "bump-4": ShapeSpec("radial-harmonic-bump", amplitudes=((4, 0, 0.2),), channels=channels),
        "levels-0-2-4": ShapeSpec(
            "radial-harmonic-bump",
            amplitudes=((2, 1, 0.15 - 0.05j), (4, 2, 0.1), (4, 0, 0.05)),
            channels=channels,
        ),
        "levels-0-5-7": ShapeSpec(
            "radial-harmonic-bump",
            amplitudes=((5, 3, 0.12), (7, 0, 0.08), (7, 6, 0.02j)),
            channels=channels,
        ),
        "random-7": ShapeSpec("random-bandlimited", max_degree=7, seed=42, channels=channels),
    }
