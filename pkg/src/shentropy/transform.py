"""Forward and inverse spherical-harmonic transforms on product grids."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import basis_matrix, lm_index, lm_pairs, n_coefficients, normalization_constant
from .errors import BandLimitError, DomainError, OrderError
from .grid import SphereGrid

__all__ = [
    "AliasingWarning",
    "CoefficientPyramid",
    "SampledSphericalField",
    "analyze",
    "field_norm",
    "parseval_check",
    "real_pairs",
    "reconstruct",
    "reconstruct_surface",
    "residual_norm",
    "synthesize",
]


class AliasingWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class SampledSphericalField:
    """Real samples on a SphereGrid; ``values`` has shape (n_nodes, channels)."""

    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] != self.grid.n_nodes:
            raise DomainError(
                f"values shape {values.shape} does not match {self.grid.n_nodes} grid nodes"
            )
        if values.shape[1] not in (1, 3):
            raise DomainError(f"fields carry 1 or 3 channels, got {values.shape[1]}")
        if not np.all(np.isfinite(values)):
            raise DomainError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def channels(self) -> int:
        return self.values.shape[1]

    def channel(self, c: int) -> "SampledSphericalField":
        return SampledSphericalField(self.grid, self.values[:, c])

    def __add__(self, other):
        _check_compatible(self, other)
        return SampledSphericalField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_compatible(self, other)
        return SampledSphericalField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return SampledSphericalField(self.grid, float(c) * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class CoefficientPyramid:
    """Complex S_{l,m} for l <= L; ``coeffs`` has shape (channels, (L+1)**2)."""

    L: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs[None, :]
        if coeffs.ndim != 2 or coeffs.shape[1] != n_coefficients(self.L):
            raise DomainError(
                f"expected {n_coefficients(self.L)} coefficients per channel, got shape {coeffs.shape}"
            )
        if coeffs.shape[0] not in (1, 3):
            raise DomainError(f"pyramids carry 1 or 3 channels, got {coeffs.shape[0]}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def channels(self) -> int:
        return self.coeffs.shape[0]

    def __getitem__(self, lm) -> complex:
        """``pyr[l, m]`` or ``pyr[l, m, channel]``."""
        l, m, *rest = lm
        c = rest[0] if rest else 0
        if l < 0 or l > self.L or abs(m) > l:
            raise IndexError(f"(l, m) = ({l}, {m}) outside pyramid of band limit {self.L}")
        return complex(self.coeffs[c, lm_index(l, m)])

    def level(self, l: int) -> np.ndarray:
        """Coefficients of degree l, shape (channels, 2l+1)."""
        return self.coeffs[:, l * l : (l + 1) * (l + 1)]

    def truncate(self, J: int) -> "CoefficientPyramid":
        if J > self.L:
            raise OrderError(f"cannot truncate band limit {self.L} pyramid at J={J}")
        return CoefficientPyramid(J, self.coeffs[:, : n_coefficients(J)])

    def scaled(self, c) -> "CoefficientPyramid":
        return CoefficientPyramid(self.L, c * self.coeffs)

    def real_symmetry_error(self) -> float:
        """max |S_{l,-m} - (-1)^m conj(S_{l,m})|; zero for real fields."""
        err = 0.0
        for l in range(1, self.L + 1):
            m = np.arange(1, l + 1)
            sign = np.where(m % 2, -1.0, 1.0)
            pos = self.coeffs[:, lm_index(l, 0) + m]
            neg = self.coeffs[:, lm_index(l, 0) - m]
            err = max(err, float(np.max(np.abs(neg - sign * np.conj(pos)))))
        return err

    @classmethod
    def from_dict(cls, L: int, values: dict, channels: int = 1) -> "CoefficientPyramid":
        """Build from ``{(l, m): value}`` (single channel) or ``{(l, m, c): value}``."""
        coeffs = np.zeros((channels, n_coefficients(L)), dtype=complex)
        for key, v in values.items():
            l, m, *rest = key
            coeffs[rest[0] if rest else 0, lm_index(l, m)] = v
        return cls(L, coeffs)


def _check_compatible(a: SampledSphericalField, b: SampledSphericalField):
    if a.grid is not b.grid:
        same = (
            a.grid.shape == b.grid.shape
            and np.array_equal(a.grid.thetas, b.grid.thetas)
            and np.array_equal(a.grid.phis, b.grid.phis)
            and np.array_equal(a.grid.weights, b.grid.weights)
        )
        if not same:
            raise DomainError("fields live on different grids")
    if a.values.shape != b.values.shape:
        raise DomainError(f"channel mismatch: {a.values.shape} vs {b.values.shape}")


def _check_band_limit(grid: SphereGrid, L: int):
    if grid.kind == "gauss-legendre":
        if L > grid.band_limit:
            raise BandLimitError(
                f"band limit L={L} exceeds what gauss grid of parameter {grid.band_limit} resolves"
            )
    elif L > grid.alias_free_limit:
        warnings.warn(
            f"L={L} exceeds the alias-free limit {grid.alias_free_limit} of a "
            f"{grid.shape[0]}x{grid.shape[1]} {grid.kind} grid",
            AliasingWarning,
            stacklevel=3,
        )


def analyze(field: SampledSphericalField, L: int, strategy: str = "recursive",
            workers: int = 1) -> CoefficientPyramid:
    """Quadrature projection S_{l,m} = sum_nodes w f conj(Y_{l,m})."""
    if int(L) != L or L < 0:
        raise DomainError(f"L must be a nonnegative integer, got {L}")
    _check_band_limit(field.grid, L)
    Y = basis_matrix(L, field.grid, strategy, workers=workers)
    wf = field.values * field.grid.node_weights[:, None]
    return CoefficientPyramid(L, wf.T @ Y.conj())


def synthesize(pyramid: CoefficientPyramid, grid: SphereGrid, J: int | None = None,
               strategy: str = "recursive", workers: int = 1) -> SampledSphericalField:
    """Truncated series sum_{l<=J} sum_m S_{l,m} Y_{l,m}; the real part is returned."""
    J = pyramid.L if J is None else int(J)
    if J > pyramid.L or J < 0:
        raise OrderError(f"truncation order J={J} outside 0..{pyramid.L}")
    Y = basis_matrix(J, grid, strategy, workers=workers)
    vals = Y @ pyramid.coeffs[:, : n_coefficients(J)].T
    scale = max(1.0, float(np.max(np.abs(vals.real)))) if vals.size else 1.0
    residue = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    if residue > 1e-9 * scale:
        warnings.warn(
            f"synthesized field has imaginary residue {residue:.3e}; pyramid is not "
            "conjugate-symmetric, returning the real part",
            RuntimeWarning,
            stacklevel=2,
        )
    return SampledSphericalField(grid, vals.real)


def reconstruct(field: SampledSphericalField, J: int, L: int | None = None,
                strategy: str = "recursive") -> SampledSphericalField:
    """Per-channel analysis to L (default J) and synthesis at J on the same grid."""
    L = J if L is None else L
    if J > L:
        raise OrderError(f"J={J} exceeds analysis band limit L={L}")
    pyr = analyze(field, L, strategy)
    return synthesize(pyr, field.grid, J, strategy)


def reconstruct_surface(field: SampledSphericalField, J: int, L: int | None = None,
                        strategy: str = "recursive") -> SampledSphericalField:
    """Reconstruct an (X, Y, Z) surface channel by channel at order J."""
    if field.channels != 3:
        raise DomainError(f"surface reconstruction needs 3 channels, got {field.channels}")
    return reconstruct(field, J, L, strategy)


def field_norm(field: SampledSphericalField) -> float:
    """Quadrature L2 norm, summed over channels."""
    w = field.grid.node_weights
    return math.sqrt(float(np.sum(w[:, None] * field.values**2)))


def residual_norm(original: SampledSphericalField, reconstructed: SampledSphericalField) -> float:
    _check_compatible(original, reconstructed)
    return field_norm(original - reconstructed)


def parseval_check(field: SampledSphericalField, pyramid: CoefficientPyramid) -> dict:
    """Compare coefficient energy with the quadrature norm of the field."""
    coef = float(np.sum(np.abs(pyramid.coeffs) ** 2))
    norm2 = field_norm(field) ** 2
    rel = abs(coef - norm2) / norm2 if norm2 > 0 else abs(coef)
    return {"coefficient_energy": coef, "field_energy": norm2, "relative_error": rel}


def real_pairs(pyramid: CoefficientPyramid, channel: int = 0) -> list[tuple[int, int, float, float]]:
    """Real cosine/sine coefficients (a_l^m, b_l^m), 0 <= m <= l.

    For a real field, ``f = sum_l sum_{m>=0} (a cos(m phi) + b sin(m phi)) P_{l,m}(cos theta)``
    with P_{l,m} as in :func:`shentropy.legendre.assoc_legendre_direct`.
    """
    out = []
    for l, m in lm_pairs(pyramid.L):
        if m < 0:
            continue
        s = pyramid.coeffs[channel, lm_index(l, m)]
        k = normalization_constant(l, m)
        if m == 0:
            out.append((l, 0, k * s.real, 0.0))
        else:
            out.append((l, m, 2 * k * s.real, -2 * k * s.imag))
    return out
