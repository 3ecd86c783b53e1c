"""Legendre polynomials and associated Legendre functions.

Two routes are provided for :math:`P_{l,m}(x)`:

* a direct one, built from the exact rational monomial coefficients of
  :math:`P_l`, differentiated ``m`` times in exact arithmetic and evaluated
  with a compensated (double-double) Horner scheme;
* a degree recurrence seeded from the direct values at ``l <= 1``.

Both carry the Condon-Shortley factor ``(-1)**m``::

    P_{l,m}(x) = (-1)**m (1 - x**2)**(m/2) d^m P_l / dx^m

Only ``m >= 0`` is accepted here; negative orders are handled by the
spherical-harmonic layer.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, sqrt
from typing import NamedTuple

import numpy as np

from .errors import DomainError

__all__ = [
    "BiFilter",
    "RecurrenceCoefficients",
    "assoc_legendre_direct",
    "assoc_legendre_recursive",
    "assoc_legendre_table",
    "bi_filter",
    "factorial_ratio",
    "legacy_gamma",
    "legendre",
    "legendre_coefficients",
    "recurrence_coefficients",
]

_SPLITTER = 134217729.0  # 2**27 + 1


def _unit_interval(x, closed=True):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("x must be finite")
    if np.any(np.abs(arr) > 1.0):
        raise DomainError(f"|x| must not exceed 1, got max |x| = {np.max(np.abs(arr))}")
    return arr


def _check_degree_order(l, m):
    if int(l) != l or int(m) != m:
        raise DomainError(f"degree and order must be integers, got l={l}, m={m}")
    if l < 0:
        raise DomainError(f"degree must be nonnegative, got l={l}")
    if m < 0 or m > l:
        raise DomainError(f"order must satisfy 0 <= m <= l, got l={l}, m={m}")


def _result(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


def legendre(n, x):
    """Legendre polynomial P_n(x) by the ascending three-term recurrence.

    ``P_{k+1} = a_k x P_k - b_k P_{k-1}`` with ``a_k = (2k+1)/(k+1)`` and
    ``b_k = k/(k+1)``, starting from ``P_0 = 1`` and ``P_1 = x``.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    xa = _unit_interval(x)
    p_prev = np.ones_like(xa)
    if n == 0:
        return _result(p_prev, x)
    p = xa.copy()
    for k in range(1, int(n)):
        p_prev, p = p, ((2 * k + 1) * xa * p - k * p_prev) / (k + 1)
    return _result(p, x)


@lru_cache(maxsize=None)
def legendre_coefficients(l: int) -> tuple[Fraction, ...]:
    """Exact monomial coefficients of P_l, lowest power first."""
    if l < 0:
        raise DomainError(f"degree must be nonnegative, got {l}")
    c = [Fraction(0)] * (l + 1)
    for j in range(l // 2 + 1):
        c[l - 2 * j] = Fraction((-1) ** j * comb(l, j) * comb(2 * l - 2 * j, l), 2**l)
    return tuple(c)


@lru_cache(maxsize=None)
def _derivative_coefficients(l: int, m: int) -> tuple[Fraction, ...]:
    c = list(legendre_coefficients(l))
    for _ in range(m):
        c = [c[k] * k for k in range(1, len(c))]
    return tuple(c) if c else (Fraction(0),)


@lru_cache(maxsize=None)
def _split_coefficients(l: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    # Each exact coefficient becomes hi + lo with |lo| <= ulp(hi) / 2.
    exact = _derivative_coefficients(l, m)
    hi = np.array([float(c) for c in exact])
    lo = np.array([float(c - Fraction(h)) for c, h in zip(exact, hi)])
    hi.setflags(write=False)
    lo.setflags(write=False)
    return hi, lo


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b, b_split):
    p = a * b
    ah, al = _split(a)
    bh, bl = b_split
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def horner_dd(hi, lo, x, x_split=None):
    """Evaluate sum(c_k x**k) with coefficients given as hi + lo pairs.

    Intermediate values are carried as unevaluated double-double sums, so the
    result is accurate to about ``eps * |p(x)| + eps**2 * sum(|c_k| |x|**k)``
    instead of the ``eps * sum(|c_k| |x|**k)`` of plain Horner.  Returns the
    number of Horner steps alongside the values.  ``x_split`` may carry a
    precomputed ``_split(x)`` when many polynomials share the same points.
    """
    x = np.asarray(x, dtype=float)
    if len(hi) == 1:
        return np.full_like(x, hi[0] + lo[0]), 0
    xs = _split(x) if x_split is None else x_split
    sh, sl = hi[-1], lo[-1]
    for k in range(len(hi) - 2, -1, -1):
        p, pe = _two_prod(sh, x, xs)
        pe = pe + sl * x
        s, se = _two_sum(p, hi[k])
        se = se + (pe + lo[k])
        sh = s + se
        sl = se - (sh - s)
    return sh + sl, len(hi) - 1


def horner(coeffs, x):
    """Plain Horner evaluation of sum(c_k x**k)."""
    x = np.asarray(x, dtype=float)
    acc = np.full_like(x, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * x + c
    return acc


def _direct(l, m, x, weight, x_split=None):
    hi, lo = _split_coefficients(l, m)
    poly, _ = horner_dd(hi, lo, x, x_split)
    sign = -1.0 if m % 2 else 1.0
    return sign * weight * poly


def assoc_legendre_direct(l: int, m: int, x):
    """P_{l,m}(x) from the m-th derivative of the exact expansion of P_l.

    No finite differences are involved: the derivative is taken on exact
    rational coefficients.  Accurate to near machine precision for l <= 64.
    At ``x = +-1`` the value is 0 for ``m >= 1`` and ``P_l(+-1)`` for ``m = 0``.
    """
    _check_degree_order(l, m)
    xa = _unit_interval(x)
    weight = ((1.0 - xa) * (1.0 + xa)) ** (0.5 * m) if m else np.ones_like(xa)
    return _result(_direct(int(l), int(m), xa, weight), x)


def assoc_legendre_table(l_max: int, x, sin_theta=None) -> np.ndarray:
    """All P_{l,m}(x) for 0 <= m <= l <= l_max via the degree recurrence.

    The recurrence used (exact rearrangement of the Legendre three-term rule
    after m-fold differentiation and multiplication by the CS-signed weight)::

        P_{l,m} = a_{l-1} x P_{l-1,m} - m a_{l-1} sqrt(1-x^2) P_{l-1,m-1}
                  - b_{l-1} P_{l-2,m}

    with absent terms (order above degree) taken as zero.  This reaches the
    diagonal m = l through its middle term.  Seeds P_{0,0}, P_{1,0}, P_{1,1}
    come from :func:`assoc_legendre_direct`.

    Returns an array of shape ``(l_max + 1, l_max + 1) + x.shape`` indexed
    ``[l, m]``; entries with m > l are zero.
    """
    if int(l_max) != l_max or l_max < 0:
        raise DomainError(f"l_max must be a nonnegative integer, got {l_max}")
    l_max = int(l_max)
    xa = _unit_interval(x)
    s = np.sqrt((1.0 - xa) * (1.0 + xa)) if sin_theta is None else np.asarray(sin_theta, float)
    table = np.zeros((l_max + 1, l_max + 1) + xa.shape)
    table[0, 0] = _direct(0, 0, xa, 1.0)
    if l_max == 0:
        return table
    table[1, 0] = _direct(1, 0, xa, 1.0)
    table[1, 1] = _direct(1, 1, xa, s)
    for l in range(2, l_max + 1):
        a = (2 * l - 1) / l
        b = (l - 1) / l
        m = np.arange(1, l + 1).reshape((-1,) + (1,) * xa.ndim)
        table[l, : l] = a * xa * table[l - 1, : l]
        table[l, 1 : l + 1] -= m * a * s * table[l - 1, : l]
        table[l, : l - 1] -= b * table[l - 2, : l - 1]
    return table


def assoc_legendre_recursive(l: int, m: int, x):
    """P_{l,m}(x) by the degree recurrence of :func:`assoc_legendre_table`."""
    _check_degree_order(l, m)
    xa = _unit_interval(x)
    return _result(assoc_legendre_table(l, xa)[l, m], x)


@dataclass(frozen=True)
class BiFilter:
    """Table of recurrence pairs a_l = (2l+1)/(l+1), b_l = l/(l+1)."""

    a: np.ndarray
    b: np.ndarray

    @property
    def l_max(self) -> int:
        return len(self.a) - 1

    def __getitem__(self, l: int) -> tuple[float, float]:
        return float(self.a[l]), float(self.b[l])

    def __len__(self) -> int:
        return len(self.a)


def bi_filter(l_max: int) -> BiFilter:
    if l_max < 0:
        raise DomainError(f"l_max must be nonnegative, got {l_max}")
    l = np.arange(l_max + 1, dtype=float)
    a = (2 * l + 1) / (l + 1)
    b = l / (l + 1)
    a.setflags(write=False)
    b.setflags(write=False)
    return BiFilter(a, b)


class RecurrenceCoefficients(NamedTuple):
    alpha: float
    beta: float
    gamma: float


def factorial_ratio(l: int, m: int) -> float:
    """(l - m)! / (l + m)! as a running product; valid for |m| <= l."""
    if abs(m) > l:
        raise DomainError(f"|m| must not exceed l, got l={l}, m={m}")
    r = 1.0
    if m >= 0:
        for k in range(l - m + 1, l + m + 1):
            r /= k
    else:
        for k in range(l + m + 1, l - m + 1):
            r *= k
    return r


def recurrence_coefficients(l: int, m: int) -> RecurrenceCoefficients:
    """Normalization ratios that turn the P-recurrence into a Y-recurrence.

    With ``K_{l,m} = (-1)**m sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)``::

        alpha =  K_{l,m} / K_{l-1,m}   = sqrt((2l+1)(l-m) / ((2l-1)(l+m)))
        beta  = -K_{l,m} / K_{l-1,m-1} = sqrt((2l+1) / ((2l-1)(l+m)(l+m-1)))
        gamma =  K_{l,m} / K_{l-2,m}
              = sqrt((2l+1)(l-m)(l-m-1) / ((2l-3)(l+m)(l+m-1)))

    so that ``Y_{l,m} = a_{l-1} alpha cos(t) Y_{l-1,m}
    + e^{i phi} m a_{l-1} beta sin(t) Y_{l-1,m-1} - b_{l-1} gamma Y_{l-2,m}``.
    A coefficient whose target term does not exist (m > l-1, m = 0 or
    m > l-2 respectively) is returned as 0.
    """
    if int(l) != l or int(m) != m:
        raise DomainError("l and m must be integers")
    if l < 1 or m < 0 or m > l:
        raise DomainError(f"recurrence coefficients need l >= 1 and 0 <= m <= l, got l={l}, m={m}")
    alpha = sqrt((2 * l + 1) * (l - m) / ((2 * l - 1) * (l + m))) if m <= l - 1 else 0.0
    beta = sqrt((2 * l + 1) / ((2 * l - 1) * (l + m) * (l + m - 1))) if m >= 1 else 0.0
    if l >= 2 and m <= l - 2:
        gamma = sqrt((2 * l + 1) * (l - m) * (l - m - 1) / ((2 * l - 3) * (l + m) * (l + m - 1)))
    else:
        gamma = 0.0
    return RecurrenceCoefficients(alpha, beta, gamma)


def legacy_gamma(l: int, m: int) -> float:
    """Gamma variant with the factor (l - 1) in place of (l - m).

    Circulates in the literature; it coincides with the normalization-ratio
    value only at m = 1 and breaks the Y-recurrence elsewhere.  Kept for
    cross-checks, never used in evaluation.
    """
    radicand = (2 * l + 1) * (l - 1) * (l - m - 1) / ((2 * l - 3) * (l + m) * (l + m - 1))
    if radicand < 0:
        raise DomainError(f"negative radicand for l={l}, m={m}")
    return sqrt(radicand)
