"""Level energies, spherical-harmonics entropy (SHE) and order selection.

The per-level energy is ``E(l) = (1/N) sum_{|m|<=l} |S_{l,m}|**2`` (summed over
channels), the level distribution ``P(l) = E(l) / sum_l E(l)`` and the entropy
``SHE(J) = -sum_{l<=J} P(l) log P(l)``.  By default ``N = 1`` and each
``SHE(J)`` is normalized over levels ``0..J`` only, so it is the entropy of a
genuine distribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpectrumError, DomainError, NoConvergenceError
from .transform import CoefficientPyramid

__all__ = [
    "LevelSpectrum",
    "OrderSelectionReport",
    "SheCurve",
    "detail_energy",
    "level_energies",
    "level_spectrum",
    "log_factor",
    "select_order",
    "she",
    "she_curve",
]

CRITERIA = ("stabilization", "flowchart")
NORMALIZERS = ("unit", "per-level")
NORMALIZATIONS = ("prefix", "total")


def log_factor(log_base) -> float:
    """Divisor turning natural logs into logs of ``log_base`` ('e', 2, 10, ...)."""
    if log_base in ("e", None):
        return 1.0
    base = float(log_base)
    if base <= 0 or base == 1:
        raise DomainError(f"invalid log base {log_base!r}")
    return math.log(base)


def detail_energy(pyramid: CoefficientPyramid, l: int, m: int) -> float:
    """|S_{l,m}|**2, summed over channels."""
    if l < 0 or l > pyramid.L or abs(m) > l:
        raise IndexError(f"(l, m) = ({l}, {m}) outside pyramid of band limit {pyramid.L}")
    return float(sum(abs(pyramid[l, m, c]) ** 2 for c in range(pyramid.channels)))


def level_energies(pyramid: CoefficientPyramid, normalizer: str = "unit") -> np.ndarray:
    if normalizer not in NORMALIZERS:
        raise DomainError(f"normalizer must be one of {NORMALIZERS}")
    detail = np.abs(pyramid.coeffs) ** 2
    e = np.array([detail[:, l * l : (l + 1) ** 2].sum() for l in range(pyramid.L + 1)])
    if normalizer == "per-level":
        e = e / (2 * np.arange(pyramid.L + 1) + 1)
    return e


@dataclass(frozen=True)
class LevelSpectrum:
    detail: np.ndarray  # (channels summed) |S_{l,m}|^2 in canonical order
    level: np.ndarray
    total: float
    probabilities: np.ndarray
    normalizer: str = "unit"

    @property
    def L(self) -> int:
        return len(self.level) - 1


def level_spectrum(pyramid: CoefficientPyramid, normalizer: str = "unit") -> LevelSpectrum:
    level = level_energies(pyramid, normalizer)
    total = float(math.fsum(level))
    if total <= 0:
        raise DegenerateSpectrumError("pyramid carries no energy; level probabilities undefined")
    detail = (np.abs(pyramid.coeffs) ** 2).sum(axis=0)
    return LevelSpectrum(detail, level, total, level / total, normalizer)


def _entropy(p: np.ndarray, factor: float) -> float:
    nz = p[p > 0]
    h = -float(np.sum(nz * np.log(nz))) / factor
    return h if h > 0 else 0.0


def she(pyramid: CoefficientPyramid, J: int | None = None, log_base="e",
        normalization: str = "prefix", normalizer: str = "unit") -> float:
    """SHE(J).  ``normalization='total'`` divides by the full-band energy instead."""
    J = pyramid.L if J is None else J
    if J < 0 or J > pyramid.L:
        raise DomainError(f"J={J} outside 0..{pyramid.L}")
    if normalization not in NORMALIZATIONS:
        raise DomainError(f"normalization must be one of {NORMALIZATIONS}")
    e = level_energies(pyramid, normalizer)
    denom = e[: J + 1].sum() if normalization == "prefix" else e.sum()
    if e[: J + 1].sum() <= 0 or denom <= 0:
        raise DegenerateSpectrumError(f"levels 0..{J} carry no energy")
    return _entropy(e[: J + 1] / denom, log_factor(log_base))


@dataclass(frozen=True)
class SheCurve:
    values: np.ndarray  # SHE(J), J = 0..L
    log_base: str = "e"
    degenerate: np.ndarray = field(default=None)  # True where the prefix had no energy
    cumulative_energy_fraction: np.ndarray = field(default=None)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, J):
        return float(self.values[J])


def she_curve(pyramid: CoefficientPyramid, log_base="e", normalization: str = "prefix",
              normalizer: str = "unit") -> SheCurve:
    if normalization not in NORMALIZATIONS:
        raise DomainError(f"normalization must be one of {NORMALIZATIONS}")
    e = level_energies(pyramid, normalizer)
    total = e.sum()
    cum = np.cumsum(e)
    factor = log_factor(log_base)
    values = np.zeros(len(e))
    degenerate = cum <= 0
    for J in range(len(e)):
        if degenerate[J]:
            continue
        denom = cum[J] if normalization == "prefix" else total
        values[J] = _entropy(e[: J + 1] / denom, factor)
    frac = cum / total if total > 0 else np.zeros(len(e))
    return SheCurve(values, str(log_base), degenerate, frac)


@dataclass
class OrderSelectionReport:
    selected_order: int
    criterion: str
    epsilon: float
    window: int
    trace: list = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "selected_order": self.selected_order,
            "criterion": self.criterion,
            "epsilon": self.epsilon,
            "window": self.window,
            "note": self.note,
            "trace": self.trace,
        }


def select_order(pyramid: CoefficientPyramid, epsilon: float = 1e-6, window: int = 2,
                 criterion: str = "stabilization", log_base="e",
                 normalization: str = "prefix") -> OrderSelectionReport:
    """Pick the reconstruction order from the SHE curve.

    ``stabilization``: the smallest J* at which SHE has been nonzero (> epsilon)
    at least once and ``|SHE(J) - SHE(J-1)| < epsilon`` for every J in
    ``(J*, J* + window]``.  A curve that stays below epsilon everywhere means
    all energy sits at level 0, and order 0 is returned.

    ``flowchart``: the first l with SHE(l) > epsilon gives order l + 2.

    Raises NoConvergenceError (carrying the partial report) when the chosen
    criterion cannot fire within the band limit.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if window < 1:
        raise DomainError("window must be at least 1")
    if criterion not in CRITERIA:
        raise DomainError(f"criterion must be one of {CRITERIA}")
    curve = she_curve(pyramid, log_base, normalization)
    v = curve.values
    L = len(v) - 1
    trace = []
    for J in range(L + 1):
        delta = float(v[J] - v[J - 1]) if J else None
        trace.append({
            "J": J,
            "she": float(v[J]),
            "delta": delta,
            "stable": bool(delta is not None and abs(delta) < epsilon),
            "degenerate": bool(curve.degenerate[J]),
            "decision": "continue",
        })
    report = OrderSelectionReport(-1, criterion, float(epsilon), int(window), trace)

    if criterion == "flowchart":
        for J in range(L + 1):
            if v[J] > epsilon:
                order = J + 2
                trace[J]["decision"] = f"SHE nonzero -> order {order}"
                if order > L:
                    raise NoConvergenceError(
                        f"flowchart order {order} exceeds band limit {L}", report)
                report.selected_order = order
                return report
        raise NoConvergenceError(f"SHE stayed zero up to L={L}", report)

    if np.all(np.abs(v) < epsilon) and not np.all(curve.degenerate):
        report.selected_order = 0
        report.note = "SHE identically zero: all energy at level 0"
        trace[0]["decision"] = "select"
        return report
    seen_nonzero = False
    for J in range(L + 1):
        seen_nonzero = seen_nonzero or v[J] > epsilon
        if not seen_nonzero:
            continue
        if J + window > L:
            break
        if all(trace[K]["stable"] for K in range(J + 1, J + window + 1)):
            trace[J]["decision"] = "select"
            report.selected_order = J
            return report
    raise NoConvergenceError(
        f"SHE did not stay within {epsilon:g} for {window} consecutive levels before L={L}",
        report,
    )
