import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shentropy import (
    CoefficientPyramid,
    analyze,
    builtin_shapes,
    detail_energy,
    generate,
    level_spectrum,
    lm_index,
    n_coefficients,
    select_order,
    she,
    she_curve,
)
from shentropy.entropy import level_energies
from shentropy.errors import DegenerateSpectrumError, DomainError, NoConvergenceError

from conftest import real_pyramid


def pyramid_with_levels(L, energies):
    """Zonal pyramid with |S_{l,0}|^2 = energies[l]."""
    c = np.zeros(n_coefficients(L), dtype=complex)
    for l, e in energies.items():
        c[lm_index(l, 0)] = math.sqrt(e)
    return CoefficientPyramid(L, c)


def test_detail_energy():
    pyr = CoefficientPyramid.from_dict(2, {(1, 1): 3 + 4j})
    assert detail_energy(pyr, 1, 1) == 25.0
    assert detail_energy(pyr, 2, 0) == 0.0
    with pytest.raises(IndexError):
        detail_energy(pyr, 3, 0)
    with pytest.raises(IndexError):
        detail_energy(pyr, 1, 2)
    g_pyr = analyze(generate(builtin_shapes()["unit-sphere"]), 2)
    assert detail_energy(g_pyr, 0, 0) == pytest.approx(4 * math.pi, rel=1e-13)


def test_detail_energy_sums_channels():
    pyr = CoefficientPyramid.from_dict(1, {(1, 0, 0): 1.0, (1, 0, 2): 2.0}, channels=3)
    assert detail_energy(pyr, 1, 0) == 5.0


def test_level_spectrum_examples():
    ls = level_spectrum(CoefficientPyramid.from_dict(3, {(2, -1): 0.7j}))
    np.testing.assert_array_equal(ls.probabilities, [0, 0, 1, 0])
    ls = level_spectrum(pyramid_with_levels(3, {1: 2.0, 3: 2.0}))
    np.testing.assert_allclose(ls.probabilities, [0, 0.5, 0, 0.5])
    ls = level_spectrum(real_pyramid(9, seed=3))
    assert math.fsum(ls.probabilities) == pytest.approx(1.0, abs=1e-12)
    assert ls.total == pytest.approx(math.fsum(ls.level))
    with pytest.raises(DegenerateSpectrumError):
        level_spectrum(CoefficientPyramid(2, np.zeros(9)))


def test_per_level_normalizer_is_optional():
    pyr = real_pyramid(4, seed=0)
    np.testing.assert_allclose(level_energies(pyr, "per-level") * (2 * np.arange(5) + 1), level_energies(pyr))
    with pytest.raises(DomainError):
        level_energies(pyr, "bogus")


def test_she_examples():
    assert she(pyramid_with_levels(5, {3: 1.7})) == 0.0
    assert she(pyramid_with_levels(5, {0: 1.0, 4: 1.0})) == pytest.approx(math.log(2), abs=1e-12)
    assert she(pyramid_with_levels(5, {0: 1.0, 4: 1.0}), log_base=2) == pytest.approx(1.0, abs=1e-12)
    uniform = pyramid_with_levels(6, {l: 0.3 for l in range(7)})
    assert she(uniform) == pytest.approx(math.log(7), abs=1e-12)
    assert she(uniform, J=3) == pytest.approx(math.log(4), abs=1e-12)


def test_she_errors():
    pyr = pyramid_with_levels(4, {3: 1.0})
    with pytest.raises(DegenerateSpectrumError):
        she(pyr, J=2)
    with pytest.raises(DomainError):
        she(pyr, J=5)
    with pytest.raises(DomainError):
        she(pyr, log_base=1)


def test_total_normalization_flag():
    pyr = pyramid_with_levels(4, {0: 1.0, 1: 1.0, 4: 2.0})
    assert she(pyr, 1) == pytest.approx(math.log(2))
    p = np.array([0.25, 0.25])
    assert she(pyr, 1, normalization="total") == pytest.approx(-np.sum(p * np.log(p)))


def test_curve_plateaus_and_jumps():
    curve = she_curve(pyramid_with_levels(10, {0: 1.0, 5: 0.2, 7: 0.05}))
    v = curve.values
    jumps = [J for J in range(1, 11) if abs(v[J] - v[J - 1]) > 1e-12]
    assert jumps == [5, 7]
    assert np.all(v[7:] == v[7])
    assert curve.cumulative_energy_fraction[-1] == pytest.approx(1.0)
    zero = she_curve(pyramid_with_levels(4, {0: 2.0}))
    assert not np.any(zero.values)


def test_curve_degenerate_prefix_flagged():
    curve = she_curve(pyramid_with_levels(4, {2: 1.0, 3: 1.0}))
    assert list(curve.degenerate) == [True, True, False, False, False]
    assert curve[0] == 0.0


def test_curve_builtin_shapes_stepwise():
    for name, spec in builtin_shapes().items():
        f = generate(spec)
        v = she_curve(analyze(f, f.grid.band_limit)).values
        top = spec.degree
        assert np.all(np.diff(v[: top + 1]) >= -1e-12), name
        np.testing.assert_allclose(v[top:], v[top], atol=1e-9, err_msg=name)


@st.composite
def pyramids(draw):
    L = draw(st.integers(0, 8))
    vals = draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=n_coefficients(L),
                         max_size=n_coefficients(L)))
    c = np.array(vals, dtype=complex)
    if not np.any(c):
        c[0] = 1.0
    return CoefficientPyramid(L, c)


@settings(max_examples=200, deadline=None)
@given(pyramids(), st.floats(1e-6, 1e6).flatmap(lambda a: st.sampled_from([a, -a])))
def test_she_bounds_and_scale_invariance(pyr, scale):
    curve = she_curve(pyr)
    for J, v in enumerate(curve.values):
        assert 0.0 <= v <= math.log(J + 1) + 1e-12
    first = int(np.argmax(~curve.degenerate))
    J = pyr.L
    if np.sum(np.abs(pyr.coeffs) ** 2) > 0:
        assert abs(she(pyr.scaled(scale), J) - she(pyr, J)) < 1e-12
    assert first <= pyr.L


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 6), st.integers(1, 6), st.floats(0.01, 100))
def test_plateau_property(low, gap, e):
    L = low + gap + 2
    pyr = pyramid_with_levels(L, {0: 1.0, low: e, L: 1.0})
    v = she_curve(pyr).values
    assert np.all(v[low : L] == v[low])


def test_select_examples():
    rep = select_order(pyramid_with_levels(12, {0: 1.0, 5: 0.3, 7: 0.1}))
    assert rep.selected_order == 7 and rep.criterion == "stabilization"
    assert len(rep.trace) == 13 and rep.trace[7]["decision"] == "select"
    rep = select_order(pyramid_with_levels(5, {0: 3.0}))
    assert rep.selected_order == 0 and rep.note
    rep = select_order(real_pyramid(9, seed=1, levels=range(7)))
    assert rep.selected_order == 6


@pytest.mark.parametrize("first,order", [(2, 4), (5, 7), (15, 17)])
def test_flowchart_first_nonzero_patterns(first, order):
    pyr = pyramid_with_levels(order + 3, {0: 1.0, first: 0.1, order: 0.02})
    assert select_order(pyr, criterion="flowchart").selected_order == order
    assert select_order(pyr).selected_order == order


def test_no_convergence_carries_report():
    pyr = real_pyramid(6, seed=2)
    with pytest.raises(NoConvergenceError) as exc:
        select_order(pyr)
    assert exc.value.report.selected_order == -1 and len(exc.value.report.trace) == 7
    with pytest.raises(NoConvergenceError):
        select_order(pyramid_with_levels(4, {0: 1.0, 3: 1.0}), criterion="flowchart")
    with pytest.raises(NoConvergenceError):
        select_order(pyramid_with_levels(4, {0: 1.0}), criterion="flowchart")


def test_select_validation():
    pyr = pyramid_with_levels(4, {0: 1.0})
    for kwargs in ({"epsilon": 0}, {"window": 0}, {"criterion": "aic"}):
        with pytest.raises(DomainError):
            select_order(pyr, **kwargs)


def test_selection_consistency_across_epsilon():
    pyr = pyramid_with_levels(14, {0: 1.0, 3: 0.5, 8: 0.01})
    v = she_curve(pyr).values
    smallest_jump = min(abs(v[3] - v[2]), abs(v[8] - v[7]))
    for eps in (1e-10, 1e-6, smallest_jump / 2):
        # four empty levels between 3 and 8 need a window of at least 5
        assert select_order(pyr, epsilon=eps, window=5).selected_order == 8


def test_gap_wider_than_window_stops_early():
    pyr = pyramid_with_levels(14, {0: 1.0, 3: 0.5, 8: 0.01})
    assert select_order(pyr, window=2).selected_order == 3
    assert select_order(pyr, window=4).selected_order == 3


def test_report_to_dict():
    d = select_order(pyramid_with_levels(8, {0: 1.0, 2: 1.0})).to_dict()
    assert d["selected_order"] == 2 and d["epsilon"] == 1e-6 and d["window"] == 2
    assert {"J", "she", "delta", "stable", "degenerate", "decision"} <= set(d["trace"][0])
