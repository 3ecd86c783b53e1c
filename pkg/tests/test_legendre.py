import math
from fractions import Fraction

import numpy as np
import pytest

from shentropy.errors import DomainError
from shentropy.legendre import (
    assoc_legendre_direct,
    assoc_legendre_recursive,
    assoc_legendre_table,
    bi_filter,
    factorial_ratio,
    legacy_gamma,
    legendre,
    legendre_coefficients,
    recurrence_coefficients,
)
from shentropy.basis import normalization_constant


@pytest.mark.parametrize("n,x,expected", [(0, 0.3, 1.0), (1, 0.3, 0.3), (2, 0.5, -0.125), (5, 1.0, 1.0)])
def test_legendre_examples(n, x, expected):
    assert legendre(n, x) == pytest.approx(expected, abs=1e-15)


def test_legendre_endpoints_and_parity():
    for n in range(25):
        assert legendre(n, 1.0) == pytest.approx(1.0, abs=1e-13)
        assert legendre(n, -1.0) == pytest.approx((-1) ** n, abs=1e-13)
    x = np.linspace(-1, 1, 41)
    for n in range(12):
        np.testing.assert_allclose(legendre(n, -x), (-1) ** n * legendre(n, x), atol=1e-14)


def test_legendre_matches_numpy_basis():
    x = np.linspace(-1, 1, 57)
    for n in range(30):
        ref = np.polynomial.legendre.Legendre.basis(n)(x)
        np.testing.assert_allclose(legendre(n, x), ref, atol=1e-12)


def test_legendre_exact_coefficients():
    assert legendre_coefficients(2) == (Fraction(-1, 2), Fraction(0), Fraction(3, 2))
    assert legendre_coefficients(3) == (Fraction(0), Fraction(-3, 2), Fraction(0), Fraction(5, 2))


def test_legendre_scalar_in_scalar_out():
    assert isinstance(legendre(3, 0.2), float)
    assert legendre(3, np.array([0.2, 0.4])).shape == (2,)


@pytest.mark.parametrize("bad", [(-1, 0.5), (2, 1.5), (2, -1.0001)])
def test_legendre_domain(bad):
    with pytest.raises(DomainError):
        legendre(*bad)


def test_assoc_direct_examples():
    assert assoc_legendre_direct(1, 1, 0.0) == pytest.approx(-1.0, abs=1e-15)
    assert assoc_legendre_direct(2, 1, 0.5) == pytest.approx(-1.299038105676658, abs=1e-14)
    x = np.linspace(-1, 1, 21)
    for l in range(10):
        np.testing.assert_allclose(assoc_legendre_direct(l, 0, x), legendre(l, x), atol=1e-13)


def test_assoc_recursive_examples():
    assert assoc_legendre_recursive(2, 0, 0.5) == pytest.approx(-0.125, abs=1e-15)
    assert assoc_legendre_recursive(1, 1, 0.0) == pytest.approx(-1.0, abs=1e-15)
    assert assoc_legendre_recursive(3, 2, 0.25) == pytest.approx(assoc_legendre_direct(3, 2, 0.25), rel=1e-13)


def test_assoc_recursive_matches_direct_to_l30():
    x = np.linspace(-1, 1, 101)
    table = assoc_legendre_table(30, x)
    for l in range(31):
        for m in range(l + 1):
            d = assoc_legendre_direct(l, m, x)
            err = np.abs(table[l, m] - d)
            scale = np.abs(d).max()
            # everywhere: error at rounding level of the function's own scale
            assert err.max() <= 1e-13 * scale, (l, m)
            # pointwise bound away from the roots of P_{l,m}; linspace puts
            # x = +-0.19999999999999996 on the roots +-1/5 of P_{13,11}
            off_root = np.abs(d) > 1e-12 * scale
            ok = np.where(np.abs(d) < 1, err < 1e-12, err <= 1e-10 * np.abs(d))
            assert ok[off_root].all(), (l, m, x[off_root & ~ok])


def test_assoc_root_points_are_the_only_exceptions():
    x = np.linspace(-1, 1, 101)
    table = assoc_legendre_table(30, x)
    d = assoc_legendre_direct(13, 11, x)
    mask = np.abs(d) < 1
    exceptions = x[mask & (np.abs(table[13, 11] - d) >= 1e-12)]
    np.testing.assert_allclose(np.abs(exceptions), 0.2, atol=1e-15)


def test_assoc_closed_forms():
    x = np.linspace(-0.99, 0.99, 15)
    s = np.sqrt(1 - x * x)
    np.testing.assert_allclose(assoc_legendre_direct(2, 2, x), 3 * s**2, atol=1e-14)
    np.testing.assert_allclose(assoc_legendre_direct(3, 3, x), -15 * s**3, atol=1e-13)
    np.testing.assert_allclose(assoc_legendre_direct(3, 1, x), -1.5 * (5 * x**2 - 1) * s, atol=1e-13)


def test_assoc_rejects_negative_order():
    with pytest.raises(DomainError):
        assoc_legendre_direct(3, -1, 0.2)
    with pytest.raises(DomainError):
        assoc_legendre_recursive(2, 3, 0.2)


def test_bi_filter_values_and_identities():
    bf = bi_filter(20)
    assert (bf[0], bf[1], bf[9]) == ((1.0, 0.0), (1.5, 0.5), (1.9, 0.9))
    for l in range(21):
        a, b = bf[l]
        assert a > 0 and 0 <= b < 1
        assert (l + 1) * a == pytest.approx(2 * l + 1, rel=1e-15)
        assert (l + 1) * b == pytest.approx(l, abs=1e-14)
    assert len(bf) == 21 and bf.l_max == 20


def test_bi_filter_drives_legendre_recurrence():
    bf = bi_filter(15)
    x = np.linspace(-1, 1, 9)
    for n in range(1, 15):
        a, b = bf[n]
        np.testing.assert_allclose(legendre(n + 1, x), a * x * legendre(n, x) - b * legendre(n - 1, x), atol=1e-14)


def test_recurrence_coefficient_examples():
    assert recurrence_coefficients(1, 0).alpha == pytest.approx(math.sqrt(3), rel=1e-15)
    for l in range(1, 12):
        assert recurrence_coefficients(l, l).alpha == 0.0
    g20 = normalization_constant(2, 0) / normalization_constant(0, 0)
    assert recurrence_coefficients(2, 0).gamma == pytest.approx(g20, rel=1e-14)


def test_recurrence_coefficients_are_normalization_ratios():
    K = normalization_constant
    for l in range(2, 25):
        for m in range(l + 1):
            rc = recurrence_coefficients(l, m)
            assert all(math.isfinite(v) for v in rc)
            if m < l:
                assert rc.alpha == pytest.approx(K(l, m) / K(l - 1, m), rel=1e-13)
            if m >= 1:
                assert rc.beta == pytest.approx(-K(l, m) / K(l - 1, m - 1), rel=1e-13)
            if m < l - 1:
                assert rc.gamma == pytest.approx(K(l, m) / K(l - 2, m), rel=1e-13)


def test_legacy_gamma_discrepancy():
    # The (l - 1) variant agrees only at m = 1 (and where both vanish).
    for l in range(3, 12):
        assert legacy_gamma(l, 1) == pytest.approx(recurrence_coefficients(l, 1).gamma, rel=1e-14)
        assert abs(legacy_gamma(l, 0) - recurrence_coefficients(l, 0).gamma) > 1e-3
    # and it breaks the recurrence against the direct oracle
    x = 0.37
    a, b = bi_filter(4)[3]
    K = normalization_constant
    y = lambda l, m: K(l, m) * assoc_legendre_direct(l, m, x)
    rc = recurrence_coefficients(4, 0)
    good = a * rc.alpha * x * y(3, 0) - b * rc.gamma * y(2, 0)
    bad = a * rc.alpha * x * y(3, 0) - b * legacy_gamma(4, 0) * y(2, 0)
    assert good == pytest.approx(y(4, 0), rel=1e-13)
    assert abs(bad - y(4, 0)) > 1e-3


def test_recurrence_coefficients_domain():
    with pytest.raises(DomainError):
        recurrence_coefficients(0, 0)
    with pytest.raises(DomainError):
        recurrence_coefficients(3, 4)


def test_factorial_ratio_running_product():
    assert factorial_ratio(5, 2) == pytest.approx(math.factorial(3) / math.factorial(7), rel=1e-15)
    assert factorial_ratio(5, -2) == pytest.approx(math.factorial(7) / math.factorial(3), rel=1e-15)
    assert math.isfinite(factorial_ratio(64, 64)) and factorial_ratio(64, 64) > 0
