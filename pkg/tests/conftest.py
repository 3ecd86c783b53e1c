import numpy as np
import pytest

from shentropy import CoefficientPyramid, lm_index, n_coefficients


def real_pyramid(L, seed=0, channels=1, levels=None):
    """Random pyramid obeying the real-field symmetry, energy only on ``levels``."""
    rng = np.random.default_rng(seed)
    levels = range(L + 1) if levels is None else levels
    c = np.zeros((channels, n_coefficients(L)), dtype=complex)
    for ch in range(channels):
        for l in levels:
            c[ch, lm_index(l, 0)] = rng.standard_normal()
            for m in range(1, l + 1):
                v = complex(*rng.standard_normal(2))
                c[ch, lm_index(l, m)] = v
                c[ch, lm_index(l, -m)] = (-1) ** m * v.conjugate()
    return CoefficientPyramid(L, c)


@pytest.fixture
def make_pyramid():
    return real_pyramid
