import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geophase.errors import FitFailure
from geophase.fitting import fit_cosine


@given(st.floats(0.5, 5), st.floats(0.1, 0.5), st.floats(-3.1, 3.1), st.sampled_from([1, 2]))
def test_exact_fringe_recovered(a, b, c, k):
    x = np.linspace(0, 2 * math.pi, 16, endpoint=False)
    fit = fit_cosine(x, a + b * np.cos(k * x - c), harmonic=k)
    assert fit.offset == pytest.approx(a, abs=1e-12)
    assert fit.amplitude == pytest.approx(b, abs=1e-12)
    assert abs(math.remainder(fit.phase - c, 2 * math.pi)) < 1e-10
    assert fit.maximum == pytest.approx(a + b) and fit.minimum == pytest.approx(a - b)


def test_too_few_points():
    with pytest.raises(FitFailure):
        fit_cosine([0.0, 1.0], [1.0, 2.0])


def test_flat_fringe_is_not_significant():
    x = np.linspace(0, 2 * math.pi, 32, endpoint=False)
    rng = np.random.default_rng(1)
    y = rng.poisson(1e4, size=x.size).astype(float)
    with pytest.raises(FitFailure):
        fit_cosine(x, y, variance=y)
    with pytest.raises(FitFailure):
        fit_cosine(x, np.full_like(x, 3.0))


def test_weighted_covariance_matches_scatter():
    x = np.linspace(0, 2 * math.pi, 32, endpoint=False)
    mean = 1e4 * (1 + 0.5 * np.cos(x - 0.3))
    rng = np.random.default_rng(7)
    fits = [fit_cosine(x, y, variance=y) for y in rng.poisson(mean, size=(2000, x.size)).astype(float)]
    amps = np.array([f.amplitude for f in fits])
    reported = np.mean([f.amplitude_sigma for f in fits])
    assert np.std(amps) == pytest.approx(reported, rel=0.06)
