import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import geophase.bell as bell
from geophase.bell import (
    TSIRELSON,
    AdjustmentResult,
    BellSetting,
    CountRates,
    ProjectorAngles,
    azimuthal_adjust,
    channel_probabilities,
    expectation_analytic,
    expectation_contraction,
    expectation_from_counts,
    numerical_polar_max,
    path_projector,
    polar_adjust,
    polar_s_max,
    s_from_counts,
    s_polar_fixed,
    s_reduced,
    s_standard,
    s_value,
    simulate_counts,
    simulate_s,
    spin_projector,
    uncorrected,
)
from geophase.errors import EmptyCounts, OptimizerStall
from geophase.interferometry import build_entangled_state

from conftest import angles

SQ2 = math.sqrt(2)
I2 = np.eye(2)
proj_angles = st.builds(ProjectorAngles, angles, angles)
settings_ = st.builds(BellSetting, proj_angles, proj_angles, proj_angles, proj_angles)


def test_path_projector_examples():
    assert np.allclose(path_projector(ProjectorAngles(0, 0), 1), [[1, 0], [0, 0]])
    assert np.allclose(path_projector(ProjectorAngles(math.pi, 0), 1), [[0, 0], [0, 1]])
    half = ProjectorAngles(math.pi / 2, 0)
    assert np.allclose(path_projector(half, 1), 0.5 * np.array([[1, 1], [1, 1]]))
    assert np.allclose(path_projector(half, -1), 0.5 * np.array([[1, -1], [-1, 1]]))
    assert np.allclose(spin_projector(ProjectorAngles(0, 0.3), 1), [[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        path_projector(half, 0)


@given(angles, angles)
def test_minus_projector_is_plus_at_shifted_polar(b1, b2):
    assert np.allclose(spin_projector(ProjectorAngles(b1, b2), -1),
                       spin_projector(ProjectorAngles(b1 + math.pi, b2), 1), atol=1e-12)


@given(angles, angles)
def test_projector_completeness_and_orthogonality(a1, a2):
    a = ProjectorAngles(a1, a2)
    p, m = path_projector(a, 1), path_projector(a, -1)
    assert np.allclose(p + m, I2, atol=1e-12)
    assert np.allclose(p @ m, 0, atol=1e-12)
    assert np.allclose(p @ p, p, atol=1e-12)


@given(angles, angles)
def test_normalized_angles_give_same_projector(a1, a2):
    a = ProjectorAngles(a1, a2)
    n = a.normalized()
    assert 0 <= n.polar <= math.pi and -math.pi < n.azimuthal <= math.pi
    assert np.allclose(path_projector(a, 1), path_projector(n, 1), atol=1e-12)


def test_expectation_examples():
    # state (|I,up> + e^{i gamma}|II,down>)/sqrt2: along z the outcomes agree
    for g in (0.0, 1.0, -2.0):
        assert expectation_analytic(ProjectorAngles(0, 0.3), ProjectorAngles(0, -1.2), g) == pytest.approx(1.0)
    # in the equatorial plane the azimuths add and gamma subtracts
    g = 0.8
    a, b = ProjectorAngles(math.pi / 2, 0.5), ProjectorAngles(math.pi / 2, g - 0.5)
    assert expectation_analytic(a, b, g) == pytest.approx(1.0)
    b = ProjectorAngles(math.pi / 2, g - 0.5 + math.pi)
    assert expectation_analytic(a, b, g) == pytest.approx(-1.0)


@given(proj_angles, proj_angles, angles)
def test_expectation_matches_contraction(a, b, g):
    e = expectation_analytic(a, b, g)
    assert e == pytest.approx(expectation_contraction(a, b, build_entangled_state(0.0, g)), abs=1e-12)
    assert -1 - 1e-12 <= e <= 1 + 1e-12


@given(proj_angles, proj_angles, angles)
def test_gamma_is_an_azimuthal_offset(a, b, g):
    shifted = ProjectorAngles(a.polar, a.azimuthal - g)
    assert expectation_analytic(a, b, g) == pytest.approx(expectation_analytic(shifted, b, 0.0), abs=1e-12)


def test_expectation_from_counts_examples():
    assert expectation_from_counts(CountRates(1, 0, 0, 1)) == 1
    assert expectation_from_counts(CountRates(0, 1, 1, 0)) == -1
    with pytest.raises(EmptyCounts):
        expectation_from_counts(CountRates(0, 0, 0, 0))
    with pytest.raises(ValueError):
        CountRates(-1, 0, 0, 0)


def test_simulate_counts_examples():
    c = simulate_counts(ProjectorAngles(0, 0), ProjectorAngles(0, 0), 1.3)
    assert (c.n_pp, c.n_pm, c.n_mp, c.n_mm) == pytest.approx((0.5, 0, 0, 0.5), abs=1e-15)
    c = simulate_counts(ProjectorAngles(math.pi / 2, 0), ProjectorAngles(math.pi / 4, 0), 0.0)
    assert expectation_from_counts(c) == pytest.approx(SQ2 / 2, abs=1e-12)


@given(proj_angles, proj_angles, angles)
def test_probabilities_complete_and_consistent(a, b, g):
    p = channel_probabilities(a, b, g)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(p > -1e-15)
    assert expectation_from_counts(simulate_counts(a, b, g)) == pytest.approx(
        expectation_analytic(a, b, g), abs=1e-12)


def test_simulated_counts_are_reproducible_and_conserve_total():
    a, b = ProjectorAngles(0.4, 0.1), ProjectorAngles(1.2, -0.3)
    c1 = simulate_counts(a, b, 0.5, 10_000, seed=3)
    c2 = simulate_counts(a, b, 0.5, 10_000, seed=3)
    assert c1 == c2 and c1.total == 10_000
    p = simulate_counts(a, b, 0.5, 10_000, seed=3, noise="poisson")
    assert abs(p.total - 10_000) < 5 * 100
    with pytest.raises(ValueError):
        simulate_counts(a, b, 0.5, -1)
    with pytest.raises(ValueError):
        simulate_counts(a, b, 0.5, 10, noise="gaussian")


@pytest.mark.parametrize("g,s", [(0.0, 2 * SQ2), (math.pi, 0.0), (math.pi / 2, SQ2), (2 * math.pi / 3, SQ2 / 2)])
def test_standard_s_examples(g, s):
    assert s_value(BellSetting.standard(), g) == pytest.approx(s, abs=1e-12)
    assert s_standard(g) == pytest.approx(s, abs=1e-12)


@given(angles)
def test_standard_closed_form(g):
    assert s_value(BellSetting.standard(), g) == pytest.approx(s_standard(g), abs=1e-12)


def test_tsirelson_bound_random_draws():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100_000):
        x = rng.uniform(-2 * math.pi, 2 * math.pi, 9)
        s = BellSetting(*(ProjectorAngles(x[2 * k], x[2 * k + 1]) for k in range(4)))
        worst = max(worst, s_value(s, x[8]))
    assert worst <= TSIRELSON + 1e-9


@given(settings_, angles)
def test_tsirelson_bound(s, g):
    assert s_value(s, g) <= TSIRELSON + 1e-9


def test_polar_adjust_examples():
    r = polar_adjust(0.0)
    assert r.angles.beta.polar == pytest.approx(math.pi / 4)
    assert r.angles.beta_p.polar == pytest.approx(3 * math.pi / 4)
    assert r.s_value == pytest.approx(2 * SQ2)
    r = polar_adjust(math.pi / 2)
    assert r.angles.beta.polar == pytest.approx(0.0, abs=1e-15)
    assert r.angles.beta_p.polar == pytest.approx(math.pi)
    assert r.s_value == pytest.approx(2.0, abs=1e-12)
    r = polar_adjust(math.pi / 3)
    assert r.angles.beta.polar == pytest.approx(0.4636476090, abs=1e-9)
    assert r.s_value == pytest.approx(math.sqrt(5), abs=1e-12)
    assert r.scheme == "polar"
    assert r.block_type == {"alpha": True, "alpha_p": False}


@given(angles)
def test_polar_adjustment_never_below_classical_bound(g):
    r = polar_adjust(g)
    assert r.s_value >= 2.0 - 1e-12
    assert r.s_value == pytest.approx(polar_s_max(g), abs=1e-12)


@pytest.mark.parametrize("g", np.linspace(0, math.pi, 9))
def test_numerical_polar_max_confirms_closed_form(g):
    r = numerical_polar_max(g)
    assert r.angles.beta.polar == pytest.approx(math.atan(math.cos(g)), abs=1e-3)
    assert r.angles.beta_p.polar == pytest.approx(math.pi - math.atan(math.cos(g)), abs=1e-3)
    assert r.s_value == pytest.approx(polar_s_max(g), abs=1e-8)


def test_numerical_beta1_curve_is_monotone():
    b = [numerical_polar_max(g).angles.beta.polar for g in np.linspace(0, math.pi, 9)]
    assert np.all(np.diff(b) < 0)
    assert b[0] == pytest.approx(math.pi / 4, abs=1e-3) and b[-1] == pytest.approx(-math.pi / 4, abs=1e-3)


def test_optimizer_stall(monkeypatch):
    class Bad:
        success, message, x, fun = False, "iteration cap", np.zeros(2), 0.0

    monkeypatch.setattr(bell, "minimize", lambda *a, **k: Bad())
    with pytest.raises(OptimizerStall):
        numerical_polar_max(0.3)


@pytest.mark.parametrize("g", [0.0, 3 * math.pi / 4, math.pi, 1.9 * math.pi])
def test_azimuthal_adjust_examples(g):
    r = azimuthal_adjust(g)
    assert r.s_value == pytest.approx(2 * SQ2, abs=1e-12)
    assert r.angles.alpha_p.azimuthal == pytest.approx(g)
    assert r.scheme == "azimuthal"


def test_uncorrected_comparison():
    g = 3 * math.pi / 4
    assert uncorrected(g).s_value == pytest.approx(SQ2 * (1 - SQ2 / 2), abs=1e-12)
    assert uncorrected(g).scheme == "none"


@given(angles)
def test_azimuthal_adjustment_restores_tsirelson(g):
    assert azimuthal_adjust(g).s_value == pytest.approx(2 * SQ2, abs=1e-12)


def test_adjustment_result_range_check():
    with pytest.raises(ValueError):
        AdjustmentResult(BellSetting.standard(), 3.0, "none")


@given(proj_angles, proj_angles, proj_angles, angles)
def test_reduced_s_matches_full(ap, b, bp, g):
    full = s_value(BellSetting(ProjectorAngles(0.0, 0.0), ap, b, bp), g)
    assert s_reduced(ap, b, bp, g) == pytest.approx(full, abs=1e-12)


@given(angles, angles, angles)
def test_reduced_s_polar_specialization(b1, b1p, g):
    ap = ProjectorAngles(math.pi / 2, 0.0)
    assert s_reduced(ap, ProjectorAngles(b1), ProjectorAngles(b1p), g) == pytest.approx(
        s_polar_fixed(b1, b1p, g), abs=1e-12)


@given(proj_angles, proj_angles, angles)
def test_degenerate_spin_settings_cannot_violate(ap, b, g):
    s = s_reduced(ap, b, b, g)
    e = math.cos(ap.polar) * math.cos(b.polar) + math.sin(ap.polar) * math.sin(b.polar) * math.cos(
        ap.azimuthal + b.azimuthal - g)
    assert s == pytest.approx(abs(2 * e), abs=1e-12)
    assert s <= 2 + 1e-12


@given(settings_, angles)
def test_count_pipeline_closure(s, g):
    counts = [simulate_counts(a, b, g) for a, b, _ in s.pairs()]
    assert s_from_counts(counts) == pytest.approx(s_value(s, g), abs=1e-12)


def test_s_from_counts_needs_four():
    with pytest.raises(ValueError):
        s_from_counts([CountRates(1, 0, 0, 1)])


def test_noisy_s_close_to_analytic():
    g = 0.6
    r = azimuthal_adjust(g)
    est = [simulate_s(r.angles, g, 10_000, seed=k) for k in range(50)]
    # each E has variance (1 - E^2)/N; four independent settings
    sigma = math.sqrt(sum(1 - expectation_analytic(a, b, g) ** 2 for a, b, _ in r.angles.pairs()) / 10_000)
    assert abs(np.mean(est) - r.s_value) < 3 * sigma / math.sqrt(50)
    assert np.std(est) == pytest.approx(sigma, rel=0.3)
