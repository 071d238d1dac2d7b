import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from geophase.errors import UndefinedPhase
from geophase.sphere import SpherePath, solid_angle
from geophase.spin import (
    IDENTITY,
    BlochVector,
    SpinState,
    Su2Params,
    angles_close,
    decompose_phase,
    evolution_path,
    is_unitary,
    mixed_phase_general,
    mixed_phase_theory,
    rotation,
    su2_from_params,
    total_phase,
    wrap_angle,
)

from conftest import angles, purities


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_spin_state_normalization_enforced():
    SpinState.from_ket([1, -1j])
    with pytest.raises(ValueError):
        SpinState(1.0, 1.0)


def test_bloch_vector_rejects_overlong():
    with pytest.raises(ValueError):
        BlochVector(0.8, 0.8, 0.0)


def test_su2_examples():
    assert np.allclose(su2_from_params(Su2Params(0, 0, 0)), np.eye(2))
    flip = su2_from_params(Su2Params(math.pi / 2, 0, 0))
    assert abs(flip[0, 0]) < 1e-15
    u = su2_from_params(Su2Params(math.pi / 4, math.pi / 3, math.pi / 5))
    assert total_phase(u) == pytest.approx(math.pi / 3, abs=1e-12)


def test_su2_matches_two_rotation_product():
    # z-rotation then tilt: an independent construction via matrix exponentials
    xi, delta, zeta = 0.4, 1.1, -0.3
    z = lambda a: rotation([0, 0, 1], a)
    y = rotation([0, 1, 0], 2 * xi)
    built = z(-(delta + zeta)) @ y @ z(zeta - delta)
    # equal up to the convention of the off-diagonal phases: compare invariants
    u = su2_from_params(Su2Params(xi, delta, zeta))
    assert abs(u[0, 0] - built[0, 0]) < 1e-12
    assert abs(abs(u[1, 0]) - abs(built[1, 0])) < 1e-12


@given(angles, angles, angles)
def test_unitarity(xi, delta, zeta):
    u = su2_from_params(Su2Params(xi, delta, zeta))
    assert np.allclose(u.conj().T @ u, IDENTITY, rtol=0, atol=1e-12)
    assert is_unitary(u)


def test_params_are_wrapped():
    p = Su2Params(7.0, -4.0, 3 * math.pi)
    for v in (p.xi, p.delta, p.zeta):
        assert -math.pi < v <= math.pi


def test_total_phase_examples():
    assert total_phase(np.eye(2)) == 0.0
    for zeta in (0.0, 1.0, -2.5):
        assert total_phase(su2_from_params(Su2Params(math.pi / 4, 0.7, zeta))) == pytest.approx(0.7)
    with pytest.raises(UndefinedPhase):
        total_phase(su2_from_params(Su2Params(math.pi / 2 - 1e-13, 0.3, 0.2)))


@pytest.mark.parametrize("xi,delta,geo,dyn", [
    (math.pi / 4, 0.9, 0.9, 0.0),
    (0.0, 0.9, 0.0, 0.9),
    (math.pi / 6, 0.6, 0.3, 0.3),
])
def test_decompose_examples(xi, delta, geo, dyn):
    d = decompose_phase(Su2Params(xi, delta))
    assert d.geometric == pytest.approx(geo, abs=1e-12)
    assert d.dynamical == pytest.approx(dyn, abs=1e-12)
    assert d.total == pytest.approx(delta)


@given(angles, angles)
def test_decomposition_sums_mod_2pi(xi, delta):
    d = decompose_phase(Su2Params(xi, delta))
    assert angles_close(d.total, d.dynamical + d.geometric, 1e-12)


@given(st.floats(0.05, math.pi / 2 - 0.05), st.floats(-3.0, 3.0))
def test_geometric_phase_is_minus_half_solid_angle(xi, delta):
    pts = evolution_path(Su2Params(xi, delta))
    path = SpherePath(pts)
    expected = decompose_phase(Su2Params(xi, delta)).geometric
    assert angles_close(-0.5 * solid_angle(path), expected, 1e-9)


def test_evolution_path_ends_at_evolved_state():
    p = Su2Params(0.6, 1.3, 0.4)
    end = evolution_path(p, npts=11)[-1]
    bloch = SpinState.from_ket(su2_from_params(p) @ [1, 0]).bloch().vector
    assert np.allclose(end, bloch, atol=1e-12)


def test_mixed_phase_general_examples():
    u = su2_from_params(Su2Params(math.pi / 4, 0.7, 1.9))
    assert mixed_phase_general(BlochVector.along_z(1.0), u)[0] == pytest.approx(0.7)
    with pytest.raises(UndefinedPhase):
        mixed_phase_general(BlochVector.along_z(0.0), su2_from_params(Su2Params(0, math.pi / 2)))
    u = su2_from_params(Su2Params(math.pi / 4, math.pi / 4))
    assert mixed_phase_general(BlochVector.along_z(0.5), u)[0] == pytest.approx(
        math.atan(0.5), abs=1e-12)


def test_mixed_phase_theory_examples():
    for d in (-2.0, 0.3, 1.5, 3.0):
        assert mixed_phase_theory(1.0, d) == pytest.approx(d)
    assert mixed_phase_theory(0.5, math.pi / 4) == pytest.approx(0.463647609, abs=1e-9)
    assert mixed_phase_theory(0.0, 0.3) == 0.0
    with pytest.raises(UndefinedPhase):
        mixed_phase_theory(0.0, math.pi / 2)
    with pytest.raises(ValueError):
        mixed_phase_theory(1.2, 0.1)


def test_mixed_phase_theory_continuous_through_quarter_turn():
    a = mixed_phase_theory(0.3, math.pi / 2 - 1e-6)
    b = mixed_phase_theory(0.3, math.pi / 2 + 1e-6)
    assert abs(a - b) < 1e-5


@given(purities, st.floats(-1.5, 1.5), angles, angles)
def test_theory_matches_trace_oracle(r, xi, delta, zeta):
    # cos(xi) > 0 keeps arg <up|U|up> = delta; see notes on the sign of cos xi
    u = su2_from_params(Su2Params(xi, delta, zeta))
    z = np.trace(BlochVector.along_z(r).density_matrix() @ u)
    assume(abs(z) > 1e-6)
    phase, _ = mixed_phase_general(BlochVector.along_z(r), u)
    assert angles_close(phase, mixed_phase_theory(r, delta), 1e-12)


@given(st.floats(0.05, math.pi / 2 - 0.05), angles)
def test_visibility_non_decreasing_in_purity(xi, delta):
    assume(abs(wrap_angle(delta)) > 1e-3)
    u = su2_from_params(Su2Params(xi, delta))
    vis = []
    for r in np.linspace(0, 1, 11):
        try:
            vis.append(mixed_phase_general(BlochVector.along_z(r), u)[1])
        except UndefinedPhase:
            vis.append(0.0)
    assert np.all(np.diff(vis) >= -1e-12)
