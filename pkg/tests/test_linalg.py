import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skc.linalg import (PAULI_X, PAULI_Z, AxisAngle, BranchCutWarning, NotUnitaryError,
                        check_hermitian, check_unitary, distance_to_identity, from_axis_angle,
                        haar_unitary, herm_log, is_special_unitary, matrix_exp, op_norm,
                        op_norm_distance, project_su, quaternion_embed, quaternion_embed_many,
                        quaternion_to_matrix, random_hermitian, rotation, rx, rz, to_axis_angle)

seeds = st.integers(0, 2**32 - 1)
dims = st.sampled_from([2, 3, 4])


def eig_distance_oracle(h):
    # d(I, exp(iH)) = max_E 2 |sin(E/2)|
    return float(np.max(2 * np.abs(np.sin(np.linalg.eigvalsh(h) / 2))))


def quat_mul(a, b):
    # U = q0 I + i q.sigma composes as below
    a0, av = a[0], np.asarray(a[1:])
    b0, bv = b[0], np.asarray(b[1:])
    return np.concatenate([[a0 * b0 - av @ bv], a0 * bv + b0 * av - np.cross(av, bv)])


# --- distance ---------------------------------------------------------------


def test_distance_to_self_is_zero(rng):
    u = haar_unitary(3, rng)
    assert op_norm_distance(u, u) == 0.0


def test_distance_half_pi_z_is_sqrt2():
    assert op_norm_distance(np.eye(2), matrix_exp(math.pi / 2 * PAULI_Z)) == pytest.approx(math.sqrt(2), abs=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_distance_matches_eigenvalue_formula(d, rng):
    for _ in range(200):
        h = random_hermitian(d, rng, norm=rng.uniform(0, 1))
        assert abs(distance_to_identity(matrix_exp(h)) - eig_distance_oracle(h)) <= 1e-12


def test_distance_shape_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        op_norm_distance(np.eye(2), np.eye(3))


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(0, 10))
def test_distance_to_identity_at_most_norm(seed, scale):
    rng = np.random.default_rng(seed)
    h = random_hermitian(3, rng, norm=scale)
    assert distance_to_identity(matrix_exp(h)) <= op_norm(h) + 1e-12


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_distance_unitarily_invariant(seed, d):
    rng = np.random.default_rng(seed)
    a, b, w = (haar_unitary(d, rng) for _ in range(3))
    base = op_norm_distance(a, b)
    assert abs(op_norm_distance(w @ a, w @ b) - base) <= 1e-12
    assert abs(op_norm_distance(a @ w, b @ w) - base) <= 1e-12


# --- validation and projection -------------------------------------------------


def test_check_unitary_rejects():
    with pytest.raises(NotUnitaryError):
        check_unitary(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        check_unitary(np.ones((2, 3)))
    with pytest.raises(NotUnitaryError):
        check_unitary(np.diag([1, -1]), special=True)
    assert not is_special_unitary(np.diag([1, -1]))
    assert is_special_unitary(rz(0.3))


def test_check_hermitian():
    with pytest.raises(ValueError):
        check_hermitian(np.array([[0, 1], [0, 0]]))
    check_hermitian(PAULI_X)


def test_project_su_identity():
    assert np.array_equal(project_su(np.eye(3)), np.eye(3))


def test_project_su_hadamard():
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    p = project_su(h)
    assert abs(np.linalg.det(p) - 1) <= 1e-12
    # canonical branch: phase -pi/2, so the result is -iH (i H up to the root -1)
    assert np.allclose(p, -1j * h, atol=1e-15)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_project_su_global_phase_small_alpha(d, rng):
    u = haar_unitary(d, rng)
    for alpha in np.linspace(-0.9, 0.9, 13) * math.pi / d:
        assert op_norm_distance(project_su(np.exp(1j * alpha) * u), u) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_project_su_large_alpha_is_root_of_unity(d, rng):
    u = haar_unitary(d, rng)
    for alpha in np.linspace(-3, 3, 11):
        ratio = project_su(np.exp(1j * alpha) * u) @ u.conj().T
        z = ratio[0, 0]
        assert np.allclose(ratio, z * np.eye(d), atol=1e-12)
        assert abs(z ** d - 1) <= 1e-12


# --- log and exp ---------------------------------------------------------------


def test_herm_log_identity():
    assert np.allclose(herm_log(np.eye(3)), 0, atol=1e-15)


def test_herm_log_diagonal():
    assert np.allclose(herm_log(matrix_exp(math.pi / 2 * PAULI_Z)), math.pi / 2 * PAULI_Z, atol=1e-14)


def test_herm_log_norm_tracks_distance(rng):
    for _ in range(100):
        h = random_hermitian(3, rng, norm=rng.uniform(1e-3, 0.3), traceless=True)
        u = matrix_exp(h)
        eps = distance_to_identity(u)
        rel = abs(op_norm(herm_log(u)) - eps) / eps
        assert rel <= eps ** 2 / 20 + 1e-12


@settings(max_examples=80, deadline=None)
@given(seeds, dims, st.floats(0, 0.999))
def test_herm_log_inverts_matrix_exp(seed, d, frac):
    rng = np.random.default_rng(seed)
    h = random_hermitian(d, rng, norm=frac * math.pi)
    assert op_norm(herm_log(matrix_exp(h)) - h) <= 1e-10


def test_herm_log_branch_cut_warns():
    with pytest.warns(BranchCutWarning):
        h = herm_log(-np.eye(2, dtype=complex))
    assert np.allclose(h, math.pi * np.eye(2))
    # deterministic across calls
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BranchCutWarning)
        assert np.array_equal(h, herm_log(-np.eye(2, dtype=complex)))


def test_herm_log_trace_su2_is_zero(rng):
    for _ in range(50):
        assert abs(np.trace(herm_log(haar_unitary(2, rng)))) <= 1e-12


def test_herm_log_trace_multiple_of_two_pi_in_su3():
    # phases 2.5, 2.5, 2pi - 5 are a valid SU(3) spectrum whose principal logs sum to 2pi
    u = np.diag(np.exp(1j * np.array([2.5, 2.5, -5.0])))
    assert is_special_unitary(u)
    assert np.trace(herm_log(u)).real == pytest.approx(2 * math.pi, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, dims, st.floats(0, 5))
def test_matrix_exp_unitary(seed, d, scale):
    rng = np.random.default_rng(seed)
    u = matrix_exp(random_hermitian(d, rng, norm=scale))
    check_unitary(u, tol=1e-12)


# --- axis-angle and quaternions ---------------------------------------------------


def test_to_axis_angle_identity():
    a = to_axis_angle(np.eye(2))
    assert a.axis == (0.0, 0.0, 1.0) and a.angle == 0.0


def test_from_axis_angle_pi_about_x():
    assert np.allclose(from_axis_angle(AxisAngle((1.0, 0.0, 0.0), math.pi)), -1j * PAULI_X, atol=1e-15)


def test_minus_identity_axis_angle():
    a = to_axis_angle(-np.eye(2))
    assert a.axis == (0.0, 0.0, 1.0) and a.angle == pytest.approx(2 * math.pi)
    assert np.allclose(from_axis_angle(a), -np.eye(2))


def test_axis_angle_validation():
    with pytest.raises(ValueError):
        AxisAngle((1.0, 1.0, 0.0), 0.1)


def test_axis_angle_round_trip(rng):
    for _ in range(200):
        u = haar_unitary(2, rng)
        a = to_axis_angle(u)
        assert 0 <= a.angle <= 2 * math.pi
        assert op_norm_distance(from_axis_angle(a), u) <= 1e-12


def test_composed_rotation_matches_quaternion_product(rng):
    for _ in range(200):
        a, b = haar_unitary(2, rng), haar_unitary(2, rng)
        q = quat_mul(quaternion_embed(a), quaternion_embed(b))
        got = to_axis_angle(a @ b)
        # compare cos(angle/2) = q0; the angle itself is ill-conditioned near 0 and 2 pi
        assert abs(math.cos(got.angle / 2) - q[0]) <= 1e-12
        assert np.allclose(-math.sin(got.angle / 2) * np.array(got.axis), q[1:], atol=1e-12)
        assert np.allclose(quaternion_to_matrix(q), a @ b, atol=1e-12)


def test_quaternion_special_points():
    assert np.allclose(quaternion_embed(np.eye(2)), [1, 0, 0, 0])
    assert np.allclose(quaternion_embed(-np.eye(2)), [-1, 0, 0, 0])


def test_quaternion_isometry_1000_pairs(rng):
    us = np.stack([haar_unitary(2, rng) for _ in range(1000)])
    vs = np.stack([haar_unitary(2, rng) for _ in range(1000)])
    qu, qv = quaternion_embed_many(us), quaternion_embed_many(vs)
    for i in range(1000):
        assert abs(np.linalg.norm(qu[i] - qv[i]) - op_norm_distance(us[i], vs[i])) <= 1e-12


def test_quaternion_embed_round_trip(rng):
    for _ in range(50):
        u = haar_unitary(2, rng)
        q = quaternion_embed(u)
        assert abs(np.linalg.norm(q) - 1) <= 1e-12
        assert np.allclose(quaternion_to_matrix(q), u, atol=1e-14)


def test_rotation_formula():
    t = 0.7
    assert np.allclose(rx(t), math.cos(t / 2) * np.eye(2) - 1j * math.sin(t / 2) * PAULI_X)
    assert np.allclose(rotation((0, 0, 2), t), rz(t))


# --- sampling ---------------------------------------------------------------------


@pytest.mark.parametrize("d", [2, 3, 4])
def test_haar_unitary_is_special_and_seeded(d):
    a = haar_unitary(d, np.random.default_rng(3))
    b = haar_unitary(d, np.random.default_rng(3))
    assert np.array_equal(a, b)
    assert is_special_unitary(a, tol=1e-12)


def test_haar_first_moment_vanishes():
    rng = np.random.default_rng(0)
    mean = np.mean([haar_unitary(2, rng) for _ in range(4000)], axis=0)
    assert np.abs(mean).max() < 0.05


def test_random_hermitian_options(rng):
    h = random_hermitian(4, rng, norm=0.25, traceless=True)
    assert op_norm(h) == pytest.approx(0.25)
    assert abs(np.trace(h)) <= 1e-14
    check_hermitian(h)
