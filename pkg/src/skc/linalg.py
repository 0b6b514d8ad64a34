"""Complex linear algebra on unitaries: distances, logs, exponentials,
SU(d) projection and SU(2) rotation parameterizations.

Unitaries and Hermitians are plain ``numpy`` complex arrays of shape
``(d, d)``. The validators below enforce the invariants where a value
enters the library; internal code passes arrays around freely.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

TAU_UNIT = 1e-12
TAU_DET = 1e-10
TAU_HERM = 1e-12
BRANCH_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class NotUnitaryError(ValueError):
    pass


class BranchCutWarning(RuntimeWarning):
    """An eigenphase sits on the principal-log branch cut at pi."""


def unitarity_error(u: np.ndarray) -> float:
    """Max-entry deviation of U^dagger U from the identity."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def check_unitary(u, tol: float = TAU_UNIT, special: bool = False,
                  det_tol: float = TAU_DET) -> np.ndarray:
    """Return ``u`` as a complex array, raising if it is not (special) unitary."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {u.shape}")
    err = unitarity_error(u)
    if err > tol:
        raise NotUnitaryError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g} > {tol:g})")
    if special:
        det = np.linalg.det(u)
        if abs(det - 1) > det_tol:
            raise NotUnitaryError(f"determinant {det:.6g} differs from 1 by more than {det_tol:g}")
    return u


def is_special_unitary(u, tol: float = TAU_UNIT, det_tol: float = TAU_DET) -> bool:
    try:
        check_unitary(u, tol, special=True, det_tol=det_tol)
    except (NotUnitaryError, ValueError):
        return False
    return True


def check_hermitian(h, tol: float = TAU_HERM) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    err = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if err > tol:
        raise ValueError(f"matrix is not Hermitian (max |H - H^dag| = {err:.3g})")
    return h


def dagger(u: np.ndarray) -> np.ndarray:
    return np.asarray(u).conj().T


def op_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(a, 2))


def op_norm_distance(a, b) -> float:
    """Operator-norm distance ``||A - B||`` (largest singular value of the difference)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return op_norm(a - b)


def distance_to_identity(u) -> float:
    u = np.asarray(u)
    return op_norm_distance(u, np.eye(u.shape[0]))


def project_su(u, tol: float = TAU_UNIT) -> np.ndarray:
    """Rescale a unitary by a global phase so that its determinant is 1.

    The phase used is ``exp(-i arg(det U) / d)`` with ``arg`` in (-pi, pi],
    so inputs already in SU(d) are returned unchanged.
    """
    u = check_unitary(u, tol)
    d = u.shape[0]
    phase = np.angle(np.linalg.det(u))
    return np.exp(-1j * phase / d) * u


def _unitary_eig(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # complex Schur form of a normal matrix is diagonal; Q stays unitary
    # even for degenerate spectra, unlike np.linalg.eig
    t, q = scipy.linalg.schur(u, output="complex")
    return np.diag(t).copy(), q


def herm_log(u) -> np.ndarray:
    """Hermitian H with exp(iH) = U, eigenvalues in (-pi, pi].

    Eigenphases within ``BRANCH_TOL`` of pi are all assigned +pi and a
    :class:`BranchCutWarning` is emitted; the result is still deterministic.
    The trace is a multiple of 2*pi; it vanishes for SU(2) away from the cut
    and for any SU(d) whose eigenphases sum to less than 2*pi in magnitude.
    """
    u = np.asarray(u, dtype=complex)
    vals, q = _unitary_eig(u)
    phases = np.angle(vals)
    near_cut = np.abs(np.abs(phases) - math.pi) < BRANCH_TOL
    if near_cut.any():
        warnings.warn("eigenphase on the branch cut at pi; taking +pi", BranchCutWarning, stacklevel=2)
        phases = np.where(near_cut, math.pi, phases)
    h = (q * phases) @ q.conj().T
    return (h + h.conj().T) / 2


def matrix_exp(h) -> np.ndarray:
    """exp(iH) for Hermitian H, via ``eigh``."""
    h = np.asarray(h, dtype=complex)
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(1j * w)) @ v.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def group_commutator(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """V W V^dagger W^dagger."""
    return v @ w @ v.conj().T @ w.conj().T


# --- SU(2) parameterizations ------------------------------------------------


@dataclass(frozen=True)
class AxisAngle:
    """Bloch-sphere rotation ``cos(t/2) I - i sin(t/2) n.sigma``.

    ``angle`` lives in [0, 2*pi]: an SU(2) element and its negative differ
    by 2*pi, so the angle cannot be folded into [0, pi] without losing the
    sign. ``-I`` is (z, 2*pi).
    """

    axis: tuple[float, float, float]
    angle: float

    def __post_init__(self):
        n = math.sqrt(sum(a * a for a in self.axis))
        if abs(n - 1) > 1e-12:
            raise ValueError(f"axis must be a unit vector, |axis| = {n!r}")


def quaternion_embed(u) -> np.ndarray:
    """Real 4-vector q with U = q0 I + i (q1 X + q2 Y + q3 Z).

    The map is an isometry from (SU(2), operator norm) into R^4: the
    operator-norm distance of two unitaries equals the Euclidean distance
    of their embeddings.
    """
    u = np.asarray(u)
    if u.shape != (2, 2):
        raise ValueError(f"quaternion embedding needs a 2x2 matrix, got {u.shape}")
    return np.array([
        (u[0, 0].real + u[1, 1].real) / 2,
        (u[0, 1].imag + u[1, 0].imag) / 2,
        (u[0, 1].real - u[1, 0].real) / 2,
        (u[0, 0].imag - u[1, 1].imag) / 2,
    ])


def quaternion_embed_many(us: np.ndarray) -> np.ndarray:
    """Vectorized :func:`quaternion_embed` over a stack of shape (m, 2, 2)."""
    us = np.asarray(us)
    return np.stack([
        (us[:, 0, 0].real + us[:, 1, 1].real) / 2,
        (us[:, 0, 1].imag + us[:, 1, 0].imag) / 2,
        (us[:, 0, 1].real - us[:, 1, 0].real) / 2,
        (us[:, 0, 0].imag - us[:, 1, 1].imag) / 2,
    ], axis=1)


def quaternion_to_matrix(q) -> np.ndarray:
    q0, q1, q2, q3 = q
    return np.array([[q0 + 1j * q3, q2 + 1j * q1],
                     [-q2 + 1j * q1, q0 - 1j * q3]], dtype=complex)


def to_axis_angle(u) -> AxisAngle:
    q = quaternion_embed(u)
    # U = cos(t/2) I - i sin(t/2) n.sigma  =>  q0 = cos(t/2), q_vec = -sin(t/2) n
    vec = -q[1:]
    s = float(np.linalg.norm(vec))
    angle = 2 * math.atan2(s, float(q[0]))
    if s < 1e-15:
        return AxisAngle((0.0, 0.0, 1.0), angle)
    axis = vec / s
    return AxisAngle(tuple(float(a) for a in axis / np.linalg.norm(axis)), angle)


def from_axis_angle(a: AxisAngle) -> np.ndarray:
    return rotation(a.axis, a.angle)


def rotation(axis, angle: float) -> np.ndarray:
    """exp(-i angle/2 n.sigma) about a (not necessarily normalized) axis."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return c * I2 - 1j * s * (n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z)


def rx(angle: float) -> np.ndarray:
    return rotation((1, 0, 0), angle)


def ry(angle: float) -> np.ndarray:
    return rotation((0, 1, 0), angle)


def rz(angle: float) -> np.ndarray:
    return rotation((0, 0, 1), angle)


# --- sampling -----------------------------------------------------------------


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(d) element (QR of a Ginibre matrix, phase-corrected)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    return project_su(q, tol=1e-10)


def random_hermitian(d: int, rng: np.random.Generator, norm: float | None = None,
                     traceless: bool = False) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (a + a.conj().T) / 2
    if traceless:
        h = h - np.trace(h).real / d * np.eye(d)
    if norm is not None:
        h = h * (norm / op_norm(h))
    return h
