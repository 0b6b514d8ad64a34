"""Balanced group-commutator decompositions.

``gc_decompose_su2`` writes a near-identity SU(2) element exactly as
``V W V^dag W^dag`` with ``d(I, V) = d(I, W) ~ sqrt(d(I, U) / 2)``.
``gc_approx_decompose`` does the same approximately in SU(d) by solving
``[F, G] = -i log(U)`` in the Lie algebra and exponentiating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (AxisAngle, commutator, distance_to_identity, from_axis_angle,
                     group_commutator, herm_log, matrix_exp, op_norm, op_norm_distance,
                     rotation, rx, ry, to_axis_angle)

#: Largest rotation angle reachable by the x/y commutator construction.
#: The right-hand side ``2 s^2 sqrt(1 - s^4)`` (s = sin(phi/2)) peaks at 1,
#: reached at s^2 = 1/sqrt(2), so sin(theta/2) covers all of [0, 1].
#: Axes closer than this angle are treated as parallel or antiparallel.
AXIS_TOL = 1e-12
ANTIPODAL_BAND = 1e-3
THETA_MAX = math.pi


class DecompositionError(ValueError):
    pass


def c_gc_prime(d: int) -> float:
    """Residual constant of the approximate SU(d) commutator, ~ 4 d^{3/4} ((d-1)/2)^{3/2}."""
    return 4 * d ** 0.75 * ((d - 1) / 2) ** 1.5


def c_gc_dprime(d: int) -> float:
    """Balance constant of the approximate SU(d) commutator, ~ d^{1/4} ((d-1)/2)^{1/2}."""
    return d ** 0.25 * ((d - 1) / 2) ** 0.5


@dataclass(frozen=True)
class SkConstants:
    """Approximate constants of the recursion, plus engineering slack.

    None of these are rigorous; the slack factors are margins used by the
    property checks.
    """

    c_gc: float = 1 / math.sqrt(2)
    c_approx: float = 4 * math.sqrt(2)
    c1: float = 4.0
    slack_norm: float = 1.05
    slack_residual: float = 1.1
    eps0_bound: float = field(init=False)

    def __post_init__(self):
        for name in ("c_gc", "c_approx", "c1", "slack_norm", "slack_residual"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "eps0_bound", 1 / self.c_approx ** 2)

    def c_gc_prime(self, d: int) -> float:
        return c_gc_prime(d)

    def c_gc_dprime(self, d: int) -> float:
        return c_gc_dprime(d)

    def as_dict(self, d: int = 2) -> dict:
        return {
            "dim": d,
            "c_gc": self.c_gc,
            "c_approx": self.c_approx,
            "c_approx_squared": self.c_approx ** 2,
            "c1": self.c1,
            "c_gc_prime": c_gc_prime(d),
            "c_gc_dprime": c_gc_dprime(d),
            "eps0_bound": self.eps0_bound,
            "slack_norm": self.slack_norm,
            "slack_residual": self.slack_residual,
            "length_exponent": math.log(5) / math.log(1.5),
            "time_exponent": math.log(3) / math.log(1.5),
        }


DEFAULT_CONSTANTS = SkConstants()


@dataclass(frozen=True, eq=False)
class GcPair:
    v: np.ndarray
    w: np.ndarray
    residual: float

    def product(self) -> np.ndarray:
        return group_commutator(self.v, self.w)


def _angle_rhs(phi):
    s2 = np.sin(np.asarray(phi) / 2) ** 2
    return 2 * s2 * np.sqrt(1 - s2 * s2)


def solve_phi(theta: float) -> float:
    """Smallest phi >= 0 with sin(theta/2) = 2 sin^2(phi/2) sqrt(1 - sin^4(phi/2)).

    Squaring gives a quadratic in x = sin^2(phi/2) whose smaller root is
    x = sin(theta/4); the result is refined by a few bisection steps to
    pin the residual at machine precision.
    """
    if not 0 <= theta <= THETA_MAX:
        raise DecompositionError(f"rotation angle {theta!r} outside the attainable range [0, pi]")
    if theta == 0:
        return 0.0
    x = math.sin(theta / 4)
    phi = 2 * math.asin(math.sqrt(x))
    target = math.sin(theta / 2)
    # the branch is increasing on [0, phi_peak]; polish within a tiny bracket
    phi_peak = 2 * math.asin(2 ** -0.25)
    lo, hi = max(0.0, phi - 1e-9), min(phi_peak, phi + 1e-9)
    if _angle_rhs(lo) <= target <= _angle_rhs(hi):
        for _ in range(60):
            mid = (lo + hi) / 2
            if _angle_rhs(mid) < target:
                lo = mid
            else:
                hi = mid
        phi = (lo + hi) / 2
    return float(phi)


def _rotation_taking(n: np.ndarray, p: np.ndarray) -> np.ndarray:
    """SU(2) element S whose Bloch rotation maps unit vector n onto p."""
    angle, axis = _angle_between(n, p)
    if angle < AXIS_TOL:
        return np.eye(2, dtype=complex)
    if angle < math.pi - ANTIPODAL_BAND:
        return rotation(axis, angle)
    # near-antipodal: the axis of n x p is ill-determined, so flip n to -n about
    # a fixed perpendicular first, then finish with a small well-conditioned turn
    perp = np.cross(n, (0.0, 0.0, 1.0))
    if np.linalg.norm(perp) < 1e-6:
        perp = np.cross(n, (1.0, 0.0, 0.0))
    flip = rotation(perp, math.pi)
    rest, rest_axis = _angle_between(-n, p)
    return flip if rest < AXIS_TOL else rotation(rest_axis, rest) @ flip


def _angle_between(n: np.ndarray, p: np.ndarray) -> tuple[float, np.ndarray]:
    cross = np.cross(n, p)
    # atan2 stays accurate where acos(n.p) loses half the digits
    return math.atan2(float(np.linalg.norm(cross)), float(np.dot(n, p))), cross


def gc_decompose_su2(u: np.ndarray) -> GcPair:
    """Exact balanced group commutator of an SU(2) element.

    V and W are rotations by phi about x and y conjugated by the rotation
    S that carries the commutator's axis onto U's axis.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise DecompositionError(f"gc_decompose_su2 needs a 2x2 matrix, got {u.shape}")
    target = to_axis_angle(u)
    theta = target.angle
    if theta > THETA_MAX:
        raise DecompositionError(
            f"rotation angle {theta:.6g} exceeds the attainable {THETA_MAX:.6g} "
            f"(d(I,U) = {distance_to_identity(u):.4g} > sqrt(2))")
    if theta < 1e-15:
        eye = np.eye(2, dtype=complex)
        return GcPair(eye, eye.copy(), op_norm_distance(eye, u))
    phi = solve_phi(theta)
    v0, w0 = rx(phi), ry(phi)
    comm = to_axis_angle(group_commutator(v0, w0))
    s = _rotation_taking(np.array(comm.axis), np.array(target.axis))
    sd = s.conj().T
    v, w = s @ v0 @ sd, s @ w0 @ sd
    return GcPair(v, w, op_norm_distance(group_commutator(v, w), u))


def lie_solution(h: np.ndarray, trace_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian F, G with [F, G] = iH for traceless Hermitian H.

    Works in the basis Fourier-conjugate to H's eigenbasis, where H has a
    vanishing diagonal; there G is the evenly spaced diagonal
    -(d-1)/2, ..., (d-1)/2 and F_jk = i H_jk / (G_kk - G_jj). F and G are
    then rescaled to equal norm.
    """
    h = np.asarray(h, dtype=complex)
    h = (h + h.conj().T) / 2
    d = h.shape[0]
    norm_h = op_norm(h)
    if norm_h == 0:
        z = np.zeros_like(h)
        return z, z.copy()
    if abs(np.trace(h)) > trace_tol * norm_h:
        raise DecompositionError(f"H must be traceless (|tr H| = {abs(np.trace(h)):.3g})")
    evals, evecs = np.linalg.eigh(h)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    jk = np.outer(np.arange(d), np.arange(d))
    fourier = np.exp(2j * math.pi * jk / d) / math.sqrt(d)
    # H = Q diag(E) Q^dag = T H' T^dag with H' = W diag(E) W^dag, T = Q W^dag
    h_f = (fourier * evals) @ fourier.conj().T
    g_diag = np.arange(d) - (d - 1) / 2
    gap = g_diag[None, :] - g_diag[:, None]
    np.fill_diagonal(gap, 1.0)
    f_f = 1j * h_f / gap
    np.fill_diagonal(f_f, 0.0)
    t = evecs @ fourier.conj().T
    td = t.conj().T
    f = t @ f_f @ td
    g = (t * g_diag) @ td
    f = (f + f.conj().T) / 2
    g = (g + g.conj().T) / 2
    nf, ng = op_norm(f), op_norm(g)
    scale = math.sqrt(ng / nf)
    return f * scale, g / scale


def gc_approx_decompose(u: np.ndarray) -> GcPair:
    """Approximate balanced group commutator in SU(d).

    With U = exp(iH) and [F, G] = -iH, the commutator of exp(iF) and
    exp(iG) matches U up to third order in the norms of F and G.
    """
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if distance_to_identity(u) == 0:
        eye = np.eye(d, dtype=complex)
        return GcPair(eye, eye.copy(), 0.0)
    h = herm_log(u)
    tr = np.trace(h).real
    if abs(tr) > 1e-9 * max(1.0, op_norm(h)):
        raise DecompositionError(
            f"log(U) is not traceless (trace {tr:.4g}); U is too far from the identity")
    f, g = lie_solution(-h)
    v, w = matrix_exp(f), matrix_exp(g)
    return GcPair(v, w, op_norm_distance(group_commutator(v, w), u))


def gc_decompose(u: np.ndarray) -> GcPair:
    """Exact decomposition in SU(2), approximate otherwise."""
    u = np.asarray(u)
    return gc_decompose_su2(u) if u.shape[0] == 2 else gc_approx_decompose(u)


def approx_comm_bound(big_delta: float, delta: float) -> float:
    """8 D d + 4 D d^2 + 8 D^2 + 4 D^3 + D^4."""
    D, e = big_delta, delta
    return 8 * D * e + 4 * D * e * e + 8 * D * D + 4 * D ** 3 + D ** 4


def check_approx_comm_bound(v, w, v_approx, w_approx, big_delta: float, delta: float) -> bool:
    """Whether the commutator error obeys the perturbation bound.

    Preconditions (checked): d(V, V~), d(W, W~) < big_delta and
    d(I, V), d(I, W) < delta.
    """
    if not (op_norm_distance(v, v_approx) < big_delta and op_norm_distance(w, w_approx) < big_delta):
        raise ValueError("perturbations exceed big_delta")
    if not (distance_to_identity(v) < delta and distance_to_identity(w) < delta):
        raise ValueError("V or W is not within delta of the identity")
    lhs = op_norm_distance(group_commutator(v, w), group_commutator(v_approx, w_approx))
    return lhs < approx_comm_bound(big_delta, delta)


def lie_approx_error(f: np.ndarray, g: np.ndarray) -> float:
    """d(e^{iF} e^{iG} e^{-iF} e^{-iG}, exp(-[F, G]))."""
    lhs = group_commutator(matrix_exp(f), matrix_exp(g))
    # exp(-[F,G]) = exp(i * (i [F,G])), and i[F,G] is Hermitian
    rhs = matrix_exp(1j * commutator(f, g))
    return op_norm_distance(lhs, rhs)


__all__ = [
    "AxisAngle", "DecompositionError", "GcPair", "SkConstants", "DEFAULT_CONSTANTS",
    "THETA_MAX", "solve_phi", "gc_decompose_su2", "lie_solution", "gc_approx_decompose",
    "gc_decompose", "approx_comm_bound", "check_approx_comm_bound", "lie_approx_error",
    "c_gc_prime", "c_gc_dprime", "from_axis_angle",
]
