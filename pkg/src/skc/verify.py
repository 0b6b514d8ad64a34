"""Randomized property checks behind ``skc verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import commutator as gc
from .linalg import (distance_to_identity, haar_unitary, matrix_exp, op_norm,
                     op_norm_distance, quaternion_embed, random_hermitian)


@dataclass
class CheckResult:
    name: str
    passed: bool
    trials: int
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}\t{self.name}\t{self.trials}\t{self.detail}"


def near_identity_su2(rng, max_dist: float) -> np.ndarray:
    """Random SU(2) element with d(I, U) uniform in (0, max_dist)."""
    dist = rng.uniform(0, max_dist)
    # d(I, exp(iH)) = 2 sin(|E|/2) for eigenvalues +-E
    e = 2 * np.arcsin(dist / 2)
    return matrix_exp(random_hermitian(2, rng, norm=e, traceless=True))


def check_quaternion_isometry(samples: int, rng) -> CheckResult:
    worst = 0.0
    for _ in range(samples):
        u, v = haar_unitary(2, rng), haar_unitary(2, rng)
        err = abs(np.linalg.norm(quaternion_embed(u) - quaternion_embed(v)) - op_norm_distance(u, v))
        worst = max(worst, err)
    return CheckResult("quaternion_isometry", worst <= 1e-12, samples, f"max_err={worst:.3e}")


def check_su2_reconstruction(samples: int, rng, max_dist: float = 0.1) -> CheckResult:
    worst_res, worst_ratio = 0.0, 0.0
    for _ in range(samples):
        u = near_identity_su2(rng, max_dist)
        pair = gc.gc_decompose_su2(u)
        worst_res = max(worst_res, pair.residual)
        eps = distance_to_identity(u)
        if eps > 0:
            worst_ratio = max(worst_ratio, distance_to_identity(pair.v) / np.sqrt(eps),
                              distance_to_identity(pair.w) / np.sqrt(eps))
    ok = worst_res <= 1e-10 and worst_ratio <= 0.81
    return CheckResult("su2_commutator", ok, samples,
                       f"max_residual={worst_res:.3e} max_balance={worst_ratio:.4f}")


def random_approx_comm_instance(rng):
    """Unitaries V, W, V~, W~ and admissible (big_delta, delta)."""
    delta = rng.uniform(0.01, 1.0)
    big_delta = rng.uniform(0.001, 0.5)
    v = matrix_exp(random_hermitian(2, rng, norm=rng.uniform(0, 0.99) * 2 * np.arcsin(min(delta, 2) / 2)))
    w = matrix_exp(random_hermitian(2, rng, norm=rng.uniform(0, 0.99) * 2 * np.arcsin(min(delta, 2) / 2)))
    pv = matrix_exp(random_hermitian(2, rng, norm=rng.uniform(0, 0.99) * 2 * np.arcsin(big_delta / 2)))
    pw = matrix_exp(random_hermitian(2, rng, norm=rng.uniform(0, 0.99) * 2 * np.arcsin(big_delta / 2)))
    return v, w, pv @ v, pw @ w, big_delta, delta


def check_approx_comm(samples: int, rng) -> CheckResult:
    violations = 0
    for _ in range(samples):
        if not gc.check_approx_comm_bound(*random_approx_comm_instance(rng)):
            violations += 1
    return CheckResult("approx_comm_bound", violations == 0, samples, f"violations={violations}")


def check_lie_solution(samples: int, rng, dims=(2, 3, 4)) -> CheckResult:
    worst_res, worst_norm = 0.0, 0.0
    for d in dims:
        for _ in range(samples):
            h = random_hermitian(d, rng, norm=rng.uniform(1e-3, 3), traceless=True)
            f, g = gc.lie_solution(h)
            nh = op_norm(h)
            worst_res = max(worst_res, op_norm(f @ g - g @ f - 1j * h) / max(1.0, nh))
            bound = gc.c_gc_dprime(d) * np.sqrt(nh)
            worst_norm = max(worst_norm, op_norm(f) / bound, op_norm(g) / bound)
    ok = worst_res <= 1e-10 and worst_norm <= 1.05
    return CheckResult("lie_solution", ok, samples * len(dims),
                       f"max_residual={worst_res:.3e} max_norm_ratio={worst_norm:.4f}")


def check_lie_approx(samples: int, rng, deltas=(0.01, 0.05, 0.1, 0.2), d: int = 2) -> CheckResult:
    worst = 0.0
    for delta in deltas:
        for _ in range(samples):
            f = random_hermitian(d, rng, norm=rng.uniform(0, delta))
            g = random_hermitian(d, rng, norm=rng.uniform(0, delta))
            worst = max(worst, gc.lie_approx_error(f, g) / (4 * delta ** 3))
    return CheckResult("lie_approx", worst <= 1.1, samples * len(deltas), f"max_err/(4 delta^3)={worst:.4f}")


def run_all(samples: int = 1000, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_quaternion_isometry(samples, rng),
        check_su2_reconstruction(samples, rng),
        check_approx_comm(samples, rng),
        check_lie_solution(samples, rng),
        check_lie_approx(samples, rng),
    ]
