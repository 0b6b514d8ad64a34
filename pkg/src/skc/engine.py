"""The Solovay-Kitaev recursion over a shared DAG of compile nodes."""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .commutator import DEFAULT_CONSTANTS, DecompositionError, SkConstants, gc_decompose
from .gates import GateSequence, evaluate, simplify
from .linalg import op_norm_distance
from .net import BasicNet

#: Largest measured eps0 accepted in calibrated mode.
CALIBRATED_EPS0 = 0.14
MAX_DEPTH = 25
MODES = ("strict", "calibrated")


class PreconditionError(ValueError):
    """A numerical precondition of the recursion failed."""


@dataclass(frozen=True, eq=False)
class CompileNode:
    """Either a net entry (``entry`` set) or ``V W V^dag W^dag U_prev``.

    Children are shared, never copied: the V and W subtrees each appear
    twice in the flattened output but once in memory.
    """

    level: int
    unitary: np.ndarray
    raw_length: int
    entry: int | None = None
    v: CompileNode | None = None
    w: CompileNode | None = None
    u_prev: CompileNode | None = None

    @property
    def kind(self) -> str:
        return "basic" if self.entry is not None else "commutator"


@dataclass
class CompileStats:
    calls: Counter = field(default_factory=Counter)        # level -> evaluations
    wall_time: dict = field(default_factory=dict)          # level -> seconds, inclusive

    def level0_calls(self) -> int:
        return self.calls[0]


class Compiler:
    """Runs the recursion against a fixed net.

    ``mode="strict"`` requires the net's measured eps0 below 1/c_approx^2;
    ``"calibrated"`` accepts anything up to ``eps0_limit``. Pass
    ``eps0_limit=None`` in calibrated mode to skip the check entirely.
    """

    def __init__(self, net: BasicNet, consts: SkConstants = DEFAULT_CONSTANTS,
                 mode: str = "calibrated", eps0_limit: float | None = CALIBRATED_EPS0):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.net = net
        self.consts = consts
        self.mode = mode
        self.eps0_limit = consts.eps0_bound if mode == "strict" else eps0_limit
        self.stats = CompileStats()

    def check_net(self) -> None:
        if self.eps0_limit is None:
            return
        eps0 = self.net.measured_eps0
        if eps0 is None:
            raise PreconditionError("net has no measured eps0; audit it first")
        if self.mode == "strict" and not eps0 < self.eps0_limit:
            raise PreconditionError(
                f"strict mode needs eps0 < 1/c_approx^2 = {self.eps0_limit:.4g}, "
                f"net has {eps0:.4g}; use calibrated mode or a longer net")
        if self.mode == "calibrated" and eps0 > self.eps0_limit:
            raise PreconditionError(
                f"net eps0 {eps0:.4g} exceeds the calibrated limit {self.eps0_limit:.4g}")

    def compile(self, u: np.ndarray, n: int) -> CompileNode:
        if n < 0:
            raise ValueError("depth must be non-negative")
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.net.dim, self.net.dim):
            raise ValueError(f"target shape {u.shape} does not match net dim {self.net.dim}")
        self.check_net()
        self.stats = CompileStats()
        return self._sk(u, n)

    def _sk(self, u: np.ndarray, n: int) -> CompileNode:
        start = time.perf_counter()
        self.stats.calls[n] += 1
        if n == 0:
            i, _ = self.net.nearest(u)
            node = CompileNode(0, self.net.unitaries[i], self.net.length(i), entry=i)
        else:
            prev = self._sk(u, n - 1)
            delta = u @ prev.unitary.conj().T
            try:
                pair = gc_decompose(delta)
            except DecompositionError as e:
                raise PreconditionError(f"level {n}: cannot decompose the residual ({e}); "
                                        f"eps0 is too coarse") from None
            vn = self._sk(pair.v, n - 1)
            wn = self._sk(pair.w, n - 1)
            vu, wu = vn.unitary, wn.unitary
            unitary = vu @ wu @ vu.conj().T @ wu.conj().T @ prev.unitary
            node = CompileNode(n, unitary, 2 * vn.raw_length + 2 * wn.raw_length + prev.raw_length,
                               v=vn, w=wn, u_prev=prev)
        self.stats.wall_time[n] = self.stats.wall_time.get(n, 0.0) + time.perf_counter() - start
        return node


def solovay_kitaev(u: np.ndarray, n: int, net: BasicNet, consts: SkConstants = DEFAULT_CONSTANTS,
                   mode: str = "calibrated", eps0_limit: float | None = CALIBRATED_EPS0) -> CompileNode:
    return Compiler(net, consts, mode, eps0_limit).compile(u, n)


def flatten_raw(node: CompileNode, net: BasicNet) -> np.ndarray:
    """Gate indices of ``node`` without any cancellation.

    Each distinct node is expanded once; the dagger of a subtree is its
    sequence reversed with every gate mapped to its inverse.
    """
    inv = np.asarray(net.iset.inverse, dtype=np.int32)
    memo: dict[int, np.ndarray] = {}

    def walk(nd: CompileNode) -> np.ndarray:
        key = id(nd)
        if key in memo:
            return memo[key]
        if nd.entry is not None:
            out = net.flat[net.offsets[nd.entry]:net.offsets[nd.entry + 1]].astype(np.int32)
        else:
            sv, sw, su = walk(nd.v), walk(nd.w), walk(nd.u_prev)
            out = np.concatenate([sv, sw, inv[sv[::-1]], inv[sw[::-1]], su])
        memo[key] = out
        return out

    return walk(node)


def flatten(node: CompileNode, net: BasicNet) -> GateSequence:
    """Flattened, inverse-cancelled gate sequence for ``node``."""
    return simplify(flatten_raw(node, net).tolist(), net.iset)


def expand_explicit(node: CompileNode, net: BasicNet) -> list[int]:
    """Gate list built by naive recursion with no sharing and no memo."""
    if node.entry is not None:
        return list(net.sequence(node.entry))
    inv = net.iset.inverse
    sv, sw, su = expand_explicit(node.v, net), expand_explicit(node.w, net), expand_explicit(node.u_prev, net)
    return sv + sw + [inv[g] for g in reversed(sv)] + [inv[g] for g in reversed(sw)] + su


def count_nodes(node: CompileNode) -> Counter:
    """Distinct nodes per level, counted by identity."""
    seen: set[int] = set()
    per_level: Counter = Counter()
    stack = [node]
    while stack:
        nd = stack.pop()
        if id(nd) in seen:
            continue
        seen.add(id(nd))
        per_level[nd.level] += 1
        if nd.entry is None:
            stack.extend([nd.v, nd.w, nd.u_prev])
    return per_level


# --- accuracy model ---------------------------------------------------------


@dataclass(frozen=True)
class Prediction:
    eps: float
    length: float
    time_units: int


LENGTH_EXPONENT = math.log(5) / math.log(1.5)
TIME_EXPONENT = math.log(3) / math.log(1.5)


def predict_eps(eps0: float, n: int, c: float) -> float:
    c2 = c * c
    return (eps0 * c2) ** (1.5 ** n) / c2


def predict(consts: SkConstants, eps0: float, n: int, l0: float = 1.0,
            c: float | None = None) -> Prediction:
    """Closed-form eps_n, l_n = 5^n l0 and t_n ~ 3^n.

    ``c`` overrides ``consts.c_approx`` (e.g. with a fitted value).
    """
    c = consts.c_approx if c is None else c
    return Prediction(predict_eps(eps0, n, c), 5 ** n * l0, 3 ** n)


def choose_depth(eps_target: float, eps0: float, consts: SkConstants = DEFAULT_CONSTANTS,
                 mode: str = "theoretical", c_fit: float | None = None,
                 max_depth: int = MAX_DEPTH) -> int:
    """Recursion depth needed for accuracy ``eps_target``.

    ``"theoretical"`` evaluates the closed-form ceiling formula with
    ``consts.c_approx``; ``"calibrated"`` uses ``c_fit`` (see
    :func:`fit_c_approx`) and returns the smallest n whose predicted error
    is below the target.
    """
    if not eps_target > 0 or not eps0 > 0:
        raise ValueError("eps_target and eps0 must be positive")
    if mode == "theoretical":
        c2 = consts.c_approx ** 2
        if eps0 * c2 >= 1:
            raise PreconditionError(
                f"eps0 * c_approx^2 = {eps0 * c2:.4g} >= 1: the theoretical recursion does "
                f"not contract; use calibrated mode")
        if eps_target >= eps0:
            return 0
        ratio = math.log(1 / (eps_target * c2)) / math.log(1 / (eps0 * c2))
        n = math.ceil(math.log(ratio) / math.log(1.5))
    elif mode == "calibrated":
        if c_fit is None:
            raise ValueError("calibrated mode needs a fitted c_approx")
        if eps0 * c_fit ** 2 >= 1:
            raise PreconditionError(f"fitted recursion does not contract (eps0 c^2 = {eps0 * c_fit ** 2:.4g})")
        n = 0
        while not predict_eps(eps0, n, c_fit) < eps_target and n <= max_depth:
            n += 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if n > max_depth:
        raise PreconditionError(f"eps {eps_target:g} needs depth {n} > cap {max_depth}")
    return n


def fit_c_approx(level_errors, floor: float = 1e-12) -> float:
    """Median of eps_n / eps_{n-1}^{3/2} over measured error ladders."""
    ratios = []
    for errs in level_errors:
        for prev, cur in zip(errs, errs[1:]):
            if prev > floor and cur > floor:
                ratios.append(cur / prev ** 1.5)
    if not ratios:
        raise ValueError("no usable levels to fit c_approx")
    return float(np.median(ratios))


def probe_c_approx(net: BasicNet, samples: int = 5, depth: int = 2, seed: int = 0,
                   consts: SkConstants = DEFAULT_CONSTANTS) -> float:
    """Fit c_approx from a short seeded compile run on Haar targets."""
    from .linalg import haar_unitary

    rng = np.random.default_rng(seed)
    compiler = Compiler(net, consts, "calibrated", eps0_limit=None)
    ladders = []
    for _ in range(samples):
        u = haar_unitary(net.dim, rng)
        ladders.append(error_ladder(u, compiler.compile(u, depth)))
    return fit_c_approx(ladders)


@dataclass
class CompileReport:
    target: np.ndarray
    depth: int
    predicted_eps: float | None
    measured_eps: float
    raw_length: int
    simplified_length: int
    level_wall_times: dict
    level0_evaluations: int
    sequence: GateSequence = field(repr=False)


def compile_unitary(u: np.ndarray, depth: int, net: BasicNet,
                    consts: SkConstants = DEFAULT_CONSTANTS, mode: str = "calibrated",
                    c_fit: float | None = None,
                    eps0_limit: float | None = CALIBRATED_EPS0) -> CompileReport:
    """Compile ``u`` at ``depth`` and measure the emitted sequence."""
    compiler = Compiler(net, consts, mode, eps0_limit)
    node = compiler.compile(u, depth)
    seq = flatten(node, net)
    measured = op_norm_distance(u, evaluate(seq, net.iset))
    predicted = None
    if net.measured_eps0 is not None:
        c = c_fit if (mode == "calibrated" and c_fit is not None) else consts.c_approx
        predicted = predict_eps(net.measured_eps0, depth, c)
    return CompileReport(
        target=np.asarray(u), depth=depth, predicted_eps=predicted, measured_eps=measured,
        raw_length=node.raw_length, simplified_length=len(seq),
        level_wall_times=dict(sorted(compiler.stats.wall_time.items())),
        level0_evaluations=compiler.stats.level0_calls(), sequence=seq,
    )


def error_ladder(u: np.ndarray, node: CompileNode) -> list[float]:
    """d(U, U_k) for k = 0..n along the u_prev chain of a compiled node."""
    chain = []
    nd = node
    while nd is not None:
        chain.append(nd)
        nd = nd.u_prev
    return [op_norm_distance(u, nd.unitary) for nd in reversed(chain)]


__all__ = [
    "CompileNode", "CompileReport", "Compiler", "PreconditionError", "Prediction",
    "solovay_kitaev", "flatten", "flatten_raw", "expand_explicit", "count_nodes",
    "predict", "predict_eps", "choose_depth", "fit_c_approx", "probe_c_approx",
    "compile_unitary", "error_ladder", "CALIBRATED_EPS0", "LENGTH_EXPONENT", "TIME_EXPONENT",
]
