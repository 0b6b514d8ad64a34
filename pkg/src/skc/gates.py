"""Instruction sets and gate sequences.

A sequence ``g1, g2, ..., gm`` denotes the product ``g1 @ g2 @ ... @ gm``;
in circuit terms ``gm`` acts first. :func:`format_sequence` can emit either
order.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .linalg import (TAU_DET, TAU_UNIT, NotUnitaryError, check_unitary,
                     project_su, unitarity_error)

log = logging.getLogger(__name__)

INVERSE_TOL = 1e-10
DAG_SUFFIX = "_dag"


class GateSetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class InstructionSet:
    """Finite, inverse-closed list of named SU(d) gates."""

    names: tuple[str, ...]
    matrices: np.ndarray  # (k, d, d)
    inverse: tuple[int, ...]
    _by_name: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.matrices.setflags(write=False)
        object.__setattr__(self, "_by_name", {n: i for i, n in enumerate(self.names)})

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no gate named {name!r} in instruction set {list(self.names)}") from None

    def matrix(self, name: str) -> np.ndarray:
        return self.matrices[self.index(name)]

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.dim).encode())
        for name, m in zip(self.names, self.matrices):
            h.update(b"\0" + name.encode() + b"\0")
            h.update(" ".join(repr(float(x)) for x in m.view(float).ravel()).encode())
        return h.hexdigest()

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "gates": [{"name": n, "matrix": _matrix_to_pairs(m)}
                      for n, m in zip(self.names, self.matrices)],
        }


def build_instruction_set(gates: Sequence[tuple[str, np.ndarray]],
                          complete_inverses: bool = True) -> InstructionSet:
    """Validate ``(name, matrix)`` pairs into an :class:`InstructionSet`.

    Each matrix must be unitary; it is projected into SU(d) with a warning
    if its determinant is not already 1. Missing inverses are appended with
    the suffix ``_dag`` when ``complete_inverses`` is set, otherwise their
    absence is an error. Universality is assumed, never checked.
    """
    if not gates:
        raise GateSetError("instruction set must contain at least one gate")
    names: list[str] = []
    mats: list[np.ndarray] = []
    dim = None
    for name, m in gates:
        if not isinstance(name, str) or not name:
            raise GateSetError(f"invalid gate name {name!r}")
        if name in names:
            raise GateSetError(f"duplicate gate name {name!r}")
        m = np.asarray(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GateSetError(f"gate {name!r}: matrix must be square, got shape {m.shape}")
        if dim is None:
            dim = m.shape[0]
        elif m.shape[0] != dim:
            raise GateSetError(f"gate {name!r}: dimension {m.shape[0]} differs from {dim}")
        try:
            check_unitary(m, tol=max(TAU_UNIT, 1e-9))
        except NotUnitaryError as e:
            raise GateSetError(f"gate {name!r}: {e}") from None
        det = np.linalg.det(m)
        if abs(det - 1) > TAU_DET:
            log.warning("gate %r has det %s; projecting into SU(%d)", name, f"{complex(det):.6g}", dim)
            m = project_su(m, tol=1e-9)
            if abs(np.linalg.det(m) - 1) > TAU_DET:
                raise GateSetError(f"gate {name!r}: det != 1 after projection")
        names.append(name)
        mats.append(m)

    inverse: list[int | None] = []
    for m in mats:
        inverse.append(_find(mats, m.conj().T))
    for i, inv in enumerate(list(inverse)):
        if inv is not None:
            continue
        if not complete_inverses:
            raise GateSetError(f"gate {names[i]!r} has no inverse in the set")
        new_name = names[i] + DAG_SUFFIX
        if new_name in names:
            raise GateSetError(f"cannot synthesize inverse {new_name!r}: name taken")
        log.info("adding missing inverse %s", new_name)
        names.append(new_name)
        mats.append(mats[i].conj().T.copy())
        inverse[i] = len(mats) - 1
        inverse.append(i)
    log.debug("instruction set universality is assumed, not checked")
    return InstructionSet(tuple(names), np.array(mats), tuple(inverse))


def _find(mats: list[np.ndarray], target: np.ndarray) -> int | None:
    for j, m in enumerate(mats):
        if np.max(np.abs(m - target)) <= INVERSE_TOL:
            return j
    return None


# --- matrix literals --------------------------------------------------------


def parse_matrix(spec, dim: int | None = None) -> np.ndarray:
    """Parse a matrix literal.

    Accepted forms: a flat row-major list of ``[re, im]`` pairs or
    ``"re,im"`` strings, or a nested list of rows of such entries. Plain
    real numbers are also accepted as entries.
    """
    if isinstance(spec, (list, tuple)) and spec and _is_row(spec[0]):
        entries = [e for row in spec for e in row]
    else:
        entries = list(spec)
    values = [_parse_entry(e) for e in entries]
    n = len(values)
    d = math.isqrt(n)
    if d * d != n or n == 0:
        raise GateSetError(f"matrix literal has {n} entries, not a perfect square")
    if dim is not None and d != dim:
        raise GateSetError(f"matrix literal is {d}x{d}, expected dim {dim}")
    return np.array(values, dtype=complex).reshape(d, d)


def _is_row(x) -> bool:
    # a row is a list whose items are themselves entries (pairs / strings / numbers),
    # as opposed to an entry which is a 2-list of numbers
    if not isinstance(x, (list, tuple)):
        return False
    if len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return False
    return True


def _parse_entry(e) -> complex:
    if isinstance(e, str):
        parts = e.split(",")
        if len(parts) != 2:
            raise GateSetError(f"bad matrix entry {e!r}; expected 're,im'")
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise GateSetError(f"bad matrix entry {e!r}; not numeric") from None
    if isinstance(e, (list, tuple)):
        if len(e) != 2:
            raise GateSetError(f"bad matrix entry {e!r}; expected [re, im]")
        return complex(float(e[0]), float(e[1]))
    if isinstance(e, (int, float)):
        return complex(e)
    raise GateSetError(f"bad matrix entry {e!r}")


def _matrix_to_pairs(m: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m).ravel()]


def parse_instruction_set(text: str | dict) -> InstructionSet:
    """Parse a gate-set JSON document ``{"dim": d, "gates": [{"name", "matrix"}]}``."""
    doc = json.loads(text) if isinstance(text, (str, bytes)) else text
    if not isinstance(doc, dict) or "gates" not in doc:
        raise GateSetError("gate-set document must be an object with a 'gates' list")
    dim = doc.get("dim")
    gates = doc["gates"]
    if not isinstance(gates, list) or not gates:
        raise GateSetError("gate-set document has an empty gate list")
    parsed = []
    for g in gates:
        try:
            parsed.append((g["name"], parse_matrix(g["matrix"], dim)))
        except (KeyError, TypeError):
            raise GateSetError(f"malformed gate entry {g!r}") from None
    return build_instruction_set(parsed)


def load_instruction_set(path) -> InstructionSet:
    with open(path) as f:
        return parse_instruction_set(f.read())


def clifford_t_set() -> InstructionSet:
    """{H, T, T_dag} projected into SU(2); H gains an ``H_dag`` partner."""
    s = 1 / math.sqrt(2)
    h = np.array([[s, s], [s, -s]], dtype=complex)
    t = np.diag([1, np.exp(1j * math.pi / 4)])
    return build_instruction_set([("H", project_su(h)), ("T", project_su(t)),
                                  ("T_dag", project_su(t.conj().T))])


# --- sequences --------------------------------------------------------------


class GateSequence(tuple):
    """Immutable tuple of gate indices into an :class:`InstructionSet`."""

    __slots__ = ()

    def __add__(self, other):
        return GateSequence(tuple.__add__(self, other))

    def __repr__(self):
        return f"GateSequence({list(self)})"


def sequence_from_names(names: Iterable[str], iset: InstructionSet) -> GateSequence:
    return GateSequence(iset.index(n) for n in names)


def sequence_names(seq: Sequence[int], iset: InstructionSet) -> list[str]:
    return [iset.names[i] for i in seq]


def evaluate(seq: Sequence[int], iset: InstructionSet) -> np.ndarray:
    """Product ``g1 @ g2 @ ... @ gm``; the empty sequence gives I.

    Long sequences are multiplied by pairwise tree reduction, which keeps
    roundoff growth logarithmic in the length.
    """
    idx = np.asarray(seq, dtype=np.intp)
    d = iset.dim
    if idx.size == 0:
        return np.eye(d, dtype=complex)
    mats = iset.matrices[idx]
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            tail = mats[-1:]
            mats = np.concatenate([np.matmul(mats[0:-1:2], mats[1:-1:2]), tail])
        else:
            mats = np.matmul(mats[0::2], mats[1::2])
    return mats[0].copy()


def invert(seq: Sequence[int], iset: InstructionSet) -> GateSequence:
    """Sequence for the inverse: reversed, each gate replaced by its inverse."""
    inv = iset.inverse
    return GateSequence(inv[g] for g in reversed(seq))


def simplify(seq: Sequence[int], iset: InstructionSet) -> GateSequence:
    """Cancel adjacent ``(g, g^dagger)`` pairs until none remain."""
    inv = iset.inverse
    out: list[int] = []
    for g in seq:
        if out and inv[out[-1]] == g:
            out.pop()
        else:
            out.append(g)
    return GateSequence(out)


def format_sequence(seq: Sequence[int], iset: InstructionSet, order: str = "product") -> str:
    """Whitespace-separated gate names, in product order or circuit order."""
    names = sequence_names(seq, iset)
    if order == "circuit":
        names.reverse()
    elif order != "product":
        raise ValueError(f"unknown order {order!r}; use 'product' or 'circuit'")
    return " ".join(names)


def parse_sequence(line: str, iset: InstructionSet, order: str = "product") -> GateSequence:
    names = line.split()
    if order == "circuit":
        names.reverse()
    return sequence_from_names(names, iset)


__all__ = [
    "InstructionSet", "GateSequence", "GateSetError", "build_instruction_set",
    "parse_instruction_set", "load_instruction_set", "parse_matrix", "clifford_t_set",
    "evaluate", "invert", "simplify", "format_sequence", "parse_sequence",
    "sequence_from_names", "sequence_names", "unitarity_error",
]
