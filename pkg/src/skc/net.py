"""The basic approximation table: an epsilon_0-net of short gate sequences.

Every product of at most ``l0`` generators is enumerated breadth-first,
keeping one representative per distinct unitary. Because parents are
expanded in lexicographic order and the first occurrence wins, the kept
representative is the shortest sequence and, among those, the
lexicographically first.
"""

from __future__ import annotations

import gzip
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .gates import GateSequence, InstructionSet, parse_instruction_set
from .linalg import haar_unitary, quaternion_embed_many

log = logging.getLogger(__name__)

NET_FORMAT = "skc-net"
NET_VERSION = 1
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ENTRIES = 5_000_000
SHORTLIST = 32
TIE_TOL = 1e-12


class NetError(ValueError):
    pass


class NetTooLargeError(NetError):
    pass


def sequence_count_bound(num_gates: int, l0: int) -> int:
    """Number of backtrack-free words of length <= l0, plus the empty word."""
    k = num_gates
    return 1 + sum(k * (k - 1) ** (l - 1) for l in range(1, l0 + 1))


def required_length(dim: int, num_gates: int, eps0: float) -> float:
    """Order-of-magnitude length needed to cover SU(d) to radius eps0.

    ``(d^2 - 1) log(1/eps0) / log|G|``, with all constants dropped.
    """
    return (dim * dim - 1) * math.log(1 / eps0) / math.log(num_gates)


def embed(us: np.ndarray) -> np.ndarray:
    """Search-space embedding of a stack of unitaries.

    SU(2) uses quaternions, so Euclidean distance is the operator-norm
    distance. Larger dims use the flattened real/imag parts, whose Euclidean
    (Frobenius) distance is at least the operator-norm distance and at most
    sqrt(d) times it.
    """
    us = np.asarray(us)
    if us.shape[1] == 2:
        return quaternion_embed_many(us)
    flat = us.reshape(us.shape[0], -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


@dataclass(eq=False)
class BasicNet:
    iset: InstructionSet
    l0: int
    tol: float
    offsets: np.ndarray    # (n+1,) into ``flat``
    flat: np.ndarray       # concatenated gate indices
    unitaries: np.ndarray  # (n, d, d)
    measured_eps0: float | None = None
    _tree: cKDTree = field(init=False, repr=False)

    def __post_init__(self):
        self.unitaries.setflags(write=False)
        self._tree = cKDTree(embed(self.unitaries))

    @property
    def dim(self) -> int:
        return self.iset.dim

    @property
    def set_fingerprint(self) -> str:
        return self.iset.fingerprint

    def __len__(self) -> int:
        return self.unitaries.shape[0]

    def sequence(self, i: int) -> GateSequence:
        return GateSequence(int(g) for g in self.flat[self.offsets[i]:self.offsets[i + 1]])

    def length(self, i: int) -> int:
        return int(self.offsets[i + 1] - self.offsets[i])

    def nearest(self, u: np.ndarray) -> tuple[int, float]:
        """Index of the entry closest to ``u`` in operator norm, and its distance."""
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.dim, self.dim):
            raise NetError(f"target has shape {u.shape}, net is for dim {self.dim}")
        idx, dist = self.nearest_many(u[None])
        return int(idx[0]), float(dist[0])

    def nearest_many(self, us: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        us = np.asarray(us, dtype=complex)
        q = embed(us)
        n = len(self)
        k = min(n, 8 if self.dim == 2 else SHORTLIST)
        dist, idx = self._tree.query(q, k=k)
        dist = dist.reshape(len(us), -1)
        idx = idx.reshape(len(us), -1)
        out_i = np.empty(len(us), dtype=np.intp)
        out_d = np.empty(len(us))
        for t in range(len(us)):
            if self.dim == 2:
                cand, cd = idx[t], dist[t]
            else:
                cand, cd = self._rerank(us[t], idx[t])
            best = cd.min()
            # deterministic tie-break: lowest entry index (shortest, then lex-first)
            ties = cand[cd <= best + TIE_TOL]
            out_i[t] = ties.min()
            out_d[t] = cd[cand == out_i[t]][0]
        return out_i, out_d

    def _rerank(self, u: np.ndarray, shortlist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d_short = _op_dists(self.unitaries[shortlist], u)
        radius = math.sqrt(self.dim) * d_short.min() + 1e-12
        ball = np.asarray(self._tree.query_ball_point(embed(u[None])[0], radius), dtype=np.intp)
        if ball.size > shortlist.size:
            return ball, _op_dists(self.unitaries[ball], u)
        return shortlist, d_short


def _op_dists(stack: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.linalg.norm(stack - u, ord=2, axis=(1, 2))


def build_net(iset: InstructionSet, l0: int, dedupe_tol: float = DEFAULT_TOL,
              max_entries: int = DEFAULT_MAX_ENTRIES) -> BasicNet:
    """Enumerate all products of length <= ``l0`` into a deduplicated net.

    Immediate backtracking (a gate followed by its inverse) is pruned.
    Raises :class:`NetTooLargeError` once the table would exceed
    ``max_entries``.
    """
    if l0 < 0:
        raise NetError("l0 must be non-negative")
    if not dedupe_tol > 0:
        raise NetError("dedupe_tol must be positive")
    d = iset.dim
    gates = iset.matrices
    k = len(iset)
    inv = np.asarray(iset.inverse)
    # duplicates are searched in a coordinate projection of the embedding;
    # dropping coordinates never increases distances, so this radius catches
    # every operator-norm duplicate (Frobenius <= sqrt(d) * operator norm)
    radius = dedupe_tol * (1.0 if d == 2 else math.sqrt(d))

    seqs: list[np.ndarray] = [np.zeros((1, 0), dtype=np.int32)]
    mats: list[np.ndarray] = [np.eye(d, dtype=complex)[None]]
    keys: list[np.ndarray] = [_dedupe_key(mats[0])]
    total = 1
    front_seq, front_mat = seqs[0], mats[0]
    for length in range(1, l0 + 1):
        if front_mat.shape[0] == 0:
            break
        n_par = front_mat.shape[0]
        cand = np.matmul(front_mat[:, None], gates[None]).reshape(-1, d, d)
        gate_idx = np.tile(np.arange(k, dtype=np.int32), n_par)
        parent = np.repeat(np.arange(n_par), k)
        if length > 1:
            keep = inv[front_seq[parent, -1]] != gate_idx
            cand, gate_idx, parent = cand[keep], gate_idx[keep], parent[keep]
        ckey = _dedupe_key(cand)
        fresh = _not_in(ckey, cand, np.concatenate(keys), np.concatenate(mats), radius, dedupe_tol)
        cand, gate_idx, parent, ckey = cand[fresh], gate_idx[fresh], parent[fresh], ckey[fresh]
        first = _first_occurrences(cand, ckey, radius, dedupe_tol)
        cand, gate_idx, parent, ckey = cand[first], gate_idx[first], parent[first], ckey[first]
        new_seq = np.concatenate([front_seq[parent], gate_idx[:, None]], axis=1)
        total += cand.shape[0]
        if total > max_entries:
            raise _too_large(iset, l0, total, max_entries)
        seqs.append(new_seq)
        mats.append(cand)
        keys.append(ckey)
        front_seq, front_mat = new_seq, cand
        log.debug("length %d: %d new entries (%d total)", length, cand.shape[0], total)

    lengths = np.array([s.shape[1] for s in seqs for _ in range(s.shape[0])], dtype=np.int64)
    offsets = np.zeros(total + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    flat = np.concatenate([s.ravel() for s in seqs]).astype(np.int32)
    return BasicNet(iset, l0, dedupe_tol, offsets, flat, np.concatenate(mats))


def _too_large(iset: InstructionSet, l0: int, count: int, budget: int) -> NetTooLargeError:
    bound = sequence_count_bound(len(iset), l0)
    return NetTooLargeError(
        f"net for l0={l0} exceeds the budget of {budget} entries (reached {count}; "
        f"backtrack-free word count is {bound}, i.e. O(|G|^l0) with |G|={len(iset)}); "
        f"covering SU({iset.dim}) to radius eps0 needs l0 ~ (d^2-1) log(1/eps0)/log|G|, "
        f"e.g. {required_length(iset.dim, len(iset), 0.1):.1f} for eps0=0.1"
    )


def _dedupe_key(us: np.ndarray) -> np.ndarray:
    e = embed(us)
    return e[:, :6] if e.shape[1] > 6 else e


def _close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return np.linalg.norm(a - b, 2) <= tol


def _not_in(ckey, cand, known_keys, known_mats, radius, tol) -> np.ndarray:
    """Mask of candidates with no operator-norm duplicate among known entries."""
    tree = cKDTree(known_keys)
    fresh = np.ones(cand.shape[0], dtype=bool)
    for i, hits in enumerate(tree.query_ball_point(ckey, radius)):
        if hits and any(_close(known_mats[j], cand[i], tol) for j in hits):
            fresh[i] = False
    return fresh


def _first_occurrences(cand, ckey, radius, tol) -> np.ndarray:
    keep = np.ones(cand.shape[0], dtype=bool)
    if cand.shape[0] < 2:
        return keep
    pairs = cKDTree(ckey).query_pairs(radius, output_type="ndarray")
    if len(pairs) == 0:
        return keep
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    for i, j in pairs:
        if keep[i] and _close(cand[i], cand[j], tol):
            keep[j] = False
    return keep


def lookup(net: BasicNet, u: np.ndarray) -> tuple[GateSequence, float]:
    """Closest net entry to ``u``: its sequence and operator-norm distance."""
    i, dist = net.nearest(np.asarray(u, dtype=complex))
    return net.sequence(i), dist


def lookup_linear(net: BasicNet, u: np.ndarray) -> tuple[int, float]:
    """Brute-force argmin over every entry; reference for :func:`lookup`."""
    dists = _op_dists(net.unitaries, np.asarray(u, dtype=complex))
    best = dists.min()
    i = int(np.flatnonzero(dists <= best + TIE_TOL)[0])
    return i, float(dists[i])


def audit_net(net: BasicNet, samples: int, seed: int = 0) -> tuple[float, float]:
    """Max and mean lookup distance over Haar-random targets.

    The max is stored on the net as ``measured_eps0``.
    """
    if samples <= 0:
        raise NetError("audit needs at least one sample")
    rng = np.random.default_rng(seed)
    targets = np.array([haar_unitary(net.dim, rng) for _ in range(samples)])
    _, dist = net.nearest_many(targets)
    net.measured_eps0 = float(dist.max())
    return net.measured_eps0, float(dist.mean())


# --- persistence ------------------------------------------------------------


def net_to_json(net: BasicNet) -> dict:
    entries = []
    for i in range(len(net)):
        entries.append({
            "seq": [int(g) for g in net.flat[net.offsets[i]:net.offsets[i + 1]]],
            "matrix": [f"{z.real!r},{z.imag!r}" for z in net.unitaries[i].ravel().tolist()],
        })
    return {
        "format": NET_FORMAT,
        "version": NET_VERSION,
        "set_fingerprint": net.set_fingerprint,
        "l0": net.l0,
        "tol": net.tol,
        "measured_eps0": net.measured_eps0,
        "gateset": net.iset.to_json(),
        "entries": entries,
    }


def net_from_json(doc: dict, iset: InstructionSet | None = None) -> BasicNet:
    if doc.get("format") != NET_FORMAT:
        raise NetError("not a net file")
    if doc.get("version") != NET_VERSION:
        raise NetError(f"unsupported net file version {doc.get('version')!r}")
    stored = parse_instruction_set(doc["gateset"])
    if stored.fingerprint != doc["set_fingerprint"]:
        raise NetError("net file is corrupt: embedded gate set does not match its fingerprint")
    if iset is not None and iset.fingerprint != doc["set_fingerprint"]:
        raise NetError("net was built for a different instruction set (fingerprint mismatch)")
    iset = iset or stored
    d = iset.dim
    entries = doc["entries"]
    lengths = np.array([len(e["seq"]) for e in entries], dtype=np.int64)
    offsets = np.zeros(len(entries) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    flat = np.array([g for e in entries for g in e["seq"]], dtype=np.int32)
    mats = np.empty((len(entries), d, d), dtype=complex)
    for i, e in enumerate(entries):
        vals = [complex(*map(float, s.split(","))) for s in e["matrix"]]
        mats[i] = np.array(vals).reshape(d, d)
    return BasicNet(iset, int(doc["l0"]), float(doc["tol"]), offsets, flat, mats,
                    measured_eps0=doc.get("measured_eps0"))


def save_net(net: BasicNet, path) -> None:
    text = json.dumps(net_to_json(net), separators=(",", ":")).encode()
    path = str(path)
    if path.endswith(".gz"):
        with open(path, "wb") as f, gzip.GzipFile(fileobj=f, mode="wb", mtime=0, filename="") as gz:
            gz.write(text)
    else:
        with open(path, "wb") as f:
            f.write(text)


def load_net(path, iset: InstructionSet | None = None) -> BasicNet:
    path = str(path)
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as f:
        doc = json.loads(f.read())
    return net_from_json(doc, iset)
