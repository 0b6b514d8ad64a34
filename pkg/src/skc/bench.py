"""Scaling benchmark: compile Haar-random targets at every depth and fit
the length and convergence exponents."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .commutator import DEFAULT_CONSTANTS, SkConstants
from .engine import Compiler, flatten, predict_eps
from .gates import evaluate, format_sequence
from .linalg import haar_unitary, op_norm_distance
from .net import BasicNet

EPS_FLOOR = 1e-10

RECORD_FIELDS = ("target_id", "n", "predicted_eps", "measured_eps", "raw_length", "simplified_length")


@dataclass
class BenchRecord:
    target_id: int
    n: int
    predicted_eps: float | None
    measured_eps: float
    raw_length: int
    simplified_length: int
    level_wall_times: dict = field(default_factory=dict)
    sequence: str = ""


@dataclass
class BenchResult:
    records: list[BenchRecord]
    fits: dict


def run_bench(net: BasicNet, samples: int, n_max: int, seed: int = 0,
              consts: SkConstants = DEFAULT_CONSTANTS, mode: str = "calibrated",
              eps0_limit: float | None = None, order: str = "product",
              c_fit: float | None = None) -> BenchResult:
    """Compile ``samples`` seeded Haar targets at n = 0..n_max.

    Predictions use ``c_fit`` when given, else ``consts.c_approx``.
    """
    if samples < 1:
        raise ValueError("need at least one target")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    rng = np.random.default_rng(seed)
    targets = [haar_unitary(net.dim, rng) for _ in range(samples)]
    compiler = Compiler(net, consts, mode, eps0_limit)
    c_pred = consts.c_approx if c_fit is None else c_fit
    records = []
    for tid, u in enumerate(targets):
        for n in range(n_max + 1):
            node = compiler.compile(u, n)
            seq = flatten(node, net)
            measured = op_norm_distance(u, evaluate(seq, net.iset))
            predicted = (predict_eps(net.measured_eps0, n, c_pred)
                         if net.measured_eps0 is not None else None)
            records.append(BenchRecord(
                tid, n, predicted, measured, node.raw_length, len(seq),
                {k: round(v, 6) for k, v in sorted(compiler.stats.wall_time.items())},
                format_sequence(seq, net.iset, order),
            ))
    fits = fit_exponents(records)
    fits["c_fit"] = c_fit
    return BenchResult(records, fits)


def length_exponent(lengths, eps, floor: float = EPS_FLOOR) -> float | None:
    """Slope of ln(length) against ln ln(1/eps), over points with floor < eps < 1."""
    pts = [(math.log(math.log(1 / e)), math.log(l)) for l, e in zip(lengths, eps)
           if floor < e < 1 and l > 0]
    xs = np.array([p[0] for p in pts])
    if len(pts) < 2 or np.ptp(xs) == 0:
        return None
    return float(np.polyfit(xs, [p[1] for p in pts], 1)[0])


def order_estimates(ladder, floor: float = EPS_FLOOR) -> list[float]:
    """ln(eps_n) / ln(eps_{n-1}) for consecutive levels with eps_n above the floor."""
    out = []
    for prev, cur in zip(ladder, ladder[1:]):
        if cur > floor and 0 < prev < 1:
            out.append(math.log(cur) / math.log(prev))
    return out


def fit_exponents(records: list[BenchRecord]) -> dict:
    by_target: dict[int, list[BenchRecord]] = {}
    for r in records:
        by_target.setdefault(r.target_id, []).append(r)
    orders, per_level, decreases, pairs = [], {}, 0, 0
    for recs in by_target.values():
        recs.sort(key=lambda r: r.n)
        ladder = [r.measured_eps for r in recs]
        for r_prev, r_cur in zip(recs, recs[1:]):
            pairs += 1
            decreases += r_cur.measured_eps < r_prev.measured_eps
            if r_cur.measured_eps > EPS_FLOOR and 0 < r_prev.measured_eps < 1:
                per_level.setdefault(r_cur.n, []).append(
                    math.log(r_cur.measured_eps) / math.log(r_prev.measured_eps))
        orders.extend(order_estimates(ladder))
    eps = [r.measured_eps for r in records]
    return {
        "length_exponent_simplified": length_exponent([r.simplified_length for r in records], eps),
        "length_exponent_raw": length_exponent([r.raw_length for r in records], eps),
        "order_mean": float(np.mean(orders)) if orders else None,
        "order_per_level": {n: float(np.mean(v)) for n, v in sorted(per_level.items())},
        "decrease_fraction": decreases / pairs if pairs else None,
    }


def records_to_tsv(result: BenchResult, timings: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    cols = list(RECORD_FIELDS) + (["level_wall_times"] if timings else [])
    writer.writerow(cols)
    for r in result.records:
        row = [r.target_id, r.n, _fmt(r.predicted_eps), _fmt(r.measured_eps), r.raw_length, r.simplified_length]
        if timings:
            row.append(",".join(f"{k}:{v:.6f}" for k, v in r.level_wall_times.items()))
        writer.writerow(row)
    for key, value in result.fits.items():
        if isinstance(value, dict):
            value = ",".join(f"{k}:{_fmt(v)}" for k, v in value.items())
        else:
            value = _fmt(value)
        buf.write(f"# {key}\t{value}\n")
    return buf.getvalue()


def records_to_json(result: BenchResult, timings: bool = False) -> dict:
    recs = []
    for r in result.records:
        d = asdict(r)
        if not timings:
            d.pop("level_wall_times")
        recs.append(d)
    fits = dict(result.fits)
    fits["order_per_level"] = {str(k): v for k, v in fits["order_per_level"].items()}
    return {"records": recs, "fits": fits}


def _fmt(x) -> str:
    if x is None:
        return "nan"
    return repr(float(x))
