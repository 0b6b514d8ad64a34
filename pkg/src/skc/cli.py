"""``skc`` command line: net build | compile | bench | verify | constants.

Exit codes: 0 ok, 1 usage or input error, 2 numerical precondition
failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import ast
import json
import logging
import math
import operator
import os
import sys

import numpy as np

from . import bench as bench_mod
from . import verify as verify_mod
from .commutator import DEFAULT_CONSTANTS, DecompositionError, SkConstants
from .engine import (CALIBRATED_EPS0, MAX_DEPTH, PreconditionError, choose_depth,
                     compile_unitary, probe_c_approx)
from .gates import GateSetError, clifford_t_set, format_sequence, load_instruction_set, parse_matrix
from .linalg import check_unitary, project_su, rx, ry, rz
from .net import (DEFAULT_MAX_ENTRIES, DEFAULT_TOL, NetError, NetTooLargeError, audit_net,
                  build_net, load_net, save_net)

log = logging.getLogger("skc")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
BUILTIN_SETS = {"clifford_t": clifford_t_set}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- target parsing -----------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}
_ROTATIONS = {"rx": rx, "ry": ry, "rz": rz}


def eval_angle(expr: str) -> float:
    """Evaluate a numeric angle expression such as ``pi/2**7``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise UsageError(f"unsupported angle expression {expr!r}")

    try:
        return ev(ast.parse(expr.strip(), mode="eval"))
    except SyntaxError:
        raise UsageError(f"cannot parse angle {expr!r}") from None


def parse_target(spec: str, iset) -> np.ndarray:
    """Matrix file, generator name, ``I``, or ``rx(..)/ry(..)/rz(..)``."""
    d = iset.dim
    s = spec.strip()
    if os.path.isfile(s):
        with open(s) as f:
            doc = json.load(f)
        if isinstance(doc, dict) and "gates" in doc:
            doc = doc["gates"][0]
        mat = parse_matrix(doc["matrix"] if isinstance(doc, dict) else doc, d)
        return project_su(check_unitary(mat, tol=1e-9), tol=1e-9)
    if s == "I":
        return np.eye(d, dtype=complex)
    if s in iset.names:
        return iset.matrix(s).copy()
    head, _, rest = s.partition("(")
    if head in _ROTATIONS and rest.endswith(")"):
        if d != 2:
            raise UsageError(f"{head}(...) targets need a 2-dimensional net, this one has dim {d}")
        return _ROTATIONS[head](eval_angle(rest[:-1]))
    raise UsageError(f"unrecognized target {spec!r}: expected a matrix file, a gate name, "
                     f"'I', or rx/ry/rz(angle)")


def _load_gateset(arg: str):
    if arg.startswith("@"):
        try:
            return BUILTIN_SETS[arg[1:]]()
        except KeyError:
            raise UsageError(f"unknown builtin gate set {arg!r}; have {sorted(BUILTIN_SETS)}") from None
    return load_instruction_set(arg)


# --- commands -----------------------------------------------------------------


def cmd_net_build(args) -> int:
    iset = _load_gateset(args.gateset)
    net = build_net(iset, args.l0, args.tol, max_entries=args.max_entries)
    line = f"entries={len(net)} l0={args.l0} dim={iset.dim} gates={','.join(iset.names)}"
    if args.audit_samples > 0:
        mx, mean = audit_net(net, args.audit_samples, args.seed)
        line += f" measured_eps0={mx!r} mean_eps={mean!r}"
    save_net(net, args.out)
    print(line)
    return EXIT_OK


def _probe(net, args) -> float:
    return probe_c_approx(net, samples=args.probe_samples, depth=2, seed=args.seed)


def cmd_compile(args) -> int:
    net = load_net(args.net)
    u = parse_target(args.target, net.iset)
    if args.eps is not None and net.measured_eps0 is None:
        raise PreconditionError("--eps needs an audited net (measured eps0)")
    c_fit = None
    if args.mode == "calibrated" and net.measured_eps0 is not None:
        c_fit = _probe(net, args)
    if args.depth is not None:
        if args.depth < 0:
            raise UsageError("--depth must be non-negative")
        depth = args.depth
    elif args.mode == "strict":
        depth = choose_depth(args.eps, net.measured_eps0, DEFAULT_CONSTANTS, "theoretical",
                             max_depth=args.max_depth)
    else:
        depth = choose_depth(args.eps, net.measured_eps0, DEFAULT_CONSTANTS, "calibrated",
                             c_fit=c_fit, max_depth=args.max_depth)
    report = compile_unitary(u, depth, net, DEFAULT_CONSTANTS, args.mode, c_fit=c_fit,
                             eps0_limit=args.eps0_limit)
    seq_text = format_sequence(report.sequence, net.iset, args.order)
    if args.eps is not None and not report.measured_eps < args.eps:
        log.warning("measured eps %.3g did not reach the requested %.3g at depth %d",
                    report.measured_eps, args.eps, depth)
    fields = {
        "depth": depth,
        "mode": args.mode,
        "order": args.order,
        "measured_eps": report.measured_eps,
        "predicted_eps": report.predicted_eps,
        "c_fit": c_fit,
        "raw_length": report.raw_length,
        "simplified_length": report.simplified_length,
        "level0_evaluations": report.level0_evaluations,
    }
    if args.timings:
        fields["level_wall_times"] = report.level_wall_times
    if args.json:
        print(json.dumps({**fields, "sequence": seq_text}, sort_keys=True))
    else:
        print(seq_text)
        print("# " + " ".join(f"{k}={_fmt(v)}" for k, v in fields.items()))
    return EXIT_OK


def cmd_bench(args) -> int:
    net = load_net(args.net)
    c_fit = _probe(net, args) if args.mode == "calibrated" and net.measured_eps0 is not None else None
    result = bench_mod.run_bench(net, args.samples, args.n_max, args.seed, mode=args.mode,
                                 eps0_limit=args.eps0_limit, order=args.order, c_fit=c_fit)
    if args.json:
        text = json.dumps(bench_mod.records_to_json(result, args.timings), sort_keys=True) + "\n"
    else:
        text = bench_mod.records_to_tsv(result, args.timings)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if args.figures:
        from .plotting import render_bench_figures

        for path in render_bench_figures(result, args.figures):
            log.info("wrote %s", path)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify_mod.run_all(args.samples, args.seed)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_constants(args) -> int:
    if args.dim < 2:
        raise UsageError("--dim must be at least 2")
    consts = SkConstants()
    data = consts.as_dict(args.dim)
    if args.json:
        print(json.dumps(data, sort_keys=True))
    else:
        for k, v in data.items():
            print(f"{k}\t{_fmt(v)}")
    return EXIT_OK


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return "none"
    if isinstance(v, dict):
        return ",".join(f"{k}:{val:.6f}" for k, val in v.items())
    return str(v)


# --- parser -------------------------------------------------------------------


def _limit(text: str) -> float | None:
    if text.lower() == "none":
        return None
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="skc", description="Solovay-Kitaev gate compiler")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    net = sub.add_parser("net", help="basic-approximation net tools")
    net_sub = net.add_subparsers(dest="net_command", required=True, parser_class=_Parser)
    nb = net_sub.add_parser("build", help="enumerate and save a net")
    nb.add_argument("--gateset", required=True, help="gate-set JSON file, or @clifford_t")
    nb.add_argument("--l0", type=int, required=True, help="maximum sequence length")
    nb.add_argument("--tol", type=float, default=DEFAULT_TOL, help="dedup distance between unitaries")
    nb.add_argument("--out", required=True)
    nb.add_argument("--audit-samples", type=int, default=1000, help="Haar samples for measuring eps0; 0 skips")
    nb.add_argument("--seed", type=int, default=0)
    nb.add_argument("--max-entries", type=int, default=DEFAULT_MAX_ENTRIES)
    nb.set_defaults(func=cmd_net_build)

    def common_compile(sp):
        sp.add_argument("--net", required=True, help="net file written by net build")
        sp.add_argument("--mode", choices=("strict", "calibrated"), default="calibrated")
        sp.add_argument("--order", choices=("product", "circuit"), default="product",
                        help="print as matrix product or in circuit (time) order")
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--timings", action="store_true", help="include wall-clock times (not reproducible)")
        sp.add_argument("--eps0-limit", type=_limit, default=CALIBRATED_EPS0,
                        help="largest net eps0 accepted in calibrated mode, or 'none'")

    cp = sub.add_parser("compile", help="compile one target")
    common_compile(cp)
    cp.add_argument("--target", required=True,
                    help="matrix JSON file, gate name, I, or rx/ry/rz(angle expression)")
    g = cp.add_mutually_exclusive_group(required=True)
    g.add_argument("--depth", type=int, help="recursion depth n")
    g.add_argument("--eps", type=float, help="target accuracy; depth is chosen from the error model")
    cp.add_argument("--max-depth", type=int, default=MAX_DEPTH)
    cp.add_argument("--probe-samples", type=int, default=5)
    cp.set_defaults(func=cmd_compile)

    bp = sub.add_parser("bench", help="scaling benchmark over Haar-random targets")
    common_compile(bp)
    bp.add_argument("--samples", type=int, default=10, help="number of Haar targets")
    bp.add_argument("--probe-samples", type=int, default=5)
    bp.add_argument("--n-max", type=int, default=4)
    bp.add_argument("--out", help="write the TSV table here instead of stdout")
    bp.add_argument("--figures", metavar="DIR", help="also render PNG figures into DIR")
    bp.set_defaults(func=cmd_bench)

    vp = sub.add_parser("verify", help="run randomized property checks")
    vp.add_argument("--samples", type=int, default=1000)
    vp.add_argument("--seed", type=int, default=0)
    vp.set_defaults(func=cmd_verify)

    kp = sub.add_parser("constants", help="print recursion constants")
    kp.add_argument("--dim", type=int, default=2)
    kp.add_argument("--json", action="store_true")
    kp.set_defaults(func=cmd_constants)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, GateSetError, FileNotFoundError, KeyError) as e:
        print(f"skc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, DecompositionError, NetTooLargeError) as e:
        print(f"skc: numerical precondition failed: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except NetError as e:
        print(f"skc: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
