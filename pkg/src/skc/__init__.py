"""Solovay-Kitaev compilation of SU(d) unitaries into gate sequences."""

from .commutator import (DEFAULT_CONSTANTS, DecompositionError, GcPair, SkConstants, gc_decompose,
                         gc_decompose_su2, lie_solution)
from .engine import (CompileNode, CompileReport, Compiler, PreconditionError, choose_depth,
                     compile_unitary, flatten, predict, solovay_kitaev)
from .gates import (GateSequence, GateSetError, InstructionSet, build_instruction_set, clifford_t_set,
                    evaluate, format_sequence, load_instruction_set, parse_instruction_set, simplify)
from .linalg import haar_unitary, op_norm_distance, project_su, quaternion_embed
from .net import BasicNet, NetError, audit_net, build_net, load_net, lookup, save_net

__version__ = "0.1.0"

__all__ = [
    "BasicNet", "CompileNode", "CompileReport", "Compiler", "DEFAULT_CONSTANTS", "DecompositionError",
    "GateSequence", "GateSetError", "GcPair", "InstructionSet", "NetError", "PreconditionError",
    "SkConstants", "audit_net", "build_instruction_set", "build_net", "choose_depth", "clifford_t_set",
    "compile_unitary", "evaluate", "flatten", "format_sequence", "gc_decompose", "gc_decompose_su2",
    "haar_unitary", "lie_solution", "load_instruction_set", "load_net", "lookup", "op_norm_distance",
    "parse_instruction_set", "predict", "project_su", "quaternion_embed", "save_net", "simplify",
    "solovay_kitaev",
]
