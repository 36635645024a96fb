"""qirvm: a virtual machine for QIR base-profile textual assembly.

Parses the textual LLVM-assembly subset emitted by QIR toolchains,
interprets the entry point with classical branching on mid-circuit
measurement results, dispatches quantum operations through a pluggable
name registry onto swappable backends, and aggregates shot results into
a JSON histogram.
"""

__version__ = "0.1.0"

from .analyze import Diagnostic, EntryPoint, find_entry, validate_profile
from .backends import (
    BackendInterface,
    StatevectorBackend,
    TraceBackend,
    available_backends,
    create_backend,
    qpe_reference_distribution,
)
from .errors import (
    AmbiguousEntry,
    NoEntry,
    ParseError,
    QirVmError,
    RuntimeFault,
    UnknownBackend,
)
from .gates import gate_matrix
from .interpreter import RunConfig, execute_shot, run_program, shot_rng
from .parser import parse_double_literal, parse_module
from .recorder import RunResult, ShotRecorder, aggregate, emit_json, parse_json
from .registry import GateId, OpKind, OpSpec, Registry, Unresolved, default_registry

__all__ = [
    "AmbiguousEntry",
    "BackendInterface",
    "Diagnostic",
    "EntryPoint",
    "GateId",
    "NoEntry",
    "OpKind",
    "OpSpec",
    "ParseError",
    "QirVmError",
    "Registry",
    "RunConfig",
    "RunResult",
    "RuntimeFault",
    "ShotRecorder",
    "StatevectorBackend",
    "TraceBackend",
    "UnknownBackend",
    "Unresolved",
    "aggregate",
    "available_backends",
    "create_backend",
    "default_registry",
    "emit_json",
    "execute_shot",
    "find_entry",
    "gate_matrix",
    "parse_double_literal",
    "parse_json",
    "parse_module",
    "qpe_reference_distribution",
    "run_program",
    "shot_rng",
    "validate_profile",
]
