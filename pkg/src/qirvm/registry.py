"""Name -> operation mapping for QIS and runtime functions.

The registry is the dispatch table between parsed call instructions and
backend operations.  It is built once during setup, optionally extended
with custom operations, then frozen and shared across shot executors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional


class GateId(enum.Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    SY = "sy"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    RZZ = "rzz"
    CNOT = "cnot"
    CY = "cy"
    CZ = "cz"
    CCNOT = "ccnot"
    SWAP = "swap"
    ZZ = "zz"
    XX = "xx"


class OpKind(enum.Enum):
    GATE = "gate"
    MEASURE = "measure"
    RESET = "reset"
    READ_RESULT = "read_result"
    RECORD_ARRAY = "record_array"
    RECORD_RESULT = "record_result"
    INITIALIZE = "initialize"


@dataclass(frozen=True)
class OpSpec:
    kind: OpKind
    gate_id: Optional[GateId] = None
    num_qubits: int = 0
    num_params: int = 0
    returns_bool: bool = False

    def __post_init__(self):
        if self.kind is OpKind.GATE:
            assert self.gate_id is not None
            assert self.num_qubits in (1, 2, 3)
            assert self.num_params in (0, 1)


@dataclass(frozen=True)
class Unresolved:
    """Lookup miss; carries the name for diagnostics."""

    name: str


def _gate(gate_id: GateId, num_qubits: int = 1, num_params: int = 0) -> OpSpec:
    return OpSpec(OpKind.GATE, gate_id, num_qubits, num_params)


# (unmangled name, spec); adjoints get the __adj suffix below.
_DEFAULT_GATES = {
    "h": _gate(GateId.H),
    "x": _gate(GateId.X),
    "y": _gate(GateId.Y),
    "z": _gate(GateId.Z),
    "s": _gate(GateId.S),
    "t": _gate(GateId.T),
    "sy": _gate(GateId.SY),
    "rx": _gate(GateId.RX, num_params=1),
    "ry": _gate(GateId.RY, num_params=1),
    "rz": _gate(GateId.RZ, num_params=1),
    "rzz": _gate(GateId.RZZ, num_qubits=2, num_params=1),
    "cnot": _gate(GateId.CNOT, num_qubits=2),
    "cx": _gate(GateId.CNOT, num_qubits=2),
    "cy": _gate(GateId.CY, num_qubits=2),
    "cz": _gate(GateId.CZ, num_qubits=2),
    "ccx": _gate(GateId.CCNOT, num_qubits=3),
    "ccnot": _gate(GateId.CCNOT, num_qubits=3),
    "swap": _gate(GateId.SWAP, num_qubits=2),
    "zz": _gate(GateId.ZZ, num_qubits=2),
    "xx": _gate(GateId.XX, num_qubits=2),
}

_ADJOINTS = {
    "s": _gate(GateId.SDG),
    "t": _gate(GateId.TDG),
}

MEASURE_SPEC = OpSpec(OpKind.MEASURE, num_qubits=1)
RESET_SPEC = OpSpec(OpKind.RESET, num_qubits=1)
READ_RESULT_SPEC = OpSpec(OpKind.READ_RESULT, returns_bool=True)

_RUNTIME = {
    "__quantum__rt__initialize": OpSpec(OpKind.INITIALIZE),
    "__quantum__rt__array_record_output": OpSpec(OpKind.RECORD_ARRAY),
    "__quantum__rt__result_record_output": OpSpec(OpKind.RECORD_RESULT),
}


class Registry:
    def __init__(self, table: Optional[dict] = None):
        self._table = dict(table or {})
        self._frozen = False

    def freeze(self) -> "Registry":
        self._frozen = True
        return self

    def register(self, name: str, spec: OpSpec) -> bool:
        """Add or overwrite an entry; returns True if it replaced one."""
        if self._frozen:
            raise RuntimeError("registry is frozen")
        if not name:
            raise ValueError("operation name must be non-empty")
        replaced = name in self._table
        self._table[name] = spec
        return replaced

    def resolve(self, name: str):
        """Exact-match lookup; returns OpSpec or Unresolved(name)."""
        spec = self._table.get(name)
        return spec if spec is not None else Unresolved(name)

    def names(self) -> frozenset:
        return frozenset(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __contains__(self, name: str) -> bool:
        return name in self._table


def default_registry() -> Registry:
    reg = Registry()
    for op, spec in _DEFAULT_GATES.items():
        reg.register(f"__quantum__qis__{op}__body", spec)
    for op, spec in _ADJOINTS.items():
        reg.register(f"__quantum__qis__{op}__adj", spec)
    reg.register("__quantum__qis__mz__body", MEASURE_SPEC)
    reg.register("__quantum__qis__m__body", MEASURE_SPEC)
    reg.register("__quantum__qis__reset__body", RESET_SPEC)
    reg.register("__quantum__qis__read_result__body", READ_RESULT_SPEC)
    for name, spec in _RUNTIME.items():
        reg.register(name, spec)
    return reg


def register_operation(registry: Registry, name: str, spec: OpSpec) -> bool:
    return registry.register(name, spec)


def resolve(registry: Registry, name: str):
    return registry.resolve(name)
