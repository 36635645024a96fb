"""Unitary matrices for the supported gate set.

Convention: a k-qubit matrix is indexed by bits (t0 t1 ... t_{k-1}) with
targets[0] as the most significant bit, so controlled gates take their
controls first (CNOT = [[I,0],[0,X]] with the control as bit 0).
"""

from __future__ import annotations

import numpy as np

from .registry import GateId

_SQ2 = 1.0 / np.sqrt(2.0)

_FIXED = {
    GateId.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
    GateId.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateId.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateId.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateId.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateId.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateId.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    GateId.TDG: np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
    # principal square root of Y
    GateId.SY: 0.5 * np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]], dtype=complex),
    GateId.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
    GateId.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateId.CY: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, -1j], [0, 0, 1j, 0]], dtype=complex
    ),
    GateId.CZ: np.diag([1, 1, 1, -1]).astype(complex),
}

_PARAM_COUNT = {GateId.RX: 1, GateId.RY: 1, GateId.RZ: 1, GateId.RZZ: 1}

GATE_ARITY = {
    **{g: 1 for g in (GateId.H, GateId.X, GateId.Y, GateId.Z, GateId.S, GateId.SDG,
                      GateId.SY, GateId.T, GateId.TDG, GateId.RX, GateId.RY, GateId.RZ)},
    **{g: 2 for g in (GateId.RZZ, GateId.CNOT, GateId.CY, GateId.CZ, GateId.SWAP,
                      GateId.ZZ, GateId.XX)},
    GateId.CCNOT: 3,
}


def _rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]).astype(complex)


def _rzz(theta: float) -> np.ndarray:
    # exp(-i theta (Z(x)Z) / 2): |00>,|11> pick up -theta/2; |01>,|10> +theta/2
    a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
    return np.diag([a, b, b, a]).astype(complex)


def _toffoli() -> np.ndarray:
    m = np.eye(8, dtype=complex)
    m[[6, 7]] = m[[7, 6]]
    return m


def _xx_fixed() -> np.ndarray:
    # exp(-i (pi/4) X(x)X), the maximally entangling Ising/MS convention
    xkron = np.kron(_FIXED[GateId.X], _FIXED[GateId.X])
    return (np.eye(4) - 1j * xkron).astype(complex) * _SQ2


def gate_matrix(gate_id: GateId, params=()) -> np.ndarray:
    """Return the unitary for a gate; parameterized angles are radians."""
    expected = _PARAM_COUNT.get(gate_id, 0)
    if len(params) != expected:
        raise ValueError(f"{gate_id.name} takes {expected} parameter(s), got {len(params)}")
    if gate_id in _FIXED:
        return _FIXED[gate_id].copy()
    if gate_id is GateId.RX:
        return _rx(params[0])
    if gate_id is GateId.RY:
        return _ry(params[0])
    if gate_id is GateId.RZ:
        return _rz(params[0])
    if gate_id is GateId.RZZ:
        return _rzz(params[0])
    if gate_id is GateId.ZZ:
        return _rzz(np.pi / 2)
    if gate_id is GateId.XX:
        return _xx_fixed()
    if gate_id is GateId.CCNOT:
        return _toffoli()
    raise ValueError(f"unknown gate {gate_id!r}")
