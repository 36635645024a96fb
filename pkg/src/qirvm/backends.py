"""Execution backends: dense statevector simulator and trace recorder.

A backend instance is exclusively owned by a single shot execution; the
factory hands out a fresh instance per shot.  Basis convention: qubit i
is bit i of the little-endian amplitude index.
"""

from __future__ import annotations

import abc
from typing import Optional

import numpy as np

from .errors import RuntimeFault, UnknownBackend
from .gates import GATE_ARITY, gate_matrix
from .registry import GateId

DEFAULT_MAX_QUBITS = 24


class BackendInterface(abc.ABC):
    """Contract the interpreter drives; see also create_backend()."""

    @abc.abstractmethod
    def allocate(self, num_qubits: int, rng: Optional[np.random.Generator] = None):
        ...

    @abc.abstractmethod
    def apply_gate(self, gate_id: GateId, params, targets):
        ...

    @abc.abstractmethod
    def measure(self, qubit: int) -> int:
        ...

    @abc.abstractmethod
    def reset(self, qubit: int):
        ...

    @abc.abstractmethod
    def name(self) -> str:
        ...


class StatevectorBackend(BackendInterface):
    """Exact simulation over all 2^n complex amplitudes.

    Measurement consumes exactly one uniform draw per call (outcome 1 iff
    u < p1), keeping the RNG stream portable and countable.
    """

    def __init__(self, max_qubits: int = DEFAULT_MAX_QUBITS):
        self.max_qubits = max_qubits
        self.n = 0
        self.amplitudes = None
        self.rng = None

    def name(self) -> str:
        return "statevector"

    def allocate(self, num_qubits: int, rng: Optional[np.random.Generator] = None):
        if num_qubits > self.max_qubits:
            raise RuntimeFault(
                f"{num_qubits} qubits exceeds the configured maximum of {self.max_qubits}"
            )
        self.n = num_qubits
        self.amplitudes = np.zeros(2 ** max(num_qubits, 0), dtype=complex)
        self.amplitudes[0] = 1.0
        self.rng = rng

    def _check_targets(self, targets):
        if len(set(targets)) != len(targets):
            raise RuntimeFault(f"duplicate qubit targets {list(targets)}")
        for q in targets:
            if not 0 <= q < self.n:
                raise RuntimeFault(f"qubit index {q} out of range for {self.n} qubits")

    def apply_gate(self, gate_id: GateId, params, targets):
        self._check_targets(targets)
        if GATE_ARITY[gate_id] != len(targets):
            raise RuntimeFault(
                f"{gate_id.name} acts on {GATE_ARITY[gate_id]} qubit(s), got {len(targets)}"
            )
        params = tuple(params)
        if self.n <= _FULL_MATRIX_MAX_QUBITS:
            full = _full_matrix(gate_id, params, tuple(targets), self.n)
            if full is not None:
                self.amplitudes = full @ self.amplitudes
                return
        self.amplitudes = _apply_matrix(
            self.amplitudes, _cached_matrix(gate_id, params), targets, self.n
        )

    def _prob_one(self, qubit: int) -> float:
        # view with the measured qubit as the middle axis
        psi = self.amplitudes.reshape(-1, 2, 1 << qubit)
        branch = psi[:, 1, :]
        return float(np.real(np.einsum("ij,ij->", branch, branch.conj())))

    def measure(self, qubit: int) -> int:
        if not 0 <= qubit < self.n:
            raise RuntimeFault(f"qubit index {qubit} out of range for {self.n} qubits")
        if self.rng is None:
            raise RuntimeFault("statevector backend needs an RNG stream to measure")
        p1 = self._prob_one(qubit)
        outcome = 1 if self.rng.random() < p1 else 0
        self._project(qubit, outcome, p1 if outcome else 1.0 - p1)
        return outcome

    def _project(self, qubit: int, outcome: int, probability: float):
        if probability <= 0.0:
            raise RuntimeFault("measurement projected onto a zero-probability branch")
        psi = self.amplitudes.reshape(-1, 2, 1 << qubit)
        psi[:, 1 - outcome, :] = 0.0
        self.amplitudes *= 1.0 / np.sqrt(probability)

    def reset(self, qubit: int):
        if self.measure(qubit) == 1:
            self.apply_gate(GateId.X, (), (qubit,))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


_MATRIX_CACHE = {}


def _cached_matrix(gate_id: GateId, params: tuple) -> np.ndarray:
    key = (gate_id, params)
    matrix = _MATRIX_CACHE.get(key)
    if matrix is None:
        matrix = gate_matrix(gate_id, params)
        matrix.setflags(write=False)
        _MATRIX_CACHE[key] = matrix
    return matrix


# Shot loops re-apply the same gate instance thousands of times, so on the
# second sighting of a (gate, params, targets, n) key we embed it once into
# the full 2^n x 2^n operator and replay it as a single matvec.  One-off
# applications (e.g. randomized sequences) never pay the embedding cost.
_FULL_MATRIX_MAX_QUBITS = 8
_FULL_CACHE = {}
_SEEN_ONCE = set()


def _full_matrix(gate_id: GateId, params, targets, n: int):
    key = (gate_id, params, targets, n)
    full = _FULL_CACHE.get(key)
    if full is not None:
        return full
    if key not in _SEEN_ONCE:
        if len(_SEEN_ONCE) > 1 << 16:
            _SEEN_ONCE.clear()
        _SEEN_ONCE.add(key)
        return None
    if len(_FULL_CACHE) >= 1024:
        return None
    matrix = _cached_matrix(gate_id, params)
    dim = 2 ** n
    full = np.empty((dim, dim), dtype=complex)
    basis = np.zeros(dim, dtype=complex)
    for col in range(dim):
        basis[:] = 0.0
        basis[col] = 1.0
        full[:, col] = _apply_matrix(basis, matrix, targets, n)
    full.setflags(write=False)
    _FULL_CACHE[key] = full
    return full


def _apply_matrix(state: np.ndarray, matrix: np.ndarray, targets, n: int) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the targeted qubit subspace."""
    if len(targets) == 1:
        q = targets[0]
        psi = state.reshape(-1, 2, 1 << q)
        out = np.empty_like(psi)
        zero, one = psi[:, 0, :], psi[:, 1, :]
        out[:, 0, :] = matrix[0, 0] * zero + matrix[0, 1] * one
        out[:, 1, :] = matrix[1, 0] * zero + matrix[1, 1] * one
        return out.reshape(-1)
    k = len(targets)
    axes = [n - 1 - q for q in targets]  # axis order matches matrix bit order
    rest = [a for a in range(n) if a not in axes]
    perm = axes + rest
    inverse = [0] * n
    for i, p in enumerate(perm):
        inverse[p] = i
    psi = state.reshape([2] * n).transpose(perm).reshape(2 ** k, -1)
    psi = matrix @ psi
    return psi.reshape([2] * n).transpose(inverse).reshape(-1)


class TraceBackend(BackendInterface):
    """Records the dispatched instruction stream instead of simulating.

    Measurement outcomes come from `measure_bits` (cycled) or default 0,
    so branch paths can be forced deterministically in tests.
    """

    def __init__(self, measure_bits=None):
        self.measure_bits = list(measure_bits) if measure_bits is not None else []
        self._measure_cursor = 0
        self.log = []
        self.n = 0

    def name(self) -> str:
        return "trace"

    def allocate(self, num_qubits: int, rng=None):
        self.n = num_qubits
        self.log = []
        self._measure_cursor = 0

    def apply_gate(self, gate_id: GateId, params, targets):
        self.log.append((gate_id.value, tuple(params), tuple(targets)))

    def measure(self, qubit: int) -> int:
        if self.measure_bits:
            bit = self.measure_bits[self._measure_cursor % len(self.measure_bits)]
            self._measure_cursor += 1
        else:
            bit = 0
        self.log.append(("mz", (), (qubit,)))
        return int(bit)

    def reset(self, qubit: int):
        self.log.append(("reset", (), (qubit,)))


_BACKENDS = {
    "statevector": StatevectorBackend,
    "trace": TraceBackend,
}


def available_backends():
    return sorted(_BACKENDS)


def create_backend(choice: str, **options) -> BackendInterface:
    """Instantiate a fresh backend by registered name."""
    factory = _BACKENDS.get(choice)
    if factory is None:
        raise UnknownBackend(
            f"unknown backend {choice!r}; available: {', '.join(available_backends())}"
        )
    return factory(**options)


def qpe_reference_distribution(phi: float, k: int) -> np.ndarray:
    """Analytic outcome distribution of k-bit phase estimation of phase phi.

    P(m) = sin^2(2^k pi d) / (4^k sin^2(pi d)) with d = phi - m/2^k, and
    P(m) = 1 in the d -> 0 limit.
    """
    if k > 20:
        raise ValueError("k must be at most 20")
    two_k = 2 ** k
    m = np.arange(two_k)
    delta = phi - m / two_k
    probs = np.empty(two_k)
    exact = np.isclose(np.sin(np.pi * delta), 0.0, atol=1e-15)
    with np.errstate(divide="ignore", invalid="ignore"):
        probs = np.sin(two_k * np.pi * delta) ** 2 / (
            4 ** k * np.sin(np.pi * delta) ** 2
        )
    probs[exact] = 1.0
    return probs
