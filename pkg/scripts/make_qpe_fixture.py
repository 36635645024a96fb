#!/usr/bin/env python3
"""Generate the checked-in phase-estimation fixture (phi=1/3, k=5, n=6).

The circuit estimates the eigenphase of the single-qubit phase gate
U = diag(1, e^{2 pi i phi}) on its |1> eigenstate, using five ancilla
qubits (q0..q4, q0 ending up as the most significant output bit) and the
eigenstate on q5.  Controlled phase gates are decomposed into the
rz/rz/rzz pattern available in the default gate set; the global phase
dropped by that decomposition is unobservable.

Run from the repository root:

    python3 scripts/make_qpe_fixture.py tests/fixtures/qpe_phi_third_k5.ll

The script verifies the emitted program against the closed-form outcome
distribution before writing it.
"""

import struct
import sys

import numpy as np

K = 5
N = 6  # K ancillas + 1 eigenstate qubit
PHI_NUM, PHI_DEN = 1, 3
PHI = PHI_NUM / PHI_DEN


def cp(theta, control, target):
    """Controlled-phase up to global phase: rz(t/2) c; rz(t/2) t; rzz(-t/2)."""
    return [
        ("rz", (theta / 2,), (control,)),
        ("rz", (theta / 2,), (target,)),
        ("rzz", (-theta / 2,), (control, target)),
    ]


def build_gates():
    gates = [("x", (), (N - 1,))]
    for q in range(K):
        gates.append(("h", (), (q,)))
    # ancilla q controls U^(2^(K-1-q)) so that q0 is the MSB of the estimate
    for q in range(K):
        theta = 2 * np.pi * PHI * (2 ** (K - 1 - q))
        gates += cp(theta, q, N - 1)
    # inverse QFT on q0..q4 (q0 = MSB): reverse of the standard QFT circuit
    for i in range(K // 2):
        gates.append(("swap", (), (i, K - 1 - i)))
    for i in range(K - 1, -1, -1):
        for d in range(K - 1 - i, 0, -1):
            gates += cp(-np.pi / 2 ** d, i + d, i)
        gates.append(("h", (), (i,)))
    return gates


def simulate(gates):
    """Dense reference simulation; little-endian basis (qubit i = bit i)."""
    state = np.zeros(2 ** N, dtype=complex)
    state[0] = 1.0
    for name, params, targets in gates:
        mat = {
            "x": np.array([[0, 1], [1, 0]], dtype=complex),
            "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
            "swap": np.array(
                [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
            ),
            "rz": None,
            "rzz": None,
        }[name]
        if name == "rz":
            mat = np.diag([np.exp(-0.5j * params[0]), np.exp(0.5j * params[0])])
        elif name == "rzz":
            a, b = np.exp(-0.5j * params[0]), np.exp(0.5j * params[0])
            mat = np.diag([a, b, b, a])
        k = len(targets)
        psi = state.reshape([2] * N)
        axes = [N - 1 - q for q in targets]
        psi = np.tensordot(mat.reshape([2] * 2 * k), psi, axes=(list(range(k, 2 * k)), axes))
        state = np.moveaxis(psi, range(k), axes).reshape(-1)
    return state


def reference_distribution():
    m = np.arange(2 ** K)
    delta = PHI - m / 2 ** K
    with np.errstate(divide="ignore", invalid="ignore"):
        probs = np.sin(2 ** K * np.pi * delta) ** 2 / (4 ** K * np.sin(np.pi * delta) ** 2)
    probs[np.isclose(np.sin(np.pi * delta), 0.0)] = 1.0
    return probs


def check(gates):
    state = simulate(gates)
    probs = np.abs(state) ** 2
    # marginal over the K ancillas, interpreted MSB-first (q0 = MSB)
    marg = np.zeros(2 ** K)
    for idx, p in enumerate(probs):
        m = 0
        for q in range(K):
            m = (m << 1) | ((idx >> q) & 1)
        marg[m] += p
    ref = reference_distribution()
    err = np.max(np.abs(marg - ref))
    assert err < 1e-9, f"fixture disagrees with the closed form: max err {err}"
    return marg


def hexdouble(value):
    return "0x%016X" % struct.unpack(">Q", struct.pack(">d", value))[0]


def qubit_arg(q):
    if q == 0:
        return "%Qubit* null"
    return f"%Qubit* inttoptr (i64 {q} to %Qubit*)"


def result_arg(r):
    if r == 0:
        return "%Result* null"
    return f"%Result* inttoptr (i64 {r} to %Result*)"


def emit(gates):
    lines = [
        "; phase estimation of U = diag(1, exp(2*pi*i/3)) to 5 bits on 6 qubits",
        'source_filename = "qpe_phi_third_k5"',
        "",
        "%Qubit = type opaque",
        "%Result = type opaque",
        "",
        "define void @main() #0 {",
        "entry:",
    ]
    for name, params, targets in gates:
        args = [f"double {hexdouble(p)}" for p in params]
        args += [qubit_arg(q) for q in targets]
        lines.append(f"  call void @__quantum__qis__{name}__body({', '.join(args)})")
    for q in range(K):
        lines.append(
            f"  call void @__quantum__qis__mz__body({qubit_arg(q)}, {result_arg(q)})"
        )
    lines.append(f"  call void @__quantum__rt__array_record_output(i64 {K}, i8* null)")
    for r in range(K):
        lines.append(
            f"  call void @__quantum__rt__result_record_output({result_arg(r)}, i8* null)"
        )
    lines += [
        "  ret void",
        "}",
        "",
        "declare void @__quantum__qis__x__body(%Qubit*)",
        "declare void @__quantum__qis__h__body(%Qubit*)",
        "declare void @__quantum__qis__rz__body(double, %Qubit*)",
        "declare void @__quantum__qis__rzz__body(double, %Qubit*, %Qubit*)",
        "declare void @__quantum__qis__swap__body(%Qubit*, %Qubit*)",
        "declare void @__quantum__qis__mz__body(%Qubit*, %Result* writeonly) #1",
        "declare void @__quantum__rt__array_record_output(i64, i8*)",
        "declare void @__quantum__rt__result_record_output(%Result*, i8*)",
        "",
        'attributes #0 = { "entry_point" "num_required_qubits"="6" '
        '"num_required_results"="5" "qir_profiles"="custom" }',
        'attributes #1 = { "irreversible" }',
        "",
        "!llvm.module.flags = !{!0, !1}",
        "",
        '!0 = !{i32 1, !"qir_major_version", i32 1}',
        '!1 = !{i32 7, !"qir_minor_version", i32 0}',
        "",
    ]
    return "\n".join(lines)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/qpe_phi_third_k5.ll"
    gates = build_gates()
    marg = check(gates)
    top = np.argsort(marg)[::-1][:2]
    print(f"gate count: {len(gates)}")
    print(f"top outcomes: m={top[0]} (p={marg[top[0]]:.4f}), m={top[1]} (p={marg[top[1]]:.4f})")
    with open(out, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(emit(gates))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
