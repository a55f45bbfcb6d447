from __future__ import annotations

import time

import numpy as np
import pytest

from lcmbqc.bench import expected_nodes, qaoa_circuit
from lcmbqc.command import ONE, E, M, N, X, Z
from lcmbqc.passes import is_standard, shift_signals, standardize
from lcmbqc.transpiler import (
    ANCILLAE,
    Circuit,
    Gate,
    ParseError,
    TooWideError,
    UnsupportedGateError,
    parse_circuit,
    simulate_circuit,
    standardize_and_transpile,
    transpile,
)
from oracles import circuit_unitary, fidelity, plus_state, random_circuit, worst_branch_fidelity


def cnot_rx_cnot() -> Circuit:
    return Circuit(2).cnot(0, 1).rx(0, 0.25).cnot(1, 0)


def test_hadamard_pattern_commands():
    p = transpile(Circuit(1).h(0))
    assert p.inputs == [0] and p.outputs == [1]
    assert p.commands == [N(1), E((0, 1)), M(0, "XY", 0.0), X(1, {0})]


def test_rx_pattern_commands():
    p = transpile(Circuit(1).rx(0, 0.3))
    assert p.commands == [
        N(1),
        N(2),
        E((0, 1)),
        E((1, 2)),
        M(0, "XY", 0.0),
        M(1, "XY", -0.3, {0}),
        X(2, {1}),
        Z(2, {0}),
    ]


def test_pauli_gates_use_constant_signal():
    p = transpile(Circuit(1).x(0).y(0).z(0))
    assert p.commands == [X(0, {ONE}), X(0, {ONE}), Z(0, {ONE}), Z(0, {ONE})]
    assert p.outputs == [0]


def test_ancilla_accounting():
    rng = np.random.default_rng(1)
    for _ in range(30):
        c = random_circuit(rng)
        assert len(transpile(c).nodes) == c.width + sum(ANCILLAE[g.name] for g in c.gates)


@pytest.mark.parametrize("n,layers", [(2, 1), (4, 1), (3, 2)])
def test_qaoa_node_count_closed_form(n, layers):
    assert len(transpile(qaoa_circuit(n, layers, seed=0)).nodes) == expected_nodes(n, layers)[0]


def test_simulate_circuit_examples():
    zero = np.array([1, 0])
    assert np.allclose(simulate_circuit(Circuit(1).h(0), zero), np.array([1, 1]) / np.sqrt(2))
    ten = np.array([0, 0, 1, 0])
    assert np.allclose(simulate_circuit(Circuit(2).cnot(0, 1), ten), [0, 0, 0, 1])


def test_simulate_circuit_matches_kron_oracle():
    rng = np.random.default_rng(7)
    for _ in range(20):
        c = random_circuit(rng)
        psi = rng.normal(size=2**c.width) + 1j * rng.normal(size=2**c.width)
        psi /= np.linalg.norm(psi)
        assert fidelity(simulate_circuit(c, psi), circuit_unitary(c) @ psi) == pytest.approx(1.0, abs=1e-12)


def test_too_wide():
    with pytest.raises(TooWideError):
        simulate_circuit(Circuit(13))


@pytest.mark.parametrize("seed", range(8))
def test_random_three_qubit_circuit_is_deterministic(seed):
    rng = np.random.default_rng(100 + seed)
    c = Circuit(3)
    for _ in range(5):
        q = int(rng.integers(3))
        choice = rng.integers(4)
        if choice == 0:
            c.cnot(q, (q + 1) % 3)
        elif choice == 1:
            c.rx(q, float(rng.uniform(-1, 1)))
        elif choice == 2:
            c.rz(q, float(rng.uniform(-1, 1)))
        else:
            c.h(q)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    worst, seen = worst_branch_fidelity(transpile(c), circuit_unitary(c) @ psi, input_state=psi, rng=rng)
    assert seen > 0
    assert worst == pytest.approx(1.0, abs=1e-9)


def test_direct_standard_matches_pipeline_on_small_circuit():
    c = cnot_rx_cnot()
    direct = standardize_and_transpile(c)
    assert direct == shift_signals(standardize(transpile(c)))
    assert is_standard(direct)
    assert all(not m.t_domain for m in direct.measurements)


def test_direct_standard_hadamard_is_plain_transpile():
    c = Circuit(1).h(0)
    assert standardize_and_transpile(c) == standardize(transpile(c)) == transpile(c)


def test_direct_standard_matches_pipeline_on_random_circuits():
    rng = np.random.default_rng(3)
    for _ in range(50):
        c = random_circuit(rng, max_qubits=5, max_gates=20)
        assert standardize_and_transpile(c) == shift_signals(standardize(transpile(c)))


def test_direct_standard_scaling_is_polynomial():
    timings = {}
    for k in (8, 16, 32, 64):
        c = Circuit(2)
        for i in range(k):
            c.cnot(i % 2, 1 - i % 2)
        start = time.perf_counter()
        for _ in range(5):
            standardize_and_transpile(c)
        timings[k] = max((time.perf_counter() - start) / 5, 1e-6)
    slope = np.polyfit(np.log(list(timings)), np.log(list(timings.values())), 1)[0]
    assert slope < 3.0


def test_gate_validation():
    with pytest.raises(UnsupportedGateError):
        Gate("T", (0,))
    with pytest.raises(ValueError):
        Gate("CNOT", (1, 1))
    with pytest.raises(ValueError):
        Gate("RX", (0,))
    with pytest.raises(ValueError):
        Circuit(2).h(2)
    with pytest.raises(ValueError):
        Circuit(0)


def test_parse_circuit_roundtrip():
    text = "qubits 2\n# cnot, rotation, cnot\nCNOT 0 1\nRX 0 0.25  # quarter turn\ncnot 1 0\n"
    c = parse_circuit(text)
    assert c == cnot_rx_cnot()
    assert parse_circuit(c.to_text()) == c


def test_parse_circuit_radians_and_width_inference():
    c = parse_circuit(f"RZ 2 {np.pi / 2}", radians=True)
    assert c.width == 3
    assert c.gates[0].angle == pytest.approx(0.5)


@pytest.mark.parametrize(
    "text,line",
    [("H 0\nFOO 1\n", 2), ("qubits 1\nCNOT 0\n", 2), ("RX 0 abc", 1), ("H -1", 1), ("qubits 2\nH 5", 2), ("H 0\nqubits 2", 2), ("CNOT 1 1", 1)],
)
def test_parse_circuit_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_circuit(text)
    assert info.value.line == line


def test_empty_circuit():
    p = transpile(parse_circuit("qubits 2\n"))
    assert p.commands == [] and p.inputs == p.outputs == [0, 1]
    assert fidelity(simulate_circuit(Circuit(2)), plus_state(2)) == pytest.approx(1.0)
