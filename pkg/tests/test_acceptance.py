"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line (shown in the terminal summary and
on stdout with ``-s``) and then asserts the same verdict, including the
runtime limit.
"""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from lcmbqc import clifford as cl
from lcmbqc.backends import ExecutionConfig, ImpossibleOutcomeError, run
from lcmbqc.bench import expected_nodes, qaoa_bench, qaoa_circuit
from lcmbqc.command import Axis, Plane
from lcmbqc.flow import OpenGraph, find_flow, generate_from_graph
from lcmbqc.passes import parallelize_commands, perform_pauli_measurements, reduce_space, shift_signals, standardize
from lcmbqc.pattern import depth
from lcmbqc.transpiler import transpile
from oracles import (
    PAULI,
    H,
    I2,
    S,
    PZ,
    brute_force_flow_exists,
    chain_pattern,
    chain_unitary,
    circuit_unitary,
    cnot_full,
    connected_atlas,
    fidelity,
    graphsim_trial,
    io_choices,
    is_deterministic,
    plus_state,
    random_circuit,
    random_pattern,
    random_state,
    worst_branch_fidelity,
)


def test_criterion_1_qaoa_node_reduction(criterion):
    criterion.start(1, "QAOA n=4 L=1 nodes 48->14, depth 3->2")
    raw = transpile(qaoa_circuit(4, 1, seed=0))
    std = shift_signals(standardize(raw))
    pre = perform_pauli_measurements(raw)
    nodes = (len(raw.nodes), len(pre.nodes))
    depths = (depth(parallelize_commands(std)), depth(parallelize_commands(pre)))
    ok = nodes == (48, 14) and depths == (3, 2) and criterion.elapsed < 1.0
    assert criterion.done(ok, f"nodes {nodes[0]}->{nodes[1]}, depth {depths[0]}->{depths[1]}")


def test_criterion_2_command_reduction(criterion):
    criterion.start(2, "QAOA n=4 L=1 commands within 15% of 156->50, ratio >= 3")
    raw = transpile(qaoa_circuit(4, 1, seed=0))
    before = shift_signals(standardize(raw))
    after = perform_pauli_measurements(raw)
    nb, na = len(before), len(after)
    ratio = nb / na
    tally = lambda p: " ".join(f"{k}{v}" for k, v in p.count().items())  # noqa: E731
    ok = abs(nb - 156) <= 0.15 * 156 and abs(na - 50) <= 0.15 * 50 and ratio >= 3.0 and criterion.elapsed < 1.0
    assert criterion.done(ok, f"{nb} [{tally(before)}] -> {na} [{tally(after)}], ratio {ratio:.2f}")


def test_criterion_3_qaoa_trend(criterion):
    criterion.start(3, "3-layer QAOA n=2..8 ratio increasing, < 6, >= 4.5 at n=8")
    rows = qaoa_bench(range(2, 9), [3], seed=0)
    ratios = [r.ratio for r in rows]
    closed = all((r.nodes_before, r.nodes_after) == expected_nodes(r.n, r.layers) for r in rows)
    ok = (
        all(a < b for a, b in zip(ratios, ratios[1:]))
        and max(ratios) < 6
        and ratios[-1] >= 4.5
        and closed
        and criterion.elapsed < 10
    )
    assert criterion.done(ok, "ratios " + " ".join(f"{x:.3f}" for x in ratios) + f", closed form {'ok' if closed else 'off'}")


def test_criterion_4_determinism_suite(criterion):
    criterion.start(4, "100 random circuits, six pass variants match the gate oracle on every branch")
    rng = np.random.default_rng(2024)
    variants = {
        "raw": lambda p: p,
        "standardized": standardize,
        "shifted": lambda p: shift_signals(standardize(p)),
        "pauli": perform_pauli_measurements,
        "space": lambda p: reduce_space(shift_signals(standardize(p))),
        "parallel": lambda p: parallelize_commands(shift_signals(standardize(p))),
    }
    worst, branches, failures = 1.0, 0, []
    for k in range(100):
        c = random_circuit(rng)
        reference = circuit_unitary(c) @ plus_state(c.width)
        raw = transpile(c)
        for name, make in variants.items():
            f, seen = worst_branch_fidelity(make(raw), reference, rng=rng)
            branches += seen
            worst = min(worst, f)
            if seen == 0 or abs(1 - f) > 1e-9:
                failures.append((k, name))
    ok = not failures and criterion.elapsed < 300
    assert criterion.done(ok, f"{branches} branches, worst fidelity {worst:.12f}, failures {failures[:5]}")


def test_criterion_5_clifford_tables(criterion):
    criterion.start(5, "21 decoration-table entries and 7x3x16 projector identities")
    printed = {
        0: ("Z", "-Y", "X"),
        1: ("-Y", "X", "Z"),
        2: ("-X", "-Y", "Z"),
        3: ("Z", "-X", "-Y"),
        4: ("Z", "Y", "-X"),
        5: ("Y", "-X", "Z"),
        6: ("Z", "X", "Y"),
    }
    words = {0: [H], 1: [S], 2: [PZ], 3: [H, S], 4: [H, PZ], 5: [S, PZ], 6: [H, S, PZ]}
    entries = 0
    for k, images in printed.items():
        m = np.linalg.multi_dot(words[k] + [I2])
        for p, image in zip("XYZ", images):
            target = (-1 if image.startswith("-") else 1) * PAULI[image[-1]]
            got = cl.conjugate_pauli(k, Axis(p))
            lib = got.sign * PAULI[got.axis.value]
            phase_free = abs(abs(np.vdot(m.conj().T @ PAULI[p] @ m, target)) - 2) < 1e-9
            entries += bool(np.allclose(lib, target) and phase_free)
    worst = 0.0
    for k, plane, a in itertools.product(range(7), Plane, [i / 8 for i in range(16)]):
        m = cl.clifford_matrix(k)
        new_plane, new_angle = cl.rotate_measurement(k, plane, a)
        for s in (0, 1):
            diff = m.conj().T @ cl.projector(plane, a, s) @ m - cl.projector(new_plane, new_angle, s)
            worst = max(worst, float(np.max(np.abs(diff))))
    ok = entries == 21 and worst < 1e-12 and criterion.elapsed < 1.0
    assert criterion.done(ok, f"{entries}/21 entries, worst projector deviation {worst:.1e}")


def test_criterion_6_graphsim_oracle(criterion):
    criterion.start(6, "500 graph-state Pauli measurement trials against dense projectors")
    rng = np.random.default_rng(6)
    trials = [graphsim_trial(rng) for _ in range(500)]
    worst = min(t["fidelity"] for t in trials)
    flags = sum(t["flags"] for t in trials)
    reduced = sum(t["reduced"] for t in trials)
    ok = abs(1 - worst) < 1e-9 and flags == 500 and reduced == 500 and criterion.elapsed < 120
    assert criterion.done(ok, f"worst fidelity {worst:.12f}, flags {flags}/500, reduced {reduced}/500")


def test_criterion_7_flow_suite(criterion):
    criterion.start(7, "flow vs brute force on connected graphs <= 6 nodes, generated patterns deterministic")
    rng = np.random.default_rng(7)
    instances = disagreements = generated = nondeterministic = 0
    for g in connected_atlas(6):
        for ins, outs in io_choices(g, 2):
            og = OpenGraph(g, ins, outs)
            fr = find_flow(og)
            instances += 1
            disagreements += (fr is not None) != brute_force_flow_exists(g, ins, outs)
            if fr is None:
                continue
            angles = {v: float(rng.uniform(0, 2)) for v in og.measured}
            det, _ = is_deterministic(generate_from_graph(og, angles), random_state(rng, len(ins)))
            generated += 1
            nondeterministic += not det
    og = OpenGraph(nx.Graph([(0, 2), (1, 2), (1, 3), (2, 4)]), [0, 1], [4, 3])
    p = generate_from_graph(og, {0: 0.0, 1: 0.0, 2: 0.0})
    unitary = np.kron(I2, H) @ cnot_full(1, 0, 2)
    cnot_h = 1.0
    for _ in range(5):
        psi = random_state(rng, 2)
        det, out = is_deterministic(p, psi)
        cnot_h = min(cnot_h, fidelity(out, unitary @ psi) if det else 0.0)
    ok = disagreements == 0 and nondeterministic == 0 and abs(1 - cnot_h) < 1e-9 and criterion.elapsed < 120
    assert criterion.done(
        ok,
        f"{instances} open graphs, {disagreements} disagreements, {generated} patterns, "
        f"{nondeterministic} nondeterministic, CNOT-then-H fidelity {cnot_h:.12f}",
    )


def test_criterion_8_backends(criterion):
    criterion.start(8, "statevector vs tensor on 200 patterns, 1000-node chain on tensor < 60 s")
    rng = np.random.default_rng(8)
    worst, compared, mismatched = 1.0, 0, 0
    for _ in range(200):
        p = random_pattern(rng)
        forced = {m.node: int(rng.integers(2)) for m in p.measurements}
        psi = random_state(rng, len(p.inputs))
        outs = []
        for backend in ("statevector", "tensor"):
            try:
                outs.append(run(p, ExecutionConfig(backend=backend, forced_outcomes=forced, input_state=psi)))
            except ImpossibleOutcomeError:
                outs.append(None)
        if (outs[0] is None) != (outs[1] is None):
            mismatched += 1
        elif outs[0] is not None:
            compared += 1
            worst = min(worst, fidelity(outs[0].amplitudes, outs[1].amplitudes))
    small_ok = mismatched == 0 and abs(1 - worst) < 1e-9
    angles = rng.uniform(0, 2, 999)
    chain = chain_pattern(angles)
    psi = np.array([0.6, 0.8j])
    mark = criterion.elapsed
    out = run(chain, ExecutionConfig(backend="tensor", seed=8, input_state=psi))
    chain_time = criterion.elapsed - mark
    chain_fid = fidelity(out.amplitudes, chain_unitary(angles) @ psi)
    ok = small_ok and len(chain.nodes) == 1000 and abs(1 - chain_fid) < 1e-6 and chain_time < 60
    assert criterion.done(
        ok,
        f"{compared} compared (+{200 - compared - mismatched} impossible in both), worst {worst:.12f}; "
        f"chain fidelity {chain_fid:.9f} in {chain_time:.1f}s",
    )
