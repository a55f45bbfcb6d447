from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from lcmbqc.command import Plane
from lcmbqc.flow import (
    FlowResult,
    NoFlowExistsError,
    OpenGraph,
    SizeMismatchError,
    UnsupportedPlaneError,
    find_flow,
    find_gflow,
    generate_from_graph,
    measurement_order,
    parse_open_graph,
    verify_flow,
)
from lcmbqc.transpiler import ParseError
from oracles import (
    H,
    I2,
    brute_force_flow_exists,
    cnot_full,
    connected_atlas,
    fidelity,
    io_choices,
    is_deterministic,
    random_state,
)

CNOT_H_EDGES = [(0, 2), (1, 2), (1, 3), (2, 4)]
GFLOW_ONLY_EDGES = [(0, 1), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4)]


def open_graph(edges, inputs, outputs, nodes=()) -> OpenGraph:
    g = nx.Graph(edges)
    g.add_nodes_from(nodes)
    return OpenGraph(g, inputs, outputs)


# -- find_flow ---------------------------------------------------------------


def test_cnot_h_graph_flow():
    og = open_graph(CNOT_H_EDGES, [0, 1], [4, 3])
    fr = find_flow(og)
    assert fr.f == {0: 2, 1: 3, 2: 4}
    assert fr.layers == {4: 0, 3: 0, 1: 1, 2: 1, 0: 2}
    assert verify_flow(og, fr)
    assert measurement_order(fr) == [0, 1, 2]


def test_chain_flow():
    og = open_graph([(0, 1), (1, 2)], [0], [2])
    fr = find_flow(og)
    assert fr.f == {0: 1, 1: 2}
    assert fr.layers[0] > fr.layers[1] > fr.layers[2]


def test_size_mismatch():
    with pytest.raises(SizeMismatchError):
        find_flow(open_graph([(0, 1), (1, 2)], [0], [1, 2]))


def test_no_flow_returns_none():
    og = open_graph([(0, 1), (1, 2), (0, 2)], [], [])
    assert find_flow(og) is None
    assert find_gflow(og) is None


def test_all_outputs_is_trivial():
    og = open_graph([(0, 1)], [0, 1], [0, 1])
    assert find_flow(og).f == {}
    assert find_gflow(og).f == {}


def test_flow_agrees_with_brute_force_on_small_graphs():
    checked = 0
    for g in connected_atlas(5):
        for ins, outs in io_choices(g, 2):
            og = OpenGraph(g, ins, outs)
            fr = find_flow(og)
            assert (fr is not None) == brute_force_flow_exists(g, ins, outs), (list(g.edges), ins, outs)
            if fr is not None:
                assert verify_flow(og, fr)
                assert verify_flow(og, find_gflow(og))
            checked += 1
    assert checked > 1000


# -- find_gflow ---------------------------------------------------------------


def test_gflow_without_flow():
    og = open_graph(GFLOW_ONLY_EDGES, [0, 2], [1, 3])
    assert find_flow(og) is None
    assert not brute_force_flow_exists(og.graph, [0, 2], [1, 3])
    fr = find_gflow(og)
    assert fr is not None and fr.is_gflow
    assert verify_flow(og, fr)


@pytest.mark.parametrize("plane", [Plane.XZ, Plane.YZ])
def test_gflow_other_planes(plane):
    og = OpenGraph(nx.Graph([(1, 2)]), [], [2], {1: plane})
    fr = find_gflow(og)
    assert fr is not None and verify_flow(og, fr)
    assert 1 in fr.f[1]


def test_gflow_uneven_io():
    og = open_graph([(0, 1), (1, 2), (1, 3)], [0], [2, 3])
    with pytest.raises(SizeMismatchError):
        find_flow(og)
    fr = find_gflow(og)
    assert fr is not None and verify_flow(og, fr)


# -- verify_flow negatives ---------------------------------------------------------


def test_verify_rejects_broken_flows():
    og = open_graph([(0, 1), (1, 2)], [0], [2])
    layers = {0: 2, 1: 1, 2: 0}
    assert verify_flow(og, FlowResult({0: 1, 1: 2}, layers))
    assert not verify_flow(og, FlowResult({0: 2, 1: 2}, layers))  # not a neighbour
    assert not verify_flow(og, FlowResult({0: 1, 1: 2}, {0: 1, 1: 1, 2: 0}))  # order
    assert not verify_flow(og, FlowResult({0: 1}, layers))  # incomplete
    assert not verify_flow(og, FlowResult({0: frozenset({0, 1}), 1: frozenset({2})}, layers))  # input in g


# -- generate_from_graph -------------------------------------------------------------


def test_cnot_h_graph_pattern_is_cnot_then_h():
    og = open_graph(CNOT_H_EDGES, [0, 1], [4, 3])
    p = generate_from_graph(og, {0: 0.0, 1: 0.0, 2: 0.0})
    assert [m.node for m in p.measurements] == [0, 1, 2]
    unitary = np.kron(I2, H) @ cnot_full(1, 0, 2)
    rng = np.random.default_rng(3)
    for _ in range(5):
        psi = random_state(rng, 2)
        ok, out = is_deterministic(p, psi)
        assert ok
        assert fidelity(out, unitary @ psi) == pytest.approx(1.0, abs=1e-9)


def test_three_node_chain_is_identity():
    p = generate_from_graph(open_graph([(0, 1), (1, 2)], [0], [2]), {0: 0.0, 1: 0.0})
    psi = random_state(np.random.default_rng(0), 1)
    ok, out = is_deterministic(p, psi)
    assert ok and fidelity(out, psi) == pytest.approx(1.0, abs=1e-9)


def test_generated_patterns_are_deterministic():
    rng = np.random.default_rng(11)
    done = 0
    for g in connected_atlas(5):
        for ins, outs in io_choices(g, 2):
            og = OpenGraph(g, ins, outs)
            if not og.measured or find_flow(og) is None or rng.random() < 0.8:
                continue
            angles = {v: float(rng.uniform(0, 2)) for v in og.measured}
            ok, _ = is_deterministic(generate_from_graph(og, angles), random_state(rng, len(ins)))
            assert ok
            done += 1
    assert done >= 30


def test_gflow_pattern_is_deterministic():
    og = open_graph(GFLOW_ONLY_EDGES, [0, 2], [1, 3])
    rng = np.random.default_rng(5)
    for _ in range(3):
        angles = {v: float(rng.uniform(0, 2)) for v in og.measured}
        ok, _ = is_deterministic(generate_from_graph(og, angles), random_state(rng, 2))
        assert ok


def test_generate_errors():
    og = open_graph([(0, 1), (1, 2), (0, 2)], [], [])
    with pytest.raises(NoFlowExistsError):
        generate_from_graph(og, {0: 0, 1: 0, 2: 0})
    chain = open_graph([(0, 1), (1, 2)], [0], [2])
    with pytest.raises(ValueError):
        generate_from_graph(chain, {0: 0.0})
    with pytest.raises(UnsupportedPlaneError):
        generate_from_graph(OpenGraph(nx.path_graph(3), [0], [2], {1: "YZ"}), {0: 0, 1: 0})


# -- parsing ---------------------------------------------------------------------------


def test_parse_open_graph():
    text = "# cnot_h three\nedge 0 2\nedge 1 2\nedge 1 3\nedge 2 4\ninputs 0 1\noutputs 4 3\nangle 0 0\nangle 1 0.5\nangle 2 0\nplane 1 xy\n"
    og, angles = parse_open_graph(text)
    assert og.inputs == [0, 1] and og.outputs == [4, 3]
    assert sorted(tuple(sorted(e)) for e in og.graph.edges) == CNOT_H_EDGES
    assert angles == {0: 0.0, 1: 0.5, 2: 0.0}


@pytest.mark.parametrize(
    "text,line",
    [("edge 0\n", 1), ("edge 0 1\nedge 1 1\n", 2), ("edge 0 1\nfoo 2\n", 2), ("angle 0 x", 1), ("plane 0 AB", 1)],
)
def test_parse_open_graph_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_open_graph(text)
    assert info.value.line == line


def test_parse_open_graph_rejects_repeats():
    with pytest.raises(ParseError):
        parse_open_graph("edge 0 1\ninputs 0 0\n")
