"""Max-cut QAOA circuits on complete graphs and their resource counts."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .passes import perform_pauli_measurements
from .pattern import Pattern
from .transpiler import Circuit, transpile


def qaoa_circuit(n: int, layers: int = 1, seed: int | None = None) -> Circuit:
    """``layers`` rounds of CNOT-RZ-CNOT per edge of K_n followed by RX on every qubit.

    Angles are drawn uniformly from [0, 1) (units of pi).
    """
    rng = np.random.default_rng(seed)
    g = nx.complete_graph(n)
    circuit = Circuit(n)
    for _ in range(layers):
        xi = rng.random(g.number_of_edges())
        theta = rng.random(n)
        for i, (u, v) in enumerate(g.edges):
            circuit.cnot(u, v)
            circuit.rz(v, xi[i])
            circuit.cnot(u, v)
        for v in g.nodes:
            circuit.rx(v, theta[v])
    return circuit


def node_count(pattern: Pattern) -> int:
    return len(pattern.nodes)


def expected_nodes(n: int, layers: int) -> tuple[int, int]:
    """Closed-form node counts before and after Pauli preprocessing."""
    edges = n * (n - 1) // 2
    return n + layers * (6 * edges + 2 * n), n + layers * (edges + n)


@dataclass(frozen=True)
class BenchRow:
    n: int
    layers: int
    nodes_before: int
    nodes_after: int

    @property
    def ratio(self) -> float:
        return self.nodes_before / self.nodes_after

    HEADER = "n\tlayers\tnodes_before\tnodes_after\tratio"

    def to_tsv(self) -> str:
        return f"{self.n}\t{self.layers}\t{self.nodes_before}\t{self.nodes_after}\t{self.ratio:.4f}"


def bench_cell(n: int, layers: int, seed: int = 0) -> BenchRow:
    # one seed per cell so results do not depend on scheduling
    pattern = transpile(qaoa_circuit(n, layers, seed=seed * 1000 + n * 10 + layers))
    reduced = perform_pauli_measurements(pattern)
    return BenchRow(n, layers, node_count(pattern), node_count(reduced))


def qaoa_bench(ns: list[int], layers: list[int], seed: int = 0, workers: int = 1) -> list[BenchRow]:
    cells = [(n, L) for n in ns for L in layers]
    if workers <= 1:
        return [bench_cell(n, L, seed) for n, L in cells]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda c: bench_cell(c[0], c[1], seed), cells))
