"""Measurement-based quantum computing with local-Clifford decorated graphs.

Patterns are sequences of N/E/M/X/Z/C commands (:mod:`lcmbqc.command`,
:mod:`lcmbqc.pattern`). Circuits transpile into patterns
(:mod:`lcmbqc.transpiler`), open graphs with flow generate them
(:mod:`lcmbqc.flow`), :mod:`lcmbqc.passes` rewrites them and
:mod:`lcmbqc.backends` simulates them.
"""

from __future__ import annotations

from .command import ONE, C, E, M, N, Plane, X, Z
from .flow import OpenGraph, find_flow, find_gflow, generate_from_graph, verify_flow
from .passes import (
    is_standard,
    parallelize_commands,
    perform_pauli_measurements,
    reduce_space,
    shift_signals,
    standardize,
)
from .pattern import Pattern, depth, max_space
from .transpiler import Circuit, simulate_circuit, standardize_and_transpile, transpile

__version__ = "0.1.0"

__all__ = [
    "ONE",
    "C",
    "Circuit",
    "E",
    "M",
    "N",
    "OpenGraph",
    "Pattern",
    "Plane",
    "X",
    "Z",
    "depth",
    "find_flow",
    "find_gflow",
    "generate_from_graph",
    "is_standard",
    "max_space",
    "parallelize_commands",
    "perform_pauli_measurements",
    "reduce_space",
    "shift_signals",
    "simulate_circuit",
    "standardize",
    "standardize_and_transpile",
    "transpile",
    "verify_flow",
]
