"""Causal flow and gflow on open graphs, and patterns generated from them.

Layer convention: outputs sit in layer 0 and layers grow towards the inputs.
``i`` precedes ``j`` (is measured earlier) iff ``layers[i] > layers[j]``.
Both finders return ``None`` when no (g)flow exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx

from .command import Command, E, M, N, Plane, X, Z
from .pattern import Pattern
from .transpiler import ParseError


class SizeMismatchError(ValueError):
    pass


class NoFlowExistsError(ValueError):
    pass


class UnsupportedPlaneError(ValueError):
    pass


@dataclass
class OpenGraph:
    """Graph with ordered input/output lists and measurement planes.

    ``planes`` defaults to XY for every non-output node.
    """

    graph: nx.Graph
    inputs: list[int]
    outputs: list[int]
    planes: dict[int, Plane] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.inputs = list(self.inputs)
        self.outputs = list(self.outputs)
        nodes = set(self.graph.nodes)
        if not set(self.inputs) <= nodes or not set(self.outputs) <= nodes:
            raise ValueError("inputs and outputs must be graph nodes")
        if len(set(self.inputs)) != len(self.inputs) or len(set(self.outputs)) != len(self.outputs):
            raise ValueError("repeated input or output node")
        if nx.number_of_selfloops(self.graph):
            raise ValueError("graph has a self-loop")
        out = set(self.outputs)
        planes = {v: Plane(p) if isinstance(p, str) else p for v, p in self.planes.items()}
        self.planes = {v: planes.get(v, Plane.XY) for v in sorted(nodes - out)}

    @property
    def measured(self) -> list[int]:
        return list(self.planes)

    def neighbors(self, v: int) -> set[int]:
        return set(self.graph.adj[v])

    def odd(self, nodes: Iterable[int]) -> set[int]:
        """Odd neighbourhood: nodes adjacent to an odd number of ``nodes``."""
        out: set[int] = set()
        for v in nodes:
            out ^= set(self.graph.adj[v])
        return out


@dataclass
class FlowResult:
    """``f`` maps measured nodes to one node (flow) or a frozenset (gflow)."""

    f: dict[int, int] | dict[int, frozenset[int]]
    layers: dict[int, int]

    @property
    def is_gflow(self) -> bool:
        return any(isinstance(v, frozenset) for v in self.f.values())

    def correction_sets(self) -> dict[int, frozenset[int]]:
        return {i: v if isinstance(v, frozenset) else frozenset([v]) for i, v in self.f.items()}


def find_flow(og: OpenGraph) -> FlowResult | None:
    """Causal flow by backward search from the outputs.

    Each round, a processed non-input node with exactly one unprocessed
    neighbour becomes that neighbour's flow target. The layering is the
    maximally delayed one.
    """
    if len(og.inputs) != len(og.outputs):
        raise SizeMismatchError(f"{len(og.inputs)} inputs vs {len(og.outputs)} outputs")
    nodes = set(og.graph.nodes)
    inputs = set(og.inputs)
    processed = set(og.outputs)
    layers = {v: 0 for v in og.outputs}
    f: dict[int, int] = {}
    candidates = processed - inputs
    k = 1
    while processed != nodes:
        found: dict[int, int] = {}
        for v in sorted(candidates):
            rest = og.neighbors(v) - processed
            if len(rest) == 1:
                (u,) = rest
                found.setdefault(u, v)
        if not found:
            return None
        for u, v in found.items():
            f[u] = v
            layers[u] = k
            candidates.discard(v)
        processed |= set(found)
        candidates |= set(found) - inputs
        k += 1
    return FlowResult(dict(sorted(f.items())), layers)


def _solve_gf2(rows: list[int], rhs: list[int], ncols: int) -> int | None:
    """Solve ``A x = b`` over GF(2); rows are column bitmasks. Returns ``x`` or ``None``."""
    aug = [(r, b) for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int, int]] = []  # (column, row bits, rhs)
    for r, b in aug:
        for col, pr, pb in pivots:
            if r >> col & 1:
                r ^= pr
                b ^= pb
        if r == 0:
            if b:
                return None
            continue
        col = r.bit_length() - 1
        # keep earlier pivots reduced in the new column
        pivots = [(c, pr ^ r, pb ^ b) if pr >> col & 1 else (c, pr, pb) for c, pr, pb in pivots]
        pivots.append((col, r, b))
    x = 0
    for col, _, pb in pivots:
        if pb:
            x |= 1 << col
    return x


def find_gflow(og: OpenGraph) -> FlowResult | None:
    """Generalised flow by backward GF(2) search, honouring each node's plane.

    Each round solves, for every unsolved node ``u``, for a correction set
    made of already-solved non-input nodes (plus ``u`` itself for XZ/YZ)
    whose odd neighbourhood meets the unsolved nodes only as the plane
    requires.
    """
    nodes = set(og.graph.nodes)
    inputs = set(og.inputs)
    solved = set(og.outputs)
    layers = {v: 0 for v in og.outputs}
    g: dict[int, frozenset[int]] = {}
    k = 1
    while solved != nodes:
        unsolved = sorted(nodes - solved)
        cols = sorted(solved - inputs)
        col_bit = {c: i for i, c in enumerate(cols)}
        rows = []
        for w in unsolved:
            bits = 0
            for c in og.neighbors(w):
                if c in col_bit:
                    bits |= 1 << col_bit[c]
            rows.append(bits)
        found: dict[int, frozenset[int]] = {}
        for u in unsolved:
            plane = og.planes[u]
            if plane is Plane.XY:
                target = {u}
                base: set[int] = set()
            else:
                if u in inputs:
                    continue
                base = {u}
                target = ({u} if plane is Plane.XZ else set()) ^ og.neighbors(u)
            rhs = [1 if w in target else 0 for w in unsolved]
            x = _solve_gf2(rows, rhs, len(cols))
            if x is None:
                continue
            found[u] = frozenset(base | {c for c in cols if x >> col_bit[c] & 1})
        if not found:
            return None
        for u, corr in found.items():
            g[u] = corr
            layers[u] = k
        solved |= set(found)
        k += 1
    return FlowResult(dict(sorted(g.items())), layers)


def verify_flow(og: OpenGraph, fr: FlowResult) -> bool:
    """Check the (g)flow conditions of ``fr`` against ``og``.

    A result with integer targets is checked as a causal flow, one with set
    targets as a gflow.
    """
    nodes = set(og.graph.nodes)
    inputs = set(og.inputs)
    lay = fr.layers
    if set(fr.f) != set(og.measured) or not nodes <= set(lay):
        return False

    def before(i: int, j: int) -> bool:
        return lay[i] > lay[j]

    if not fr.is_gflow:
        for i, v in fr.f.items():
            if v not in og.neighbors(i) or v in inputs or not before(i, v):
                return False
            if any(j != i and not before(i, j) for j in og.neighbors(v)):
                return False
        return True
    for i, corr in fr.f.items():
        if not corr <= nodes - inputs:
            return False
        odd = og.odd(corr)
        if any(j != i and not before(i, j) for j in corr | odd):
            return False
        in_g, in_odd = i in corr, i in odd
        plane = og.planes[i]
        ok = {Plane.XY: not in_g and in_odd, Plane.XZ: in_g and in_odd, Plane.YZ: in_g and not in_odd}[plane]
        if not ok:
            return False
    return True


def measurement_order(fr: FlowResult) -> list[int]:
    """Measured nodes by decreasing layer, ties by ascending id."""
    return sorted(fr.f, key=lambda v: (-fr.layers[v], v))


def generate_from_graph(og: OpenGraph, angles: Mapping[int, float]) -> Pattern:
    """Deterministic pattern for ``og`` with XY measurements at ``angles``.

    Uses a causal flow when one exists and a gflow otherwise. Outcome ``s_i``
    triggers X on the correction set of ``i`` and Z on its odd neighbourhood
    (without ``i``); those landing on measured nodes become s/t domains.
    """
    if any(p is not Plane.XY for p in og.planes.values()):
        raise UnsupportedPlaneError("pattern generation supports XY measurements only")
    missing = [v for v in og.measured if v not in angles]
    if missing:
        raise ValueError(f"no angle for measured nodes {missing}")
    fr = find_flow(og) if len(og.inputs) == len(og.outputs) else None
    if fr is None:
        fr = find_gflow(og)
    if fr is None:
        raise NoFlowExistsError("the open graph has neither flow nor gflow")
    corr = fr.correction_sets()
    x_dom: dict[int, set[int]] = {}
    z_dom: dict[int, set[int]] = {}
    for i, k in corr.items():
        for j in k:
            x_dom.setdefault(j, set()).add(i)
        for j in og.odd(k) - {i}:
            z_dom.setdefault(j, set()).add(i)
    inputs = set(og.inputs)
    cmds: list[Command] = [N(v) for v in sorted(og.graph.nodes) if v not in inputs]
    cmds += [E(tuple(sorted(e))) for e in sorted(tuple(sorted(e)) for e in og.graph.edges)]
    for v in measurement_order(fr):
        cmds.append(M(v, Plane.XY, float(angles[v]), x_dom.get(v, ()), z_dom.get(v, ())))
    for v in og.outputs:
        if x_dom.get(v):
            cmds.append(X(v, x_dom[v]))
        if z_dom.get(v):
            cmds.append(Z(v, z_dom[v]))
    return Pattern(og.inputs, cmds, og.outputs)


def parse_open_graph(text: str) -> tuple[OpenGraph, dict[int, float]]:
    """Parse ``edge a b``, ``inputs ...``, ``outputs ...``, ``angle v a`` and
    ``plane v XY|XZ|YZ`` lines (angles in units of pi, ``#`` comments)."""
    g = nx.Graph()
    inputs: list[int] = []
    outputs: list[int] = []
    angles: dict[int, float] = {}
    planes: dict[int, Plane] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        key, args = parts[0].lower(), parts[1:]
        try:
            if key == "edge":
                if len(args) != 2:
                    raise ValueError("edge takes two nodes")
                a, b = int(args[0]), int(args[1])
                if a == b:
                    raise ValueError("self edge")
                g.add_edge(a, b)
            elif key == "node":
                g.add_nodes_from(int(a) for a in args)
            elif key in ("inputs", "outputs"):
                (inputs if key == "inputs" else outputs).extend(int(a) for a in args)
            elif key == "angle":
                if len(args) != 2:
                    raise ValueError("angle takes a node and a value")
                angles[int(args[0])] = float(args[1])
            elif key == "plane":
                if len(args) != 2:
                    raise ValueError("plane takes a node and a plane")
                planes[int(args[0])] = Plane(args[1].upper())
            else:
                raise ValueError(f"unknown keyword {parts[0]!r}")
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    g.add_nodes_from(inputs + outputs)
    g.add_nodes_from(angles)
    try:
        og = OpenGraph(g, inputs, outputs, planes)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return og, angles
