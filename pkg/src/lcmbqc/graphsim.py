"""Graph-state simulator with local-Clifford decorations.

The represented state is ``prod_v C_v . prod_{(u,w)} CZ_uw . |+>^n`` where
``C_v`` is an element of the 24-element Clifford group (extended index, see
:mod:`lcmbqc.clifford`). Every graph update below multiplies decorations on the
right, i.e. it acts on the bare graph state underneath the decorations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import clifford as cl
from .command import C, Axis, E, N

# Local complementation at v: C_v <- C_v . LC_VERTEX, C_w <- C_w . LC_NEIGHBOR
LC_VERTEX = cl.index_of(cl._word_matrix("HSZH"))
LC_NEIGHBOR = cl.index_of(cl._word_matrix("S"))
_X = cl.index_of(cl.PAULI_MATRICES[Axis.X])
_Z = cl.index_of(cl.PAULI_MATRICES[Axis.Z])

MAX_DENSE_NODES = 12


class GraphSimError(Exception):
    pass


class UnknownNodeError(GraphSimError, KeyError):
    pass


class DuplicateNodeError(GraphSimError):
    pass


class SelfEdgeError(GraphSimError):
    pass


class AlreadyMeasuredError(GraphSimError):
    pass


class IrreducibleDecorationError(GraphSimError):
    pass


class NotReducedError(GraphSimError):
    pass


class TooLargeError(GraphSimError):
    pass


@dataclass(frozen=True)
class MeasurementOutcome:
    """``s`` is 0 for the +1 eigenvalue; ``deterministic`` marks forced outcomes."""

    s: int
    deterministic: bool


class DecoratedGraphState:
    """Mutable decorated graph state.

    Parameters
    ----------
    nodes : iterable of int, optional
        Initial nodes, each in |+>.
    edges : iterable of (int, int), optional
        Initial CZ edges.
    """

    def __init__(self, nodes: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()) -> None:
        self.adj: dict[int, set[int]] = {}
        self.vop: dict[int, int] = {}
        self.measured: dict[int, MeasurementOutcome] = {}
        for v in nodes:
            self.add_node(v)
        for a, b in edges:
            self.add_edge(a, b)

    @classmethod
    def from_commands(cls, n_cmds: Iterable[N], e_cmds: Iterable[E]) -> DecoratedGraphState:
        state = cls()
        for cmd in n_cmds:
            state.add_node(cmd.node)
        for cmd in e_cmds:
            state.add_edge(*cmd.pair)
        return state

    def copy(self) -> DecoratedGraphState:
        new = DecoratedGraphState()
        new.adj = {v: set(nb) for v, nb in self.adj.items()}
        new.vop = dict(self.vop)
        new.measured = dict(self.measured)
        return new

    # -- structure -----------------------------------------------------------

    @property
    def nodes(self) -> list[int]:
        return sorted(self.adj)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a, nb in self.adj.items() for b in nb if a < b)

    def neighbors(self, v: int) -> set[int]:
        self._check(v)
        return set(self.adj[v])

    def add_node(self, v: int) -> None:
        if v in self.adj or v in self.measured:
            raise DuplicateNodeError(f"node {v} already exists")
        self.adj[v] = set()
        self.vop[v] = cl.IDENTITY

    def add_edge(self, a: int, b: int) -> None:
        """Apply CZ on the bare graph (valid only while both decorations are diagonal)."""
        if a == b:
            raise SelfEdgeError(f"self edge on node {a}")
        self._check(a)
        self._check(b)
        self._toggle(a, b)

    def _toggle(self, a: int, b: int) -> None:
        if b in self.adj[a]:
            self.adj[a].discard(b)
            self.adj[b].discard(a)
        else:
            self.adj[a].add(b)
            self.adj[b].add(a)

    def _check(self, v: int) -> None:
        if v not in self.adj:
            if v in self.measured:
                raise AlreadyMeasuredError(f"node {v} was measured")
            raise UnknownNodeError(v)

    # -- local Clifford operations -------------------------------------------

    def apply_local_clifford(self, v: int, g: int) -> None:
        """Apply extended Clifford ``g`` to node ``v`` (after its decoration)."""
        self._check(v)
        self.vop[v] = cl.MUL[g][self.vop[v]]

    def local_complement(self, v: int) -> None:
        """Complement the neighbourhood of ``v`` keeping the state unchanged."""
        self._check(v)
        nb = sorted(self.adj[v])
        for a, b in itertools.combinations(nb, 2):
            self._toggle(a, b)
        self.vop[v] = cl.MUL[self.vop[v]][LC_VERTEX]
        for w in nb:
            self.vop[w] = cl.MUL[self.vop[w]][LC_NEIGHBOR]

    def _insert_stabilizer(self, v: int) -> None:
        # X_v prod_{w in N(v)} Z_w stabilises the bare graph state
        self.vop[v] = cl.MUL[self.vop[v]][_X]
        for w in self.adj[v]:
            self.vop[w] = cl.MUL[self.vop[w]][_Z]

    # -- measurement ---------------------------------------------------------

    def measure_pauli(self, v: int, axis: Axis, prefer: int = 0) -> MeasurementOutcome:
        """Measure ``axis`` on node ``v`` and delete it.

        ``prefer`` is reported whenever the outcome is not fixed by the state.
        """
        self._check(v)
        if prefer not in (0, 1):
            raise ValueError("prefer must be 0 or 1")
        while True:
            eff = cl.CONJ[self.vop[v]][axis]
            flip = 0 if eff.sign > 0 else 1
            if eff.axis is Axis.Z:
                break
            if eff.axis is Axis.X:
                if not self.adj[v]:
                    outcome = MeasurementOutcome(flip, True)
                    self._remove(v, outcome)
                    return outcome
                self.local_complement(min(self.adj[v]))
            else:
                self.local_complement(v)
        bare = prefer ^ flip
        if bare:
            for w in self.adj[v]:
                self.vop[w] = cl.MUL[self.vop[w]][_Z]
        outcome = MeasurementOutcome(prefer, False)
        self._remove(v, outcome)
        return outcome

    def _remove(self, v: int, outcome: MeasurementOutcome) -> None:
        for w in self.adj.pop(v):
            self.adj[w].discard(v)
        del self.vop[v]
        self.measured[v] = outcome

    # -- canonical form ------------------------------------------------------

    def is_reduced(self) -> bool:
        return all(g in cl.DECORATIONS for g in self.vop.values())

    def reduce_decorations(self) -> None:
        """Bring every decoration into the H^a S^b Z^c set.

        A decoration belongs to that set iff it maps Z to +Z or +X. Local
        complementation at ``v`` fixes a +-Y image on ``v`` and only multiplies
        neighbours by diagonal elements, which keeps their Z image; a
        stabiliser insertion fixes the sign.
        """
        for v in sorted(self.adj):
            img = cl.IMAGE[self.vop[v]][Axis.Z]
            if img.axis is Axis.Y:
                self.local_complement(v)
                img = cl.IMAGE[self.vop[v]][Axis.Z]
            if img.sign < 0:
                self._insert_stabilizer(v)
            if self.vop[v] not in cl.DECORATIONS:
                raise IrreducibleDecorationError(f"node {v}: {cl.NAMES[self.vop[v]]}")

    def to_commands(self) -> list:
        """N, E and C commands preparing this state from nothing."""
        if not self.is_reduced():
            raise NotReducedError("call reduce_decorations() first")
        cmds: list = [N(v) for v in self.nodes]
        cmds += [E((a, b)) for a, b in self.edges]
        for v in self.nodes:
            k = cl.to_command_index(self.vop[v])
            if k is not None:
                cmds.append(C(v, k))
        return cmds

    # -- export --------------------------------------------------------------

    def to_dense(self, order: list[int] | None = None) -> np.ndarray:
        """Amplitudes over ``order`` (default: sorted nodes), first node most significant."""
        order = self.nodes if order is None else list(order)
        n = len(order)
        if n > MAX_DENSE_NODES:
            raise TooLargeError(f"{n} nodes exceed the dense limit of {MAX_DENSE_NODES}")
        pos = {v: i for i, v in enumerate(order)}
        bits = (np.arange(2**n)[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
        phase = np.zeros(2**n, dtype=int)
        for a, b in self.edges:
            phase ^= bits[:, pos[a]] & bits[:, pos[b]]
        psi = ((-1.0) ** phase / 2 ** (n / 2)).astype(complex).reshape((2,) * n if n else ())
        for v in order:
            q = pos[v]
            psi = np.moveaxis(np.tensordot(cl.MATRICES[self.vop[v]], psi, axes=([1], [q])), 0, q)
        return psi.reshape(-1)

    def to_dot(self) -> str:
        lines = ["graph G {"]
        for v in self.nodes:
            label = f"{v}:{cl.NAMES[self.vop[v]]}" if self.vop[v] != cl.IDENTITY else str(v)
            lines.append(f'  {v} [label="{label}"];')
        lines += [f"  {a} -- {b};" for a, b in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"
