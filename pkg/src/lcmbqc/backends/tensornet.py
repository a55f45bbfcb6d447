"""Exact tensor-network execution of patterns.

Every node owns one tensor with a dimension-2 physical leg. ``E`` adds one
dimension-2 bond between the two node tensors: a copy of the physical index
on one side and the CZ phase ``(-1)**(x*b)`` on the other. All later commands
act on a single tensor. Measured tensors stay in the network without a
physical leg; the output state is the contraction of the whole network.
"""

from __future__ import annotations

import heapq
import itertools
import math

import numpy as np

from ..clifford import PAULI_MATRICES, clifford_matrix
from ..command import Axis, C, E, M, N, X, Z, parity
from ..pattern import Pattern, check
from .base import (
    ContractionTooLargeError,
    ExecutionConfig,
    ImpossibleOutcomeError,
    OutputState,
    basis_bra,
    choose_outcome,
    effective_basis,
    tn_budget,
)

_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_COPY = np.eye(2, dtype=complex)
_PHASE = np.array([[1, 1], [1, -1]], dtype=complex)

Label = tuple


class Tensor:
    __slots__ = ("data", "legs")

    def __init__(self, data: np.ndarray, legs: list[Label]) -> None:
        self.data = data
        self.legs = legs


def _contract_pair(a: Tensor, b: Tensor) -> Tensor:
    shared = [leg for leg in a.legs if leg in b.legs]
    ia = [a.legs.index(leg) for leg in shared]
    ib = [b.legs.index(leg) for leg in shared]
    data = np.tensordot(a.data, b.data, axes=(ia, ib))
    legs = [leg for leg in a.legs if leg not in shared] + [leg for leg in b.legs if leg not in shared]
    return Tensor(data, legs)


def contract(tensors: list[Tensor], open_legs: list[Label], max_elements: int) -> tuple[np.ndarray, float]:
    """Contract a network greedily by smallest intermediate.

    Pairs of tensors sharing a leg are merged in order of result size, ties
    broken by the lexicographically smallest pair of tensor ids. Disconnected
    pieces are combined by outer product at the end. Intermediates are
    rescaled to unit max-norm; the returned float is the accumulated natural
    log of the removed scale. The result is transposed to ``open_legs``.
    """
    live: dict[int, Tensor] = dict(enumerate(tensors))
    owners: dict[Label, list[int]] = {}
    for tid, t in live.items():
        for leg in t.legs:
            owners.setdefault(leg, []).append(tid)
    log_scale = 0.0

    def score(a: int, b: int) -> int:
        la, lb = set(live[a].legs), set(live[b].legs)
        return len(la ^ lb)

    heap: list[tuple[int, int, int]] = []
    for ids in owners.values():
        if len(ids) == 2:
            a, b = sorted(ids)
            heap.append((score(a, b), a, b))
    heapq.heapify(heap)
    next_id = len(live)
    while heap:
        _, a, b = heapq.heappop(heap)
        if a not in live or b not in live:
            continue
        if 2 ** score(a, b) > max_elements:
            raise ContractionTooLargeError(f"intermediate of 2^{score(a, b)} elements exceeds budget {max_elements}")
        t = _contract_pair(live.pop(a), live.pop(b))
        peak = np.max(np.abs(t.data)) if t.data.size else 0.0
        if peak > 0:
            t.data = t.data / peak
            log_scale += math.log(peak)
        c = next_id
        next_id += 1
        live[c] = t
        partners = set()
        for leg in t.legs:
            ids = owners[leg]
            ids[:] = [c if i in (a, b) else i for i in ids]
            partners.update(i for i in ids if i != c)
        for d in sorted(partners):
            heapq.heappush(heap, (score(d, c), d, c))
    result = Tensor(np.ones((), dtype=complex), [])
    for tid in sorted(live):
        t = live[tid]
        if result.data.size * t.data.size > max_elements:
            raise ContractionTooLargeError("outer product exceeds the element budget")
        result = Tensor(np.multiply.outer(result.data, t.data), result.legs + t.legs)
    perm = [result.legs.index(leg) for leg in open_legs]
    return np.transpose(result.data, perm), log_scale


class TensorNetworkState:
    """Network of node tensors evolved command by command."""

    def __init__(self, inputs: list[int], input_state: np.ndarray | None = None) -> None:
        self.tensors: dict[int, Tensor] = {}
        self.owner: dict[int, int] = {}  # live node -> tensor id
        self._ids = itertools.count()
        self._bonds = itertools.count()
        self.log_scale = 0.0
        if input_state is None:
            for v in inputs:
                self.add(v)
        elif inputs:
            psi = np.asarray(input_state, dtype=complex)
            psi = (psi / np.linalg.norm(psi)).reshape((2,) * len(inputs))
            tid = next(self._ids)
            self.tensors[tid] = Tensor(psi, [("p", v) for v in inputs])
            for v in inputs:
                self.owner[v] = tid

    def add(self, node: int) -> None:
        tid = next(self._ids)
        self.tensors[tid] = Tensor(_PLUS.copy(), [("p", node)])
        self.owner[node] = tid

    def _phys(self, node: int) -> tuple[Tensor, int]:
        t = self.tensors[self.owner[node]]
        return t, t.legs.index(("p", node))

    def apply(self, node: int, op: np.ndarray) -> None:
        t, q = self._phys(node)
        t.data = np.moveaxis(np.tensordot(op, t.data, axes=([1], [q])), 0, q)

    def entangle(self, a: int, b: int) -> None:
        ta, qa = self._phys(a)
        tb, qb = self._phys(b)
        if ta is tb:
            idx = [slice(None)] * ta.data.ndim
            idx[qa] = idx[qb] = 1
            ta.data[tuple(idx)] *= -1
            return
        bond = ("b", next(self._bonds))
        for t, q, factor in ((ta, qa, _COPY), (tb, qb, _PHASE)):
            moved = np.moveaxis(t.data, q, -1)
            t.data = np.moveaxis(moved[..., :, None] * factor, -2, q)
            t.legs.append(bond)

    def project(self, node: int, bra: np.ndarray) -> None:
        t, q = self._phys(node)
        t.data = np.tensordot(bra, t.data, axes=([0], [q]))
        del t.legs[q]
        peak = np.max(np.abs(t.data)) if t.data.size else 0.0
        if peak > 0:
            t.data = t.data / peak
            self.log_scale += math.log(peak)
        tid = self.owner.pop(node)
        self._absorb(tid)

    def _absorb(self, tid: int) -> None:
        """Merge tensor ``tid`` into a bonded neighbour when the merge does not grow it.

        Keeps measured tensors from piling up, so a chain stays a chain of
        live nodes and marginals remain cheap.
        """
        t = self.tensors[tid]
        legs = set(t.legs)
        best: tuple[int, int] | None = None
        for j, u in self.tensors.items():
            if j == tid or not legs & set(u.legs):
                continue
            size = 2 ** len(legs ^ set(u.legs))
            if size <= max(t.data.size, u.data.size) and (best is None or size < best[0]):
                best = (size, j)
        if best is None:
            return
        j = best[1]
        self.tensors[j] = _contract_pair(self.tensors[j], self.tensors.pop(tid))
        for v, owner in self.owner.items():
            if owner == tid:
                self.owner[v] = j

    def _component(self, tid: int) -> list[int]:
        by_leg: dict[Label, list[int]] = {}
        for i, t in self.tensors.items():
            for leg in t.legs:
                by_leg.setdefault(leg, []).append(i)
        seen = {tid}
        stack = [tid]
        while stack:
            i = stack.pop()
            for leg in self.tensors[i].legs:
                for j in by_leg[leg]:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
        return sorted(seen)

    def reduced_density(self, node: int, max_elements: int) -> np.ndarray:
        """2x2 reduced density matrix of a live node (unnormalised)."""
        ids = self._component(self.owner[node])
        ket, bra = [], []
        for i in ids:
            t = self.tensors[i]
            ket.append(Tensor(t.data, list(t.legs)))
            legs = [leg if leg[0] == "p" and leg != ("p", node) else (leg[0] + "*", leg[1]) for leg in t.legs]
            bra.append(Tensor(t.data.conj(), legs))
        rho, _ = contract(ket + bra, [("p", node), ("p*", node)], max_elements)
        return rho

    def output(self, outputs: list[int], max_elements: int) -> tuple[np.ndarray, float]:
        data, log_scale = contract(list(self.tensors.values()), [("p", v) for v in outputs], max_elements)
        return data.reshape(-1), log_scale + self.log_scale


def run(pattern: Pattern, config: ExecutionConfig | None = None) -> OutputState:
    """Execute ``pattern`` exactly on the tensor network.

    Unforced outcomes need the reduced density matrix of the measured node,
    which costs one contraction of its connected component; forcing every
    outcome avoids that entirely.
    """
    config = config or ExecutionConfig(backend="tensor")
    check(pattern)
    budget = config.max_elements or tn_budget()
    rng = config.rng()
    tn = TensorNetworkState(pattern.inputs, config.input_state)
    outcomes: dict[int, int] = {}
    for cmd in pattern.commands:
        if isinstance(cmd, N):
            tn.add(cmd.node)
        elif isinstance(cmd, E):
            tn.entangle(*cmd.pair)
        elif isinstance(cmd, M):
            plane, angle = effective_basis(cmd, outcomes)
            bra0 = basis_bra(plane, angle, 0)
            if cmd.node in config.forced_outcomes:
                s = config.forced_outcomes[cmd.node]
            else:
                rho = tn.reduced_density(cmd.node, budget)
                p0 = float(np.real(bra0 @ rho @ bra0.conj()) / np.real(np.trace(rho)))
                s = choose_outcome(cmd.node, p0, config, rng)
            tn.project(cmd.node, bra0 if s == 0 else basis_bra(plane, angle, 1))
            outcomes[cmd.node] = s
        elif isinstance(cmd, (X, Z)):
            if parity(cmd.domain, outcomes):
                tn.apply(cmd.node, PAULI_MATRICES[Axis(cmd.kind)])
        elif isinstance(cmd, C):
            tn.apply(cmd.node, clifford_matrix(cmd.k))
    outputs = pattern.outputs
    amps, log_scale = tn.output(outputs, budget)
    norm = np.linalg.norm(amps)
    # the squared norm times the removed scale is the branch probability; an
    # impossible branch sits far below the equiprobable level 2**-measurements
    n_meas = len(outcomes)
    if norm == 0 or 2 * (math.log(norm) + log_scale) < -(n_meas + 60) * math.log(2):
        raise ImpossibleOutcomeError("the forced outcomes have probability 0")
    return OutputState(amps / norm, outputs, outcomes)
