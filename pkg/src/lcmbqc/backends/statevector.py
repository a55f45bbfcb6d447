"""Dense statevector execution of patterns."""

from __future__ import annotations

import numpy as np

from ..clifford import PAULI_MATRICES, clifford_matrix
from ..command import Axis, C, E, M, N, X, Z, parity
from ..pattern import Pattern, check, max_space
from .base import (
    ExecutionConfig,
    OutputState,
    SpaceExceededError,
    basis_bra,
    choose_outcome,
    effective_basis,
)

_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


class Statevector:
    """State over an ordered list of live nodes; axis ``i`` belongs to ``nodes[i]``."""

    def __init__(self, nodes: list[int], amplitudes: np.ndarray | None = None) -> None:
        self.nodes = list(nodes)
        n = len(self.nodes)
        if amplitudes is None:
            psi = np.ones(2**n, dtype=complex) / 2 ** (n / 2)
        else:
            psi = np.asarray(amplitudes, dtype=complex)
            if psi.size != 2**n:
                raise ValueError(f"input state has {psi.size} amplitudes, expected {2**n}")
            psi = psi / np.linalg.norm(psi)
        self.psi = psi.reshape((2,) * n)

    def _axis(self, node: int) -> int:
        return self.nodes.index(node)

    def add(self, node: int) -> None:
        self.psi = np.multiply.outer(self.psi, _PLUS)
        self.nodes.append(node)

    def apply(self, node: int, op: np.ndarray) -> None:
        q = self._axis(node)
        self.psi = np.moveaxis(np.tensordot(op, self.psi, axes=([1], [q])), 0, q)

    def entangle(self, a: int, b: int) -> None:
        qa, qb = self._axis(a), self._axis(b)
        idx = [slice(None)] * self.psi.ndim
        idx[qa] = 1
        idx[qb] = 1
        self.psi[tuple(idx)] *= -1

    def probability0(self, node: int, bra0: np.ndarray) -> float:
        q = self._axis(node)
        amp = np.tensordot(bra0, self.psi, axes=([0], [q]))
        return float(np.vdot(amp, amp).real)

    def project(self, node: int, bra: np.ndarray) -> None:
        q = self._axis(node)
        self.psi = np.tensordot(bra, self.psi, axes=([0], [q]))
        self.psi /= np.linalg.norm(self.psi)
        del self.nodes[q]

    def amplitudes(self, order: list[int]) -> np.ndarray:
        perm = [self._axis(v) for v in order]
        return np.transpose(self.psi, perm).reshape(-1)


def run(pattern: Pattern, config: ExecutionConfig | None = None) -> OutputState:
    """Execute ``pattern`` on a dense statevector.

    Inputs start in ``config.input_state`` (amplitudes over ``pattern.inputs``)
    or in |+> each.
    """
    config = config or ExecutionConfig()
    check(pattern)
    space = max_space(pattern)
    if space > config.max_dense_qubits:
        raise SpaceExceededError(f"pattern needs {space} qubits, limit is {config.max_dense_qubits}")
    rng = config.rng()
    sv = Statevector(pattern.inputs, config.input_state)
    outcomes: dict[int, int] = {}
    for cmd in pattern.commands:
        if isinstance(cmd, N):
            sv.add(cmd.node)
        elif isinstance(cmd, E):
            sv.entangle(*cmd.pair)
        elif isinstance(cmd, M):
            plane, angle = effective_basis(cmd, outcomes)
            bra0 = basis_bra(plane, angle, 0)
            s = choose_outcome(cmd.node, sv.probability0(cmd.node, bra0), config, rng)
            sv.project(cmd.node, bra0 if s == 0 else basis_bra(plane, angle, 1))
            outcomes[cmd.node] = s
        elif isinstance(cmd, (X, Z)):
            if parity(cmd.domain, outcomes):
                sv.apply(cmd.node, PAULI_MATRICES[Axis(cmd.kind)])
        elif isinstance(cmd, C):
            sv.apply(cmd.node, clifford_matrix(cmd.k))
    outputs = pattern.outputs
    return OutputState(sv.amplitudes(outputs), outputs, outcomes)
