"""Types shared by the simulation backends."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ..command import ONE, M, Plane
from ..clifford import adapt_angle, projector

DEFAULT_MAX_DENSE_QUBITS = 24
#: environment variable holding the tensor backend's element budget
TN_BUDGET_ENV = "LCMBQC_TN_MAX_ELEMENTS"
DEFAULT_TN_BUDGET = 2**26


class SimulationError(Exception):
    pass


class SpaceExceededError(SimulationError):
    pass


class ImpossibleOutcomeError(SimulationError):
    pass


class ContractionTooLargeError(SimulationError):
    pass


class ShapeMismatchError(SimulationError, ValueError):
    pass


def tn_budget() -> int:
    return int(os.environ.get(TN_BUDGET_ENV, DEFAULT_TN_BUDGET))


@dataclass
class ExecutionConfig:
    """How to run a pattern.

    ``forced_outcomes`` fixes measurement results by node; the rest are drawn
    by the Born rule from a PCG64 generator seeded with ``seed``.
    """

    backend: str = "statevector"
    seed: int | None = None
    forced_outcomes: dict[int, int] = field(default_factory=dict)
    max_dense_qubits: int = DEFAULT_MAX_DENSE_QUBITS
    input_state: np.ndarray | None = None
    max_elements: int | None = None

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


@dataclass
class OutputState:
    """Normalised state over ``nodes`` (first node = most significant bit)."""

    amplitudes: np.ndarray
    nodes: list[int]
    outcomes: dict[int, int]

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)


def fidelity(a: OutputState | np.ndarray, b: OutputState | np.ndarray) -> float:
    """|<a|b>|^2 for normalised states; insensitive to global phase."""
    if isinstance(a, OutputState) and isinstance(b, OutputState) and len(a.nodes) != len(b.nodes):
        raise ShapeMismatchError(f"{len(a.nodes)} vs {len(b.nodes)} output nodes")
    va = a.amplitudes if isinstance(a, OutputState) else np.asarray(a, dtype=complex).reshape(-1)
    vb = b.amplitudes if isinstance(b, OutputState) else np.asarray(b, dtype=complex).reshape(-1)
    if va.shape != vb.shape:
        raise ShapeMismatchError(f"shapes {va.shape} and {vb.shape} differ")
    return float(abs(np.vdot(va, vb)) ** 2)


def effective_basis(cmd: M, outcomes: dict[int, int]) -> tuple[Plane, float]:
    """Adapted (plane, angle) of a measurement given earlier outcomes."""
    s = sum(1 if n == ONE else outcomes[n] for n in cmd.s_domain) % 2
    t = sum(1 if n == ONE else outcomes[n] for n in cmd.t_domain) % 2
    return cmd.plane, adapt_angle(cmd.plane, cmd.angle, s, t)


def basis_bra(plane: Plane, angle: float, outcome: int) -> np.ndarray:
    """Row vector <e| of the eigenstate selected by ``outcome``."""
    w, v = np.linalg.eigh(projector(plane, angle, outcome))
    return v[:, np.argmax(w)].conj()


def choose_outcome(node: int, p0: float, config: ExecutionConfig, rng: np.random.Generator, tol: float = 1e-12) -> int:
    if node in config.forced_outcomes:
        s = config.forced_outcomes[node]
        if (p0 if s == 0 else 1 - p0) < tol:
            raise ImpossibleOutcomeError(f"outcome {s} on node {node} has probability 0")
        return s
    return int(rng.random() >= p0)
