"""Gate circuits and their translation into measurement patterns.

Angles are in units of pi throughout. Qubit ``q`` of a circuit starts on
pattern node ``q``; every gate moves it onto fresh ancilla nodes, so the
pattern inputs are ``0..width-1`` and its outputs are wherever the logical
qubits end up.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterator

import numpy as np

from .command import ONE, Command, E, M, N, X, Z
from .pattern import Pattern

GATES = ("H", "S", "X", "Y", "Z", "RX", "RZ", "CNOT")
MAX_ORACLE_WIDTH = 12

#: ancilla nodes consumed per gate
ANCILLAE = {"H": 1, "S": 2, "X": 0, "Y": 0, "Z": 0, "RX": 2, "RZ": 2, "CNOT": 2}


class UnsupportedGateError(ValueError):
    pass


class TooWideError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Gate:
    """One gate. ``qubits`` is ``(q,)`` or ``(control, target)``."""

    name: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.name not in GATES:
            raise UnsupportedGateError(f"unsupported gate {self.name!r}")
        arity = 2 if self.name == "CNOT" else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.name} acts on {arity} qubit(s)")
        if self.name == "CNOT" and self.qubits[0] == self.qubits[1]:
            raise ValueError("CNOT control and target must differ")
        if (self.angle is None) == (self.name in ("RX", "RZ")):
            raise ValueError(f"{self.name} {'needs' if self.angle is None else 'takes no'} angle")

    def __str__(self) -> str:
        args = " ".join(map(str, self.qubits))
        return f"{self.name} {args}" + ("" if self.angle is None else f" {self.angle!r}")


@dataclass
class Circuit:
    """Ordered gate list on ``width`` qubits."""

    width: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError("circuit width must be at least 1")
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        if any(not 0 <= q < self.width for q in gate.qubits):
            raise ValueError(f"{gate} addresses a qubit outside width {self.width}")

    def add(self, gate: Gate) -> Circuit:
        self._check(gate)
        self.gates.append(gate)
        return self

    def h(self, q: int) -> Circuit:
        return self.add(Gate("H", (q,)))

    def s(self, q: int) -> Circuit:
        return self.add(Gate("S", (q,)))

    def x(self, q: int) -> Circuit:
        return self.add(Gate("X", (q,)))

    def y(self, q: int) -> Circuit:
        return self.add(Gate("Y", (q,)))

    def z(self, q: int) -> Circuit:
        return self.add(Gate("Z", (q,)))

    def rx(self, q: int, angle: float) -> Circuit:
        return self.add(Gate("RX", (q,), float(angle)))

    def rz(self, q: int, angle: float) -> Circuit:
        return self.add(Gate("RZ", (q,), float(angle)))

    def cnot(self, control: int, target: int) -> Circuit:
        return self.add(Gate("CNOT", (control, target)))

    def to_text(self) -> str:
        return "\n".join([f"qubits {self.width}", *map(str, self.gates)]) + "\n"


# -- gate patterns -------------------------------------------------------------


def _gate_commands(gate: Gate, cur: list[int], fresh: Iterator[int]) -> list[Command]:
    """Commands for one gate; moves the affected qubits in ``cur`` onto ancillae."""
    name = gate.name
    if name in ("X", "Y", "Z"):
        v = cur[gate.qubits[0]]
        cmds: list[Command] = []
        if name in ("X", "Y"):
            cmds.append(X(v, {ONE}))
        if name in ("Z", "Y"):
            cmds.append(Z(v, {ONE}))
        return cmds
    if name == "H":
        q = gate.qubits[0]
        i, a = cur[q], next(fresh)
        cur[q] = a
        return [N(a), E((i, a)), M(i, "XY", 0.0), X(a, {i})]
    if name == "RX":
        q = gate.qubits[0]
        i, a, b = cur[q], next(fresh), next(fresh)
        cur[q] = b
        return [N(a), N(b), E((i, a)), E((a, b)), M(i, "XY", 0.0), M(a, "XY", -gate.angle, {i}), X(b, {a}), Z(b, {i})]
    if name in ("RZ", "S"):
        q = gate.qubits[0]
        angle = 0.5 if name == "S" else gate.angle
        i, a, b = cur[q], next(fresh), next(fresh)
        cur[q] = b
        return [N(a), N(b), E((i, a)), E((a, b)), M(i, "XY", -angle), M(a, "XY", 0.0), X(b, {a}), Z(b, {i})]
    c, t = gate.qubits
    vc, vt, a1, a2 = cur[c], cur[t], next(fresh), next(fresh)
    cur[t] = a2
    return [
        N(a1),
        N(a2),
        E((vt, a1)),
        E((vc, a1)),
        E((a1, a2)),
        M(vt, "XY", 0.0),
        M(a1, "XY", 0.0, {vt}),
        X(a2, {a1}),
        Z(a2, {vt}),
        Z(vc, {vt}),
    ]


def transpile(circuit: Circuit) -> Pattern:
    """Translate ``circuit`` gate by gate into a deterministic pattern.

    Building blocks: H takes one ancilla; Rx, Rz and S (as Rz(1/2)) take two;
    CNOT uses the two-ancilla pattern with the control kept in place. Pauli
    gates become X/Z corrections on the always-1 signal.
    """
    cur = list(range(circuit.width))
    fresh = iter(range(circuit.width, 1 << 62))
    cmds: list[Command] = []
    for gate in circuit.gates:
        cmds += _gate_commands(gate, cur, fresh)
    return Pattern(range(circuit.width), cmds, cur)


def standardize_and_transpile(circuit: Circuit) -> Pattern:
    """Transpile straight into standard form with no t-domains.

    Gate patterns are streamed through the standardisation and
    signal-shifting rules at once, keeping one pending X/Z frame per live
    node; the result is command-for-command the output of
    ``shift_signals(standardize(transpile(circuit)))``.
    """
    from .passes import settle_measurement

    empty: frozenset[int] = frozenset()
    cur = list(range(circuit.width))
    fresh = iter(range(circuit.width, 1 << 62))
    n_cmds: list[Command] = []
    e_cmds: list[Command] = []
    m_cmds: list[Command] = []
    xf: dict[int, frozenset[int]] = {}
    zf: dict[int, frozenset[int]] = {}
    shift: dict[int, frozenset[int]] = {}

    def sub(dom: frozenset[int]) -> frozenset[int]:
        return reduce(lambda acc, j: acc ^ {j} ^ shift.get(j, empty), dom, empty)

    for gate in circuit.gates:
        for cmd in _gate_commands(gate, cur, fresh):
            if isinstance(cmd, N):
                n_cmds.append(cmd)
            elif isinstance(cmd, E):
                a, b = cmd.pair
                xa, xb = xf.get(a, empty), xf.get(b, empty)
                zf[b] = zf.get(b, empty) ^ xa
                zf[a] = zf.get(a, empty) ^ xb
                e_cmds.append(cmd)
            elif isinstance(cmd, M):
                s = sub(cmd.s_domain) ^ xf.pop(cmd.node, empty)
                t = sub(cmd.t_domain) ^ zf.pop(cmd.node, empty)
                new, moved = settle_measurement(cmd.node, cmd.plane, cmd.angle, s, t)
                if moved:
                    shift[cmd.node] = moved
                m_cmds.append(new)
            elif isinstance(cmd, X):
                xf[cmd.node] = xf.get(cmd.node, empty) ^ sub(cmd.domain)
            else:
                zf[cmd.node] = zf.get(cmd.node, empty) ^ sub(cmd.domain)
    corrections: list[Command] = []
    for v in cur:
        if xf.get(v):
            corrections.append(X(v, xf[v]))
        if zf.get(v):
            corrections.append(Z(v, zf[v]))
    return Pattern(range(circuit.width), n_cmds + e_cmds + m_cmds + corrections, cur)


# -- dense oracle --------------------------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_FIXED = {
    "H": _H,
    "S": np.diag([1, 1j]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]).astype(complex),
}


def gate_matrix(gate: Gate) -> np.ndarray:
    """Unitary of a gate on its own qubits (control first for CNOT)."""
    if gate.name in _FIXED:
        return _FIXED[gate.name]
    if gate.name == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    half = math.pi * gate.angle / 2
    if gate.name == "RX":
        return np.array([[math.cos(half), -1j * math.sin(half)], [-1j * math.sin(half), math.cos(half)]])
    return np.diag([np.exp(-1j * half), np.exp(1j * half)])


def simulate_circuit(circuit: Circuit, input_state: np.ndarray | None = None) -> np.ndarray:
    """Apply the gate matrices to ``input_state`` (default |+...+>).

    Qubit 0 is the most significant bit of the returned amplitude vector.
    """
    n = circuit.width
    if n > MAX_ORACLE_WIDTH:
        raise TooWideError(f"width {n} exceeds the oracle limit of {MAX_ORACLE_WIDTH}")
    if input_state is None:
        psi = np.ones(2**n, dtype=complex) / 2 ** (n / 2)
    else:
        psi = np.asarray(input_state, dtype=complex).reshape(-1)
        if psi.size != 2**n:
            raise ValueError(f"input state has {psi.size} amplitudes, expected {2**n}")
    psi = psi.reshape((2,) * n)
    for gate in circuit.gates:
        k = len(gate.qubits)
        op = gate_matrix(gate).reshape((2,) * (2 * k))
        psi = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(gate.qubits)))
        psi = np.moveaxis(psi, list(range(k)), list(gate.qubits))
    return psi.reshape(-1)


# -- text format ---------------------------------------------------------------

_NUM = re.compile(r"^-?\d+$")


def parse_circuit(text: str, radians: bool = False) -> Circuit:
    """Parse the line-based circuit format.

    An optional ``qubits <n>`` line fixes the width (otherwise the largest
    qubit index plus one). Gates: ``H q``, ``S q``, ``X q``, ``Y q``,
    ``Z q``, ``RX q angle``, ``RZ q angle``, ``CNOT control target``. Angles
    are in units of pi unless ``radians``. ``#`` starts a comment.
    """
    width = None
    gates: list[tuple[int, Gate]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        head = parts[0].upper()
        args = parts[1:]
        if head == "QUBITS":
            if width is not None or gates or len(args) != 1 or not _NUM.match(args[0]):
                raise ParseError("expected a single 'qubits <n>' line before any gate", lineno)
            width = int(args[0])
            if width < 1:
                raise ParseError("width must be at least 1", lineno)
            continue
        if head not in GATES:
            raise ParseError(f"unknown gate {parts[0]!r}", lineno)
        n_qubits = 2 if head == "CNOT" else 1
        n_args = n_qubits + (1 if head in ("RX", "RZ") else 0)
        if len(args) != n_args:
            raise ParseError(f"{head} takes {n_args} argument(s)", lineno)
        if not all(_NUM.match(a) and int(a) >= 0 for a in args[:n_qubits]):
            raise ParseError("qubit indices must be non-negative integers", lineno)
        angle = None
        if n_args > n_qubits:
            try:
                angle = float(args[-1])
            except ValueError:
                raise ParseError(f"bad angle {args[-1]!r}", lineno) from None
            if not math.isfinite(angle):
                raise ParseError("angle must be finite", lineno)
            if radians:
                angle /= math.pi
        try:
            gates.append((lineno, Gate(head, tuple(int(a) for a in args[:n_qubits]), angle)))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if width is None:
        width = max((max(g.qubits) for _, g in gates), default=0) + 1
    circuit = Circuit(width)
    for lineno, g in gates:
        try:
            circuit.add(g)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return circuit
