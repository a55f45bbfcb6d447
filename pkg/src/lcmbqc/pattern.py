"""Pattern container, well-formedness checks, space/depth metrics and file I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .command import ONE, C, Command, E, M, N, Plane, X, Z, signals_of


class PatternError(Exception):
    """Base class for malformed-pattern errors."""


class DuplicatePreparationError(PatternError):
    pass


class MeasuredNodeUseError(PatternError):
    pass


class SelfEdgeError(PatternError):
    pass


class UnknownNodeError(PatternError):
    pass


class ForwardSignalError(PatternError):
    pass


class InvalidPatternError(PatternError):
    def __init__(self, report: ValidationReport) -> None:
        super().__init__("invalid pattern:\n" + "\n".join(map(str, report.violations)))
        self.report = report


class PatternFormatError(PatternError, ValueError):
    """Raised when a pattern file cannot be parsed."""


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int | None
    message: str

    def __str__(self) -> str:
        where = f"command {self.index}" if self.index is not None else "pattern"
        return f"{self.kind} ({where}): {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return not self.violations

    @property
    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


_ERRORS = {
    "DuplicatePreparation": DuplicatePreparationError,
    "MeasuredNodeUse": MeasuredNodeUseError,
    "SelfEdge": SelfEdgeError,
    "UnknownNode": UnknownNodeError,
    "ForwardSignal": ForwardSignalError,
}


class _Tracker:
    """Incremental checker of the command-sequence invariants."""

    def __init__(self, inputs: Iterable[int]) -> None:
        self.known: set[int] = set(inputs)
        self.measured: set[int] = set()
        self.order: list[int] = list(dict.fromkeys(inputs))

    def check(self, cmd: Command) -> list[tuple[str, str]]:
        problems = []
        if isinstance(cmd, N):
            if cmd.node in self.known:
                problems.append(("DuplicatePreparation", f"node {cmd.node} already exists"))
        else:
            if isinstance(cmd, E) and cmd.pair[0] == cmd.pair[1]:
                problems.append(("SelfEdge", f"E on ({cmd.pair[0]}, {cmd.pair[1]})"))
            for v in cmd.nodes:
                if v in self.measured:
                    problems.append(("MeasuredNodeUse", f"node {v} used after its measurement"))
                elif v not in self.known:
                    problems.append(("UnknownNode", f"node {v} is neither an input nor prepared"))
        for s in sorted(signals_of(cmd)):
            if s != ONE and s not in self.measured:
                problems.append(("ForwardSignal", f"signal {s} is not measured before use"))
        return problems

    def push(self, cmd: Command) -> None:
        if isinstance(cmd, N) and cmd.node not in self.known:
            self.known.add(cmd.node)
            self.order.append(cmd.node)
        elif isinstance(cmd, M):
            self.measured.add(cmd.node)


class Pattern:
    """Sequence of measurement-calculus commands with declared inputs/outputs.

    Parameters
    ----------
    inputs : iterable of int
        Input nodes. They exist before the first command and are never
        targets of ``N``.
    commands : iterable of Command
        Commands in execution order.
    outputs : iterable of int, optional
        Output nodes in the order used for output states. When omitted, the
        unmeasured nodes in order of first appearance.
    """

    def __init__(
        self,
        inputs: Iterable[int] = (),
        commands: Iterable[Command] = (),
        outputs: Iterable[int] | None = None,
    ) -> None:
        self.inputs: list[int] = list(inputs)
        self.commands: list[Command] = list(commands)
        self._outputs = None if outputs is None else list(outputs)
        self._tracker: _Tracker | None = None
        self._tracked = 0
        #: measurement layers set by ``parallelize_commands``
        self.layers: list[list[int]] | None = None

    # -- container protocol ----------------------------------------------------

    def __iter__(self) -> Iterator[Command]:
        return iter(self.commands)

    def __len__(self) -> int:
        return len(self.commands)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return (self.inputs, self.outputs, self.commands) == (other.inputs, other.outputs, other.commands)

    def __repr__(self) -> str:
        return f"Pattern(inputs={self.inputs}, outputs={self.outputs}, {len(self)} commands)"

    def copy(self) -> Pattern:
        return Pattern(self.inputs, self.commands, self._outputs)

    # -- building --------------------------------------------------------------

    def add(self, cmd: Command) -> Pattern:
        """Append ``cmd`` after checking it against the commands so far."""
        if self._tracker is None or self._tracked != len(self.commands):
            self._tracker = _Tracker(self.inputs)
            for c in self.commands:
                self._tracker.push(c)
            self._tracked = len(self.commands)
        problems = self._tracker.check(cmd)
        if problems:
            kind, message = problems[0]
            raise _ERRORS[kind](message)
        self._tracker.push(cmd)
        self.commands.append(cmd)
        self._tracked += 1
        return self

    def extend(self, cmds: Iterable[Command]) -> Pattern:
        for cmd in cmds:
            self.add(cmd)
        return self

    # -- derived views -----------------------------------------------------------

    @property
    def outputs(self) -> list[int]:
        if self._outputs is not None:
            return list(self._outputs)
        measured = {c.node for c in self.commands if isinstance(c, M)}
        seen = list(dict.fromkeys(self.inputs))
        seen += [c.node for c in self.commands if isinstance(c, N)]
        return [v for v in dict.fromkeys(seen) if v not in measured]

    @outputs.setter
    def outputs(self, value: Iterable[int]) -> None:
        self._outputs = list(value)

    @property
    def nodes(self) -> list[int]:
        """Inputs followed by prepared nodes."""
        return list(dict.fromkeys([*self.inputs, *(c.node for c in self.commands if isinstance(c, N))]))

    @property
    def measurements(self) -> list[M]:
        return [c for c in self.commands if isinstance(c, M)]

    def edges(self) -> list[tuple[int, int]]:
        return [c.pair for c in self.commands if isinstance(c, E)]

    def count(self) -> dict[str, int]:
        """Number of commands of each kind."""
        out = dict.fromkeys("NEMXZC", 0)
        for c in self.commands:
            out[c.kind] += 1
        return out


def validate(pattern: Pattern) -> ValidationReport:
    """List every violation of the pattern invariants (empty iff well-formed)."""
    report = ValidationReport()
    tracker = _Tracker(pattern.inputs)
    if len(set(pattern.inputs)) != len(pattern.inputs):
        report.violations.append(Violation("DuplicatePreparation", None, "repeated input node"))
    for i, cmd in enumerate(pattern.commands):
        for kind, message in tracker.check(cmd):
            report.violations.append(Violation(kind, i, message))
        tracker.push(cmd)
    outputs = pattern.outputs
    for v in outputs:
        if v in tracker.measured:
            report.violations.append(Violation("OutputMeasured", None, f"output {v} is measured"))
        elif v not in tracker.known:
            report.violations.append(Violation("UnknownNode", None, f"output {v} does not exist"))
    if len(set(outputs)) != len(outputs):
        report.violations.append(Violation("DuplicateOutput", None, "repeated output node"))
    dangling = tracker.known - tracker.measured - set(outputs)
    for v in sorted(dangling):
        report.violations.append(Violation("UnmeasuredNonOutput", None, f"node {v} is never measured"))
    return report


def check(pattern: Pattern) -> None:
    report = validate(pattern)
    if not report:
        raise InvalidPatternError(report)


def max_space(pattern: Pattern) -> int:
    """Largest number of simultaneously alive qubits."""
    check(pattern)
    space = best = len(pattern.inputs)
    for cmd in pattern.commands:
        if isinstance(cmd, N):
            space += 1
            best = max(best, space)
        elif isinstance(cmd, M):
            space -= 1
    return best


def measurement_layers(pattern: Pattern) -> list[list[int]]:
    """Group measured nodes into dependency rounds.

    Round of a measurement is one more than the deepest round among the
    measured nodes in its s/t domains.
    """
    check(pattern)
    level: dict[int, int] = {}
    for cmd in pattern.measurements:
        deps = [level[s] for s in cmd.signals if s != ONE]
        level[cmd.node] = 1 + max(deps, default=-1)
    layers: list[list[int]] = [[] for _ in range(1 + max(level.values(), default=-1))]
    for node, lv in level.items():
        layers[lv].append(node)
    return layers


def depth(pattern: Pattern) -> int:
    """Number of measurement rounds (longest dependency chain)."""
    return len(measurement_layers(pattern))


# -- file format ---------------------------------------------------------------


def _cmd_to_obj(cmd: Command) -> dict:
    if isinstance(cmd, N):
        return {"cmd": "N", "node": cmd.node}
    if isinstance(cmd, E):
        return {"cmd": "E", "nodes": sorted(cmd.pair)}
    if isinstance(cmd, M):
        return {
            "cmd": "M",
            "node": cmd.node,
            "plane": cmd.plane.value,
            "angle": cmd.angle,
            "s_domain": sorted(cmd.s_domain),
            "t_domain": sorted(cmd.t_domain),
        }
    if isinstance(cmd, (X, Z)):
        return {"cmd": cmd.kind, "node": cmd.node, "domain": sorted(cmd.domain)}
    return {"cmd": "C", "node": cmd.node, "k": cmd.k}


_FIELDS = {
    "N": {"cmd", "node"},
    "E": {"cmd", "nodes"},
    "M": {"cmd", "node", "plane", "angle", "s_domain", "t_domain"},
    "X": {"cmd", "node", "domain"},
    "Z": {"cmd", "node", "domain"},
    "C": {"cmd", "node", "k"},
}


def _int(v: object, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise PatternFormatError(f"{what} must be an integer, got {v!r}")
    return v


def _node(v: object, what: str = "node") -> int:
    v = _int(v, what)
    if v < 0:
        raise PatternFormatError(f"{what} must be non-negative, got {v}")
    return v


def _dom(v: object, what: str) -> frozenset[int]:
    if not isinstance(v, list):
        raise PatternFormatError(f"{what} must be an array")
    items = [_int(x, what) for x in v]
    if items != sorted(set(items)):
        raise PatternFormatError(f"{what} must be sorted ascending without repeats")
    if any(x < ONE for x in items):
        raise PatternFormatError(f"{what} contains an invalid signal")
    return frozenset(items)


def _obj_to_cmd(obj: object, i: int) -> Command:
    if not isinstance(obj, dict) or "cmd" not in obj:
        raise PatternFormatError(f"command {i}: expected an object with a 'cmd' field")
    kind = obj["cmd"]
    if kind not in _FIELDS:
        raise PatternFormatError(f"command {i}: unknown command {kind!r}")
    if set(obj) != _FIELDS[kind]:
        extra, missing = set(obj) - _FIELDS[kind], _FIELDS[kind] - set(obj)
        raise PatternFormatError(f"command {i}: unknown fields {sorted(extra)}, missing {sorted(missing)}")
    if kind == "N":
        return N(_node(obj["node"]))
    if kind == "E":
        nodes = obj["nodes"]
        if not isinstance(nodes, list) or len(nodes) != 2:
            raise PatternFormatError(f"command {i}: E needs two nodes")
        a, b = (_node(x) for x in nodes)
        if a > b:
            raise PatternFormatError(f"command {i}: E nodes must be sorted ascending")
        return E((a, b))
    if kind == "M":
        try:
            plane = Plane(obj["plane"])
        except ValueError:
            raise PatternFormatError(f"command {i}: unknown plane {obj['plane']!r}") from None
        angle = obj["angle"]
        if isinstance(angle, bool) or not isinstance(angle, (int, float)):
            raise PatternFormatError(f"command {i}: angle must be a number")
        return M(_node(obj["node"]), plane, float(angle), _dom(obj["s_domain"], "s_domain"), _dom(obj["t_domain"], "t_domain"))
    if kind in ("X", "Z"):
        cls = X if kind == "X" else Z
        return cls(_node(obj["node"]), _dom(obj["domain"], "domain"))
    k = _int(obj["k"], "k")
    if not 0 <= k <= 6:
        raise PatternFormatError(f"command {i}: k must be in 0..6")
    return C(_node(obj["node"]), k)


def to_dict(pattern: Pattern) -> dict:
    return {
        "inputs": list(pattern.inputs),
        "outputs": pattern.outputs,
        "commands": [_cmd_to_obj(c) for c in pattern.commands],
    }


def from_dict(obj: object) -> Pattern:
    if not isinstance(obj, dict):
        raise PatternFormatError("pattern must be a JSON object")
    if set(obj) != {"inputs", "outputs", "commands"}:
        raise PatternFormatError(f"pattern fields must be inputs, outputs, commands; got {sorted(obj)}")
    for key in ("inputs", "outputs", "commands"):
        if not isinstance(obj[key], list):
            raise PatternFormatError(f"{key} must be an array")
    inputs = [_node(v, "input") for v in obj["inputs"]]
    outputs = [_node(v, "output") for v in obj["outputs"]]
    cmds = [_obj_to_cmd(c, i) for i, c in enumerate(obj["commands"])]
    return Pattern(inputs, cmds, outputs)


def dumps(pattern: Pattern) -> str:
    """Serialise to the JSON pattern format (one command per line)."""
    d = to_dict(pattern)
    body = ",\n    ".join(json.dumps(c) for c in d["commands"])
    cmds = f"[\n    {body}\n  ]" if body else "[]"
    return f'{{\n  "inputs": {json.dumps(d["inputs"])},\n  "outputs": {json.dumps(d["outputs"])},\n  "commands": {cmds}\n}}\n'


def loads(text: str) -> Pattern:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatternFormatError(f"not valid JSON: {exc}") from None
    return from_dict(obj)


def save(pattern: Pattern, path: str | Path) -> None:
    Path(path).write_text(dumps(pattern), encoding="utf-8")


def load(path: str | Path) -> Pattern:
    return loads(Path(path).read_text(encoding="utf-8"))


def to_notation(pattern: Pattern) -> str:
    """Textbook right-to-left rendering, e.g. ``X_1^{0} M_0^{XY,0} E_01 N_1``."""

    def dom(d: frozenset[int]) -> str:
        return ",".join("1" if s == ONE else str(s) for s in sorted(d))

    parts = []
    for c in pattern.commands:
        if isinstance(c, N):
            parts.append(f"N_{c.node}")
        elif isinstance(c, E):
            parts.append(f"E_{c.pair[0]}{c.pair[1]}")
        elif isinstance(c, M):
            t = f"^{{{dom(c.t_domain)}}}" if c.t_domain else ""
            s = f"^{{{dom(c.s_domain)}}}" if c.s_domain else ""
            parts.append(f"{t}[M_{c.node}^{{{c.plane.value},{c.angle:g}}}]{s}")
        elif isinstance(c, (X, Z)):
            parts.append(f"{c.kind}_{c.node}^{{{dom(c.domain)}}}")
        else:
            parts.append(f"C_{c.node}^{c.k}")
    return " ".join(reversed(parts))
