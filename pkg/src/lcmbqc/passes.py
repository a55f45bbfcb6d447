"""Pattern rewrite passes.

All passes return a new :class:`~lcmbqc.pattern.Pattern` and leave their input
untouched. A pattern is *standard* when its commands read
``N* E* C* M* (X|Z|C)*``: preparations, entanglement, local-Clifford
decorations of the resource state, measurements, then output corrections.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable

from . import clifford as cl
from .command import ONE, Axis, C, Command, E, M, N, Plane, X, Z
from .graphsim import DecoratedGraphState
from .pattern import Pattern, PatternError, check, depth, max_space, measurement_layers

_DIAGONAL = {1, 2, 5}  # S, Z, SZ commute with CZ
_ORDER = {"N": 0, "E": 1, "C": 2, "M": 3, "X": 4, "Z": 4}


class NotStandardError(PatternError):
    pass


class StandardizationError(PatternError):
    pass


def is_standard(pattern: Pattern) -> bool:
    stage = 0
    for cmd in pattern.commands:
        rank = _ORDER[cmd.kind]
        if cmd.kind == "C" and stage >= 3:
            rank = 4
        if rank < stage:
            return False
        stage = rank
    return True


def _require_standard(pattern: Pattern) -> None:
    if not is_standard(pattern):
        raise NotStandardError("pattern is not in standard form; run standardize() first")


def standardize(pattern: Pattern) -> Pattern:
    """Reorder into standard form using the measurement-calculus rewrite rules.

    Pending X/Z corrections are carried forward per node: ``X_i E_ij`` becomes
    ``E_ij X_i Z_j``, corrections reaching ``M_i`` join its s/t domains, and a Clifford conjugates the pending Paulis it passes. What
    is left over lands on the outputs. N, E, C and M keep their relative order.
    """
    check(pattern)
    n_cmds: list[Command] = []
    e_cmds: list[Command] = []
    c_cmds: list[Command] = []
    m_cmds: list[Command] = []
    xf: dict[int, frozenset[int]] = {}
    zf: dict[int, frozenset[int]] = {}
    rotated: set[int] = set()
    empty: frozenset[int] = frozenset()
    for cmd in pattern.commands:
        if isinstance(cmd, N):
            n_cmds.append(cmd)
        elif isinstance(cmd, E):
            a, b = cmd.pair
            if a in rotated or b in rotated:
                raise StandardizationError(f"{cmd} follows a non-diagonal C on the same node")
            xa, xb = xf.get(a, empty), xf.get(b, empty)
            if xa:
                zf[b] = zf.get(b, empty) ^ xa
            if xb:
                zf[a] = zf.get(a, empty) ^ xb
            e_cmds.append(cmd)
        elif isinstance(cmd, M):
            xs, zs = xf.pop(cmd.node, empty), zf.pop(cmd.node, empty)
            m_cmds.append(M(cmd.node, cmd.plane, cmd.angle, cmd.s_domain ^ xs, cmd.t_domain ^ zs))
        elif isinstance(cmd, X):
            xf[cmd.node] = xf.get(cmd.node, empty) ^ cmd.domain
        elif isinstance(cmd, Z):
            zf[cmd.node] = zf.get(cmd.node, empty) ^ cmd.domain
        else:
            g = cl.from_command_index(cmd.k)
            xs, zs = xf.pop(cmd.node, empty), zf.pop(cmd.node, empty)
            nx, nz = empty, empty
            for dom, axis in ((xs, Axis.X), (zs, Axis.Z)):
                img = cl.IMAGE[g][axis].axis
                if img in (Axis.X, Axis.Y):
                    nx ^= dom
                if img in (Axis.Z, Axis.Y):
                    nz ^= dom
            if nx:
                xf[cmd.node] = nx
            if nz:
                zf[cmd.node] = nz
            if cmd.k not in _DIAGONAL:
                rotated.add(cmd.node)
            c_cmds.append(cmd)
    corrections: list[Command] = []
    for v in pattern.outputs:
        if xf.get(v):
            corrections.append(X(v, xf[v]))
        if zf.get(v):
            corrections.append(Z(v, zf[v]))
    return Pattern(pattern.inputs, n_cmds + e_cmds + c_cmds + m_cmds + corrections, pattern.outputs)


def settle_measurement(node: int, plane: Plane, angle: float, s: frozenset[int], t: frozenset[int]) -> tuple[M, frozenset[int]]:
    """Move the outcome-flipping part of a measurement's domains out of it.

    Returns the rewritten command and the signal set to add to every later
    use of ``node``. A domain whose conjugation only adds pi to the angle
    flips the outcome and is moved; what remains changes the angle's sign.
    XY keeps its s-domain, YZ and XZ keep a t-domain, and a Pauli
    measurement keeps nothing.
    """
    pauli = cl.pauli_axis(plane, angle)
    if pauli is not None:
        moved = (s if pauli.axis is not Axis.X else frozenset()) ^ (t if pauli.axis is not Axis.Z else frozenset())
        return M(node, plane, angle), moved
    if plane is Plane.XY:
        return M(node, plane, angle, s, frozenset()), t
    if plane is Plane.YZ:
        return M(node, plane, angle, frozenset(), t), s
    return M(node, plane, angle, frozenset(), t ^ s), s


def _substitute(dom: Iterable[int], shift: dict[int, frozenset[int]]) -> frozenset[int]:
    out: set[int] = set()
    for j in dom:
        out ^= {j}
        out ^= shift.get(j, frozenset())
    return frozenset(out)


def shift_signals(pattern: Pattern) -> Pattern:
    """Move outcome flips out of measurements into later domains.

    Afterwards no XY measurement has a t-domain and no Pauli measurement has
    any domain.
    """
    _require_standard(pattern)
    check(pattern)
    shift: dict[int, frozenset[int]] = {}
    out: list[Command] = []
    for cmd in pattern.commands:
        if isinstance(cmd, M):
            s, t = _substitute(cmd.s_domain, shift), _substitute(cmd.t_domain, shift)
            new, moved = settle_measurement(cmd.node, cmd.plane, cmd.angle, s, t)
            if moved:
                shift[cmd.node] = moved
            out.append(new)
        elif isinstance(cmd, (X, Z)):
            dom = _substitute(cmd.domain, shift)
            if dom:
                out.append(type(cmd)(cmd.node, dom))
        else:
            out.append(cmd)
    return Pattern(pattern.inputs, out, pattern.outputs)


def pauli_nodes(pattern: Pattern) -> list[tuple[int, cl.SignedPauli]]:
    """Measured nodes whose basis is a signed Pauli axis, in measurement order."""
    _require_standard(pattern)
    found = []
    for cmd in pattern.measurements:
        p = cl.pauli_axis(cmd.plane, cmd.angle)
        if p is not None:
            found.append((cmd.node, p))
    return found


def absorb_clifford(g: int, cmd: M, s: frozenset[int], t: frozenset[int]) -> M:
    """Fold a decoration ``g`` (extended index) applied before ``cmd`` into it.

    The basis rotates as in :func:`~lcmbqc.clifford.rotate_measurement` and
    the domains follow the Paulis they stand for: ``g^dagger X g`` and
    ``g^dagger Z g`` land on the s-domain (X), the t-domain (Z) or both (Y).
    """
    if g == cl.IDENTITY:
        return M(cmd.node, cmd.plane, cmd.angle, s, t)
    plane, angle = cl.rotate_measurement(g, cmd.plane, cmd.angle, extended=True)
    new_s: frozenset[int] = frozenset()
    new_t: frozenset[int] = frozenset()
    for dom, axis in ((s, Axis.X), (t, Axis.Z)):
        img = cl.CONJ[g][axis].axis
        if img in (Axis.X, Axis.Y):
            new_s ^= dom
        if img in (Axis.Z, Axis.Y):
            new_t ^= dom
    return M(cmd.node, plane, angle, new_s, new_t)


def perform_pauli_measurements(pattern: Pattern) -> Pattern:
    """Execute every Pauli measurement classically on the graph-state simulator.

    The pattern is standardised and signal-shifted first, which leaves the
    Pauli measurements free of domains. Their outcomes are fixed (0 unless
    the state forces 1) and substituted into the remaining domains; an outcome
    of 1 becomes the constant signal :data:`~lcmbqc.command.ONE`. The
    surviving nodes are re-prepared from the decorated graph: N, E, then C
    commands for the outputs, followed by the remaining measurements (with
    their decorations folded in) and corrections.

    Input nodes are taken to be |+>, so the result has no inputs. A pattern
    without Pauli measurements comes back standardised and shifted only.
    """
    p = shift_signals(standardize(pattern))
    paulis = pauli_nodes(p)
    if not paulis:
        return p
    state = DecoratedGraphState(p.inputs)
    for cmd in p.commands:
        if isinstance(cmd, N):
            state.add_node(cmd.node)
        elif isinstance(cmd, E):
            state.add_edge(*cmd.pair)
        elif isinstance(cmd, C):
            state.apply_local_clifford(cmd.node, cl.from_command_index(cmd.k))
    results: dict[int, int] = {}
    for node, sp in paulis:
        flip = 0 if sp.sign > 0 else 1
        outcome = state.measure_pauli(node, sp.axis, prefer=flip)
        results[node] = outcome.s ^ flip
    state.reduce_decorations()

    def resolve(dom: frozenset[int]) -> frozenset[int]:
        out: set[int] = set()
        for j in dom:
            if j in results:
                if results[j]:
                    out ^= {ONE}
            else:
                out ^= {j}
        return frozenset(out)

    outputs = set(p.outputs)
    cmds: list[Command] = [c for c in state.to_commands() if not isinstance(c, C) or c.node in outputs]
    for cmd in p.commands:
        if isinstance(cmd, M) and cmd.node not in results:
            cmds.append(absorb_clifford(state.vop[cmd.node], cmd, resolve(cmd.s_domain), resolve(cmd.t_domain)))
        elif isinstance(cmd, (X, Z)):
            dom = resolve(cmd.domain)
            if dom:
                cmds.append(type(cmd)(cmd.node, dom))
    return Pattern([], cmds, p.outputs)


def reduce_space(pattern: Pattern) -> Pattern:
    """Delay every preparation until a neighbour is about to be measured.

    Measurements are ordered greedily: among those whose domains are already
    measured, take the one needing the fewest new preparations (ties by
    original position).
    """
    _require_standard(pattern)
    check(pattern)
    adj: dict[int, set[int]] = {v: set() for v in pattern.nodes}
    edge_cmds: dict[frozenset[int], list[E]] = {}
    pre_c: dict[int, list[C]] = {}
    meas: list[M] = []
    tail: list[Command] = []
    for cmd in pattern.commands:
        if isinstance(cmd, E):
            a, b = cmd.pair
            adj[a].add(b)
            adj[b].add(a)
            edge_cmds.setdefault(frozenset(cmd.pair), []).append(cmd)
        elif isinstance(cmd, M):
            meas.append(cmd)
        elif isinstance(cmd, C) and not meas:
            pre_c.setdefault(cmd.node, []).append(cmd)
        elif not isinstance(cmd, N):
            tail.append(cmd)

    out: list[Command] = []
    prepared = set(pattern.inputs)
    done_edges: set[frozenset[int]] = set()

    def prepare(v: int) -> None:
        if v not in prepared:
            prepared.add(v)
            out.append(N(v))

    def entangle(v: int) -> None:
        for w in sorted(adj[v]):
            key = frozenset((v, w))
            if key not in done_edges:
                done_edges.add(key)
                out.extend(edge_cmds[key])

    measured: set[int] = set()
    remaining = list(meas)
    while remaining:
        best = None
        for pos, cmd in enumerate(remaining):
            if any(s != ONE and s not in measured for s in cmd.signals):
                continue
            cost = sum(1 for u in adj[cmd.node] | {cmd.node} if u not in prepared)
            if best is None or cost < best[0]:
                best = (cost, pos)
                if cost == 0:
                    break
        cmd = remaining.pop(best[1])
        v = cmd.node
        for u in sorted(adj[v] | {v}):
            prepare(u)
        entangle(v)
        out.extend(pre_c.pop(v, []))
        out.append(cmd)
        measured.add(v)
    for v in pattern.nodes:
        prepare(v)
    for v in pattern.nodes:
        entangle(v)
    for v in pattern.nodes:
        out.extend(pre_c.pop(v, []))
    return Pattern(pattern.inputs, out + tail, pattern.outputs)


def parallelize_commands(pattern: Pattern) -> Pattern:
    """Group measurements into dependency rounds.

    Measurements are reordered round by round (original order within a
    round); the rounds are stored on the result as ``layers``.
    """
    _require_standard(pattern)
    layers = measurement_layers(pattern)
    rank = {v: i for i, layer in enumerate(layers) for v in layer}
    meas = sorted(pattern.measurements, key=lambda c: rank[c.node])
    it = iter(meas)
    cmds = [next(it) if isinstance(c, M) else c for c in pattern.commands]
    result = Pattern(pattern.inputs, cmds, pattern.outputs)
    result.layers = [[c.node for c in meas if rank[c.node] == i] for i in range(len(layers))]
    return result


# -- pass pipeline -----------------------------------------------------------


@dataclass(frozen=True)
class PassReport:
    name: str
    commands_before: int
    commands_after: int
    space_before: int
    space_after: int
    depth_before: int
    depth_after: int
    seconds: float

    HEADER = "pass\tcommands_before\tcommands_after\tspace_before\tspace_after\tdepth_before\tdepth_after\tseconds"

    def to_tsv(self) -> str:
        return "\t".join(
            [
                self.name,
                str(self.commands_before),
                str(self.commands_after),
                str(self.space_before),
                str(self.space_after),
                str(self.depth_before),
                str(self.depth_after),
                f"{self.seconds:.6f}",
            ]
        )


PASSES: dict[str, Callable[[Pattern], Pattern]] = {
    "standardize": standardize,
    "shift": shift_signals,
    "pauli": perform_pauli_measurements,
    "space": reduce_space,
    "parallel": parallelize_commands,
}


class UnknownPassError(ValueError):
    pass


def run_passes(pattern: Pattern, names: Iterable[str]) -> tuple[Pattern, list[PassReport]]:
    """Apply the named passes in order, reporting metrics around each one."""
    names = list(names)
    for name in names:
        if name not in PASSES:
            raise UnknownPassError(f"unknown pass {name!r}; choose from {', '.join(PASSES)}")
    reports = []
    for name in names:
        before = (len(pattern), max_space(pattern), depth(pattern))
        start = time.perf_counter()
        pattern = PASSES[name](pattern)
        elapsed = time.perf_counter() - start
        reports.append(PassReport(name, before[0], len(pattern), before[1], max_space(pattern), before[2], depth(pattern), elapsed))
    return pattern, reports
