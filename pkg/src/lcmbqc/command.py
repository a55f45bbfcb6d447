"""Measurement-calculus commands.

Commands are listed in execution order: the first command of a pattern is
applied first. (Textbook notation writes patterns right-to-left; this package
never does.)

Angles are stored in units of pi, so ``angle=0.25`` means pi/4.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import ClassVar, Iterable, Union

#: Reserved signal that always evaluates to 1. It lets a correction be applied
#: unconditionally while keeping the X/Z command kinds unchanged.
ONE = -1


class Axis(enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


class Plane(enum.Enum):
    """Measurement plane.

    The measured direction for angle ``a`` is ``cos(a*pi) * u + sin(a*pi) * v``
    where ``(u, v)`` is :attr:`axes`.
    """

    XY = "XY"
    XZ = "XZ"
    YZ = "YZ"

    @property
    def axes(self) -> tuple[Axis, Axis]:
        """(cos axis, sin axis) of the plane."""
        return _PLANE_AXES[self]

    @classmethod
    def from_axes(cls, a: Axis, b: Axis) -> Plane:
        pair = {a, b}
        for plane, axes in _PLANE_AXES.items():
            if set(axes) == pair:
                return plane
        raise ValueError(f"no plane spanned by {a} and {b}")


_PLANE_AXES = {
    Plane.XY: (Axis.X, Axis.Y),
    Plane.XZ: (Axis.Z, Axis.X),
    Plane.YZ: (Axis.Z, Axis.Y),
}


def domain(nodes: Iterable[int] = ()) -> frozenset[int]:
    """Build a signal domain; repeated members cancel (GF(2) sum)."""
    out: set[int] = set()
    for n in nodes:
        out ^= {n}
    return frozenset(out)


@dataclass(frozen=True)
class N:
    """Prepare ``node`` in |+>."""

    node: int
    kind: ClassVar[str] = "N"

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.node,)


@dataclass(frozen=True)
class E:
    """Controlled-Z between the two nodes."""

    pair: tuple[int, int]
    kind: ClassVar[str] = "E"

    def __post_init__(self) -> None:
        object.__setattr__(self, "pair", tuple(self.pair))

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.pair


@dataclass(frozen=True)
class M:
    """Measure ``node`` in ``plane`` at ``angle`` (units of pi).

    The effective XY angle is ``(-1)**s * angle + t`` where ``s``/``t`` are the
    parities of the recorded outcomes in ``s_domain``/``t_domain``.
    """

    node: int
    plane: Plane = Plane.XY
    angle: float = 0.0
    s_domain: frozenset[int] = field(default_factory=frozenset)
    t_domain: frozenset[int] = field(default_factory=frozenset)
    kind: ClassVar[str] = "M"

    def __post_init__(self) -> None:
        object.__setattr__(self, "s_domain", frozenset(self.s_domain))
        object.__setattr__(self, "t_domain", frozenset(self.t_domain))
        if isinstance(self.plane, str):
            object.__setattr__(self, "plane", Plane(self.plane))

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.node,)

    @property
    def signals(self) -> frozenset[int]:
        return self.s_domain | self.t_domain


@dataclass(frozen=True)
class X:
    """Pauli X correction on ``node``, applied when the domain parity is 1."""

    node: int
    domain: frozenset[int] = field(default_factory=frozenset)
    kind: ClassVar[str] = "X"

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", frozenset(self.domain))

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.node,)

    @property
    def signals(self) -> frozenset[int]:
        return self.domain


@dataclass(frozen=True)
class Z:
    """Pauli Z correction on ``node``, applied when the domain parity is 1."""

    node: int
    domain: frozenset[int] = field(default_factory=frozenset)
    kind: ClassVar[str] = "Z"

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", frozenset(self.domain))

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.node,)

    @property
    def signals(self) -> frozenset[int]:
        return self.domain


@dataclass(frozen=True)
class C:
    """Local Clifford decoration ``k`` (0..6, see :mod:`lcmbqc.clifford`)."""

    node: int
    k: int
    kind: ClassVar[str] = "C"

    def __post_init__(self) -> None:
        if not 0 <= self.k <= 6:
            raise ValueError(f"Clifford command index must be in 0..6, got {self.k}")

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.node,)


Command = Union[N, E, M, X, Z, C]


def signals_of(cmd: Command) -> frozenset[int]:
    """Signals a command depends on (empty for N, E, C)."""
    return getattr(cmd, "signals", frozenset())


def parity(dom: Iterable[int], outcomes: dict[int, int]) -> int:
    """Parity of the outcomes named in ``dom``; :data:`ONE` counts as 1."""
    p = 0
    for n in dom:
        p ^= 1 if n == ONE else outcomes[n]
    return p
