"""Single-qubit Clifford group modulo global phase.

Two indexings are used:

* the *command index* ``k`` in 0..6 of the ``C`` command, naming the
  decorations H, S, Z, HS, HZ, SZ, HSZ (matrix products in written order, so
  ``HS`` applies S first);
* the *extended index* 0..23 of the full group. Extended indices 0..7 are
  I followed by the seven decorations, i.e. ``extended = k + 1``.

Conjugation follows the convention ``C^dagger P C`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .command import Axis, Plane

PAULI_AXES = (Axis.X, Axis.Y, Axis.Z)

_I2 = np.eye(2, dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI_MATRICES = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}

_LETTERS = {"H": _H, "S": _S, "Z": _Z, "X": PAULI_MATRICES[Axis.X]}

#: Decoration names of the command indices 0..6.
COMMAND_NAMES = ("H", "S", "Z", "HS", "HZ", "SZ", "HSZ")

IDENTITY = 0


@dataclass(frozen=True)
class SignedPauli:
    sign: int
    axis: Axis

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.axis.value


def _sp(text: str) -> SignedPauli:
    sign = -1 if text.startswith("-") else 1
    return SignedPauli(sign, Axis(text.lstrip("+-")))


# C^k dagger . P . C^k for P = X, Y, Z, transcribed from the decoration table.
TABLE = {
    0: tuple(map(_sp, ("Z", "-Y", "X"))),
    1: tuple(map(_sp, ("-Y", "X", "Z"))),
    2: tuple(map(_sp, ("-X", "-Y", "Z"))),
    3: tuple(map(_sp, ("Z", "-X", "-Y"))),
    4: tuple(map(_sp, ("Z", "Y", "-X"))),
    5: tuple(map(_sp, ("Y", "-X", "Z"))),
    6: tuple(map(_sp, ("Z", "X", "Y"))),
}


def _word_matrix(word: str) -> np.ndarray:
    m = _I2
    for letter in word:
        m = m @ _LETTERS[letter]
    return m


def _key(m: np.ndarray) -> tuple:
    flat = m.ravel()
    pivot = flat[np.flatnonzero(np.abs(flat) > 1e-9)[0]]
    m = flat * (abs(pivot) / pivot)
    return tuple(np.round(np.concatenate([m.real, m.imag]), 8) + 0.0)


def _build_group() -> tuple[list[str], list[np.ndarray]]:
    names = ["I", *COMMAND_NAMES]
    mats = [_word_matrix(w if w != "I" else "") for w in names]
    seen = {_key(m): i for i, m in enumerate(mats)}
    frontier = list(range(len(mats)))
    while frontier:
        nxt = []
        for i in frontier:
            for letter in "HS":
                m = mats[i] @ _LETTERS[letter]
                k = _key(m)
                if k not in seen:
                    seen[k] = len(mats)
                    name = names[i] + letter if names[i] != "I" else letter
                    names.append(name)
                    mats.append(m)
                    nxt.append(seen[k])
        frontier = nxt
    assert len(mats) == 24
    return names, mats


NAMES, MATRICES = _build_group()
_INDEX = {_key(m): i for i, m in enumerate(MATRICES)}


def index_of(matrix: np.ndarray) -> int:
    """Extended index of a 2x2 Clifford unitary (any global phase)."""
    try:
        return _INDEX[_key(np.asarray(matrix, dtype=complex))]
    except KeyError:
        raise ValueError("matrix is not a single-qubit Clifford") from None


def _signed_pauli_of(m: np.ndarray) -> SignedPauli:
    for axis, p in PAULI_MATRICES.items():
        for sign in (1, -1):
            if np.allclose(m, sign * p, atol=1e-9):
                return SignedPauli(sign, axis)
    raise AssertionError("not a signed Pauli")


MUL = [[index_of(a @ b) for b in MATRICES] for a in MATRICES]
INV = [index_of(m.conj().T) for m in MATRICES]
# CONJ[g][axis] = g^dagger P g ; IMAGE[g][axis] = g P g^dagger
CONJ = [{ax: _signed_pauli_of(m.conj().T @ PAULI_MATRICES[ax] @ m) for ax in PAULI_AXES} for m in MATRICES]
IMAGE = [{ax: _signed_pauli_of(m @ PAULI_MATRICES[ax] @ m.conj().T) for ax in PAULI_AXES} for m in MATRICES]

#: Extended indices of the eight H^a S^b Z^c decorations (identity included).
DECORATIONS = frozenset(range(8))


def from_command_index(k: int) -> int:
    if not 0 <= k <= 6:
        raise ValueError(f"command index out of range: {k}")
    return k + 1


def to_command_index(g: int) -> int | None:
    """Command index of extended element ``g``; ``None`` for the identity."""
    if g not in DECORATIONS:
        raise ValueError(f"{NAMES[g]} is not an H^a S^b Z^c decoration")
    return None if g == IDENTITY else g - 1


def conjugate_pauli(k: int, p: Axis) -> SignedPauli:
    """Return ``C_k^dagger p C_k`` for command index ``k`` (table lookup)."""
    return TABLE[k][PAULI_AXES.index(p)]


def clifford_matrix(k: int) -> np.ndarray:
    """Matrix of the decoration with command index ``k``."""
    return _word_matrix(COMMAND_NAMES[k]).copy()


def compose_clifford(a: int, b: int) -> int:
    """Extended index of ``a @ b`` (``b`` acts first), modulo phase."""
    return MUL[a][b]


def basis_vector(plane: Plane, angle: float) -> dict[Axis, float]:
    """Bloch vector of the +1 eigenstate measured by (plane, angle)."""
    u, v = plane.axes
    vec = {ax: 0.0 for ax in PAULI_AXES}
    vec[u] = math.cos(math.pi * angle)
    vec[v] = math.sin(math.pi * angle)
    return vec


def projector(plane: Plane, angle: float, outcome: int = 0) -> np.ndarray:
    """Projector onto outcome ``outcome`` of the (plane, angle) measurement."""
    vec = basis_vector(plane, angle)
    sign = -1 if outcome else 1
    op = sum(vec[ax] * PAULI_MATRICES[ax] for ax in PAULI_AXES)
    return (_I2 + sign * op) / 2


def rotate_measurement(g: int, plane: Plane, angle: float, extended: bool = False) -> tuple[Plane, float]:
    """Rotate a measurement basis through a Clifford.

    Returns ``(plane', angle')`` such that measuring (plane', angle') equals
    measuring (plane, angle) after applying the Clifford, i.e.
    ``C^dagger P(plane, angle) C == P(plane', angle')``. ``g`` is a command
    index unless ``extended`` is set. The map is affine in the angle, so Pauli
    angles stay exact.
    """
    conj = CONJ[g] if extended else CONJ[from_command_index(g)]
    u, v = plane.axes
    cu, cv = conj[u], conj[v]
    new_plane = Plane.from_axes(cu.axis, cv.axis)
    nu, _ = new_plane.axes
    # r' = cos*cu + sin*cv ; rewrite as cos(b)*nu + sin(b)*nv
    if cu.axis == nu:
        a = angle
        s_cos, s_sin = cu.sign, cv.sign
    else:
        a = 0.5 - angle
        s_cos, s_sin = cv.sign, cu.sign
    if s_cos > 0 and s_sin > 0:
        b = a
    elif s_cos > 0:
        b = -a
    elif s_sin > 0:
        b = 1 - a
    else:
        b = a + 1
    return new_plane, b % 2


def adapt_angle(plane: Plane, angle: float, s: int, t: int) -> float:
    """Angle of (plane, angle) after conjugation by ``X**s Z**t``.

    Domains act the same way in every plane: the s-domain applies X and the
    t-domain applies Z just before the measurement. In XY this is the usual
    ``(-1)**s * angle + t``.
    """
    if plane is Plane.XY:
        return (-1) ** s * angle + t
    if plane is Plane.XZ:
        return (-1) ** (s + t) * angle + s
    return (-1) ** t * angle + s


def pauli_axis(plane: Plane, angle: float, tol: float = 1e-9) -> SignedPauli | None:
    """Signed Pauli measured by (plane, angle), or ``None`` if not Pauli."""
    a = angle % 2
    u, v = plane.axes
    for q, (axis, sign) in enumerate(((u, 1), (v, 1), (u, -1), (v, -1))):
        target = q / 2
        if min(abs(a - target), abs(a - target - 2), abs(a - target + 2)) < tol:
            return SignedPauli(sign, axis)
    return None
