"""Phase-tracked Pauli strings in the binary symplectic (x|z) representation.

A :class:`PauliString` on ``n`` qubits stores two bitsets ``x`` and ``z``
(qubit ``q`` is bit ``q``) and a phase exponent ``phase`` mod 4.  The operator
is ``i**phase * P_0 (x) P_1 (x) ... (x) P_{n-1}`` where the letter on qubit
``q`` is I, X, Z or Y for ``(x_q, z_q)`` = (0,0), (1,0), (0,1), (1,1).  Y is the
Hermitian letter, so a Hermitian string has an even phase.

Text form: an optional sign prefix (``+``, ``-``, ``+i``, ``-i``) followed by
one letter per qubit, qubit 0 first, e.g. ``"+XZIZ"`` or ``"-YXXY"``.  ``_``
is accepted as a synonym of ``I`` on input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import gf2

_LETTERS = "IXZY"
_SIGNS = {0: "+", 1: "+i", 2: "-", 3: "-i"}


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise ValueError("x/z bits outside the register")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliString:
        """The one-qubit operator ``letter`` placed on ``qubit`` of ``n``."""
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for {n} qubits")
        code = _LETTERS.index(letter.upper())
        bit = 1 << qubit
        return cls(n, bit if code & 1 else 0, bit if code & 2 else 0)

    @classmethod
    def from_letters(cls, letters: dict[int, str], n: int, phase: int = 0) -> PauliString:
        x = z = 0
        for q, letter in letters.items():
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for {n} qubits")
            code = _LETTERS.index(letter.upper())
            if code & 1:
                x |= 1 << q
            if code & 2:
                z |= 1 << q
        return cls(n, x, z, phase)

    @classmethod
    def parse(cls, text: str) -> PauliString:
        s = text.strip()
        phase = 0
        if s.startswith("+i") or s.startswith("-i"):
            phase = 1 if s[0] == "+" else 3
            s = s[2:]
        elif s and s[0] in "+-":
            phase = 0 if s[0] == "+" else 2
            s = s[1:]
        x = z = 0
        for q, ch in enumerate(s):
            ch = "I" if ch == "_" else ch.upper()
            if ch not in _LETTERS:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
            code = _LETTERS.index(ch)
            if code & 1:
                x |= 1 << q
            if code & 2:
                z |= 1 << q
        return cls(len(s), x, z, phase)

    # -- rendering ----------------------------------------------------------

    def letter(self, q: int) -> str:
        return _LETTERS[((self.x >> q) & 1) | (((self.z >> q) & 1) << 1)]

    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def __str__(self) -> str:
        return _SIGNS[self.phase] + self.letters()

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    # -- algebra ------------------------------------------------------------

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def is_identity(self) -> bool:
        return not (self.x or self.z)

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings."""
        if self.phase % 2:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase == 0 else -1

    @property
    def symplectic(self) -> int:
        """The (x|z) vector packed as ``x | z << n``; phase dropped."""
        return self.x | (self.z << self.n)

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __neg__(self) -> PauliString:
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def with_phase(self, phase: int) -> PauliString:
        return PauliString(self.n, self.x, self.z, phase)

    def commutes(self, other: PauliString) -> bool:
        return commutes(self, other)


def _check(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise DimensionError(f"{a.n}-qubit and {b.n}-qubit operands")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product ``a * b`` including the phase mod 4."""
    _check(a, b)
    x = a.x ^ b.x
    z = a.z ^ b.z
    # Y = iXZ per qubit: rewrite both factors as i^(x.z) X^x Z^z, move Z^z1 past
    # X^x2 (sign (-1)^(z1.x2)), then fold the result back to letters.
    phase = (
        a.phase
        + b.phase
        + (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        + 2 * (a.z & b.x).bit_count()
        - (x & z).bit_count()
    )
    return PauliString(a.n, x, z, phase)


def product(ops: Iterable[PauliString], n: int) -> PauliString:
    out = PauliString.identity(n)
    for op in ops:
        out = multiply(out, op)
    return out


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the symplectic form x_a.z_b + x_b.z_a vanishes mod 2."""
    _check(a, b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


def restrict(p: PauliString, qubits: Sequence[int]) -> PauliString:
    """Entries of ``p`` at ``qubits``, re-indexed densely in the given order.

    The phase is carried over unchanged.
    """
    if len(set(qubits)) != len(qubits):
        raise ValueError("duplicate qubit in subset")
    x = z = 0
    for k, q in enumerate(qubits):
        if not 0 <= q < p.n:
            raise IndexError(f"qubit {q} out of range for {p.n} qubits")
        x |= ((p.x >> q) & 1) << k
        z |= ((p.z >> q) & 1) << k
    return PauliString(len(qubits), x, z, p.phase)


def embed(p: PauliString, qubits: Sequence[int], n: int) -> PauliString:
    """Inverse of :func:`restrict`: place ``p`` onto ``qubits`` of an n-register."""
    if len(qubits) != p.n:
        raise DimensionError("subset size does not match operator size")
    x = z = 0
    for k, q in enumerate(qubits):
        x |= ((p.x >> k) & 1) << q
        z |= ((p.z >> k) & 1) << q
    return PauliString(n, x, z, p.phase)


def gf2_rank(rows: Sequence[PauliString]) -> int:
    """Rank over GF(2) of the (x|z) rows; phases are ignored."""
    if not rows:
        return 0
    n = rows[0].n
    for r in rows:
        if r.n != n:
            raise DimensionError("rows act on different numbers of qubits")
    return gf2.rank([r.symplectic for r in rows], 2 * n)
