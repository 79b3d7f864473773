"""GF(2) linear algebra on int bitsets, backed by the elimination kernel.

The kernel is chosen at import: the compiled ``_gf2`` extension when it is
importable, otherwise the pure-Python ``_gf2_py``.  Setting the environment
variable ``GSEXTRACT_BACKEND=python`` forces the fallback.

Every routine here treats a row as an int whose low ``nbits`` bits are the
"key" (the part that is eliminated) and whose higher bits are payload that is
carried along through the row operations.
"""

from __future__ import annotations

import os
from typing import Sequence

from . import _gf2_py

if os.environ.get("GSEXTRACT_BACKEND", "").lower() == "python":
    _kernel = _gf2_py
    BACKEND = "python"
else:
    try:
        from . import _gf2 as _kernel  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _kernel = _gf2_py
        BACKEND = "python"


def rref(rows: Sequence[int], nbits: int) -> tuple[list[int], list[int]]:
    return _kernel.rref(rows, nbits)


def rank(rows: Sequence[int], nbits: int) -> int:
    return _kernel.rank(rows, nbits)


def parity(x: int) -> int:
    return x.bit_count() & 1


def dependencies(vectors: Sequence[int], nbits: int) -> list[int]:
    """Basis of index sets ``c`` with ``XOR_{k in c} vectors[k] == 0``.

    Each returned int is a bitmask over positions in ``vectors``.  The number
    of returned masks is ``len(vectors) - rank(vectors)``.
    """
    keymask = (1 << nbits) - 1
    rows = [(v & keymask) | (1 << (nbits + k)) for k, v in enumerate(vectors)]
    reduced, pivots = rref(rows, nbits)
    return [row >> nbits for row in reduced[len(pivots):]]


class Span:
    """A reduced basis for a span of key vectors with tracked combinations.

    ``reduce(v)`` returns ``(residual, combo)``: ``residual`` is zero exactly
    when ``v`` lies in the span, and then ``combo`` is a bitmask over the
    original input vectors whose XOR equals ``v``.
    """

    def __init__(self, vectors: Sequence[int], nbits: int):
        self.nbits = nbits
        self.size = len(vectors)
        keymask = (1 << nbits) - 1
        rows = [(v & keymask) | (1 << (nbits + k)) for k, v in enumerate(vectors)]
        reduced, pivots = rref(rows, nbits)
        self.rank = len(pivots)
        self._basis = list(zip(pivots, reduced[: self.rank]))
        self.dependencies = [row >> nbits for row in reduced[self.rank:]]

    def reduce(self, v: int) -> tuple[int, int]:
        keymask = (1 << self.nbits) - 1
        row = v & keymask
        for col, b in self._basis:
            if (row >> col) & 1:
                row ^= b
        return row & keymask, row >> self.nbits

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0


def affine_rank(equations: Sequence[tuple[int, int]], nvars: int) -> int | None:
    """Rank of the system ``parity(mask & s) == rhs``, or None if inconsistent."""
    rows = [(mask & ((1 << nvars) - 1)) | (rhs << nvars) for mask, rhs in equations]
    reduced, pivots = rref(rows, nvars)
    for row in reduced[len(pivots):]:
        if row:
            return None
    return len(pivots)


def affine_solve(equations: Sequence[tuple[int, int]], nvars: int) -> int | None:
    """One solution ``s`` (bitmask) of the affine system, or None.

    Free variables are set to zero.
    """
    rows = [(mask & ((1 << nvars) - 1)) | (rhs << nvars) for mask, rhs in equations]
    reduced, pivots = rref(rows, nvars)
    for row in reduced[len(pivots):]:
        if row:
            return None
    s = 0
    for col, row in zip(pivots, reduced):
        if row >> nvars:
            s |= 1 << col
    return s
