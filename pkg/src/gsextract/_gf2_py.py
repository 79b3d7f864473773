"""Pure-Python GF(2) elimination over int bitsets.

Same contract as the compiled ``_gf2`` module; used when the extension is not
built or when ``GSEXTRACT_BACKEND=python`` is set.
"""

from __future__ import annotations

from typing import Sequence


def rref(rows: Sequence[int], nbits: int) -> tuple[list[int], list[int]]:
    """Gauss-Jordan reduce ``rows`` on their low ``nbits`` columns.

    Pivot columns are chosen in increasing column order, matching the compiled
    kernel exactly (same reduced rows, same order).
    """
    work = list(rows)
    if any(r < 0 for r in work):
        raise ValueError("rows must be non-negative integers")
    nrows = len(work)
    pivots: list[int] = []
    r = 0
    keymask = (1 << nbits) - 1
    # Visit only columns that are actually set somewhere; equivalent to a
    # full column sweep but skips empty columns.
    remaining = 0
    for row in work:
        remaining |= row & keymask
    while remaining and r < nrows:
        low = remaining & -remaining
        col = low.bit_length() - 1
        remaining ^= low
        i = r
        while i < nrows and not (work[i] & low):
            i += 1
        if i == nrows:
            continue
        work[r], work[i] = work[i], work[r]
        prow = work[r]
        for j in range(nrows):
            if j != r and work[j] & low:
                work[j] ^= prow
        pivots.append(col)
        r += 1
        remaining = 0
        for row in work[r:]:
            remaining |= row & keymask
        remaining &= ~((low << 1) - 1)
    return work, pivots


def rank(rows: Sequence[int], nbits: int) -> int:
    """Rank over GF(2) of ``rows`` restricted to their low ``nbits`` columns."""
    mask = (1 << nbits) - 1
    return len(rref([row & mask for row in rows], nbits)[1])
