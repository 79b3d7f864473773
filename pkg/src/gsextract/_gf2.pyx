# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled GF(2) Gauss-Jordan elimination over word-packed rows.

Rows arrive as Python ints (bit ``c`` = column ``c``) and are packed into
``uint64`` words, little-endian, so column ``c`` lives in word ``c // 64``.
Only the low ``nbits`` columns are used as pivots; higher bits ride along as
payload (used for combination tracking and affine right-hand sides).
"""

import numpy as np

from libc.stdint cimport uint64_t

cdef uint64_t _MASK64 = 0xFFFFFFFFFFFFFFFF


cdef Py_ssize_t _eliminate(uint64_t[:, ::1] m, Py_ssize_t nbits, Py_ssize_t[::1] pivots) noexcept nogil:
    cdef Py_ssize_t nrows = m.shape[0]
    cdef Py_ssize_t nwords = m.shape[1]
    cdef Py_ssize_t r = 0, col, i, j, w, word
    cdef uint64_t bit, tmp
    for col in range(nbits):
        if r == nrows:
            break
        word = col >> 6
        bit = (<uint64_t>1) << (col & 63)
        i = r
        while i < nrows and not (m[i, word] & bit):
            i += 1
        if i == nrows:
            continue
        if i != r:
            for w in range(nwords):
                tmp = m[i, w]
                m[i, w] = m[r, w]
                m[r, w] = tmp
        for j in range(nrows):
            if j != r and (m[j, word] & bit):
                for w in range(word, nwords):
                    m[j, w] ^= m[r, w]
        pivots[r] = col
        r += 1
    return r


def rref(rows, Py_ssize_t nbits):
    """Gauss-Jordan reduce ``rows`` on their low ``nbits`` columns.

    Returns ``(reduced, pivots)``: the first ``len(pivots)`` reduced rows carry
    the listed pivot columns, the remaining rows have an all-zero key part.
    """
    cdef Py_ssize_t nrows = len(rows)
    if nrows == 0:
        return [], []
    cdef Py_ssize_t maxbits = nbits
    for row in rows:
        if row < 0:
            raise ValueError("rows must be non-negative integers")
        if row.bit_length() > maxbits:
            maxbits = row.bit_length()
    cdef Py_ssize_t nwords = max(1, (maxbits + 63) // 64)
    m_arr = np.zeros((nrows, nwords), dtype=np.uint64)
    cdef uint64_t[:, ::1] m = m_arr
    cdef Py_ssize_t i, w
    for i in range(nrows):
        row = rows[i]
        for w in range(nwords):
            m[i, w] = <uint64_t>(row & _MASK64)
            row >>= 64
    piv_arr = np.empty(nrows, dtype=np.intp)
    cdef Py_ssize_t[::1] pivots = piv_arr
    cdef Py_ssize_t rank
    with nogil:
        rank = _eliminate(m, nbits, pivots)
    out = []
    for i in range(nrows):
        value = 0
        for w in range(nwords - 1, -1, -1):
            value = (value << 64) | m[i, w]
        out.append(value)
    return out, [int(pivots[i]) for i in range(rank)]


def rank(rows, nbits):
    """Rank over GF(2) of ``rows`` restricted to their low ``nbits`` columns."""
    # Python ints here: a C shift would wrap for nbits >= 32
    mask = (1 << int(nbits)) - 1
    return len(rref([row & mask for row in rows], nbits)[1])
