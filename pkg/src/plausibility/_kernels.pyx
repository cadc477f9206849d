# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same API and results as ``_kernels_py``.

Bitset rows are packed into uint64 words; masks and measure values must fit
in 64 bits (the selector in ``kernels`` falls back otherwise).
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()


cdef extern from *:
    int __builtin_ctzll(unsigned long long)


cdef inline Py_ssize_t _ctz(uint64_t x):
    return __builtin_ctzll(x)


def subset_matrix(masks):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] m = np.asarray(masks, dtype=np.uint64)
    cdef Py_ssize_t n = m.shape[0], i, j
    out = np.zeros((n, n), dtype=np.uint8)
    cdef uint8_t[:, :] o = out
    cdef uint64_t a
    for i in range(n):
        a = m[i]
        for j in range(n):
            if (a & ~m[j]) == 0:
                o[i, j] = 1
    return out.view(bool)


cdef _pack(cnp.ndarray mat, Py_ssize_t n, Py_ssize_t words):
    packed = np.packbits(np.ascontiguousarray(mat, dtype=bool), axis=1, bitorder="little")
    pad = np.zeros((n, words * 8), dtype=np.uint8)
    pad[:, :packed.shape[1]] = packed
    return pad.view("<u8").astype(np.uint64)


cdef _unpack(cnp.ndarray rows, Py_ssize_t n):
    as_bytes = rows.astype("<u8").view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :n].astype(bool)


def closure(weak_base, strict_base):
    cdef Py_ssize_t n = weak_base.shape[0]
    cdef Py_ssize_t words = (n + 63) // 64
    cdef Py_ssize_t i, j, k, a, b, kw
    cdef uint64_t kb, bits, low
    if n == 0:
        empty = np.zeros((0, 0), dtype=bool)
        return empty, empty.copy()

    wa = _pack(weak_base, n, words)
    cdef uint64_t[:, :] w = wa
    for i in range(n):
        w[i, i >> 6] |= (<uint64_t>1) << (i & 63)

    for k in range(n):
        kw = k >> 6
        kb = (<uint64_t>1) << (k & 63)
        for i in range(n):
            if w[i, kw] & kb:
                for j in range(words):
                    w[i, j] |= w[k, j]

    sb = _pack(strict_base, n, words)
    cdef uint64_t[:, :] s = sb
    tw = np.zeros((n, words), dtype=np.uint64)
    cdef uint64_t[:, :] t = tw
    for a in range(n):
        for kw in range(words):
            bits = s[a, kw]
            while bits:
                low = bits & (~bits + 1)
                b = kw * 64 + _ctz(low)
                for j in range(words):
                    t[a, j] |= w[b, j]
                bits ^= low

    ra = np.zeros((n, words), dtype=np.uint64)
    cdef uint64_t[:, :] r = ra
    for i in range(n):
        for kw in range(words):
            bits = w[i, kw]
            while bits:
                low = bits & (~bits + 1)
                a = kw * 64 + _ctz(low)
                for j in range(words):
                    r[i, j] |= t[a, j]
                bits ^= low
    return _unpack(wa, n), _unpack(ra, n)


def measure_relation(values):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] v = np.asarray(values, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0], i, j
    weak = np.zeros((n, n), dtype=np.uint8)
    strict = np.zeros((n, n), dtype=np.uint8)
    cdef uint8_t[:, :] wv = weak
    cdef uint8_t[:, :] sv = strict
    cdef int64_t a
    for i in range(n):
        a = v[i]
        for j in range(n):
            if a <= v[j]:
                wv[i, j] = 1
                if a < v[j]:
                    sv[i, j] = 1
    return weak.view(bool), strict.view(bool)


def pivot(list rows, Py_ssize_t r, Py_ssize_t c):
    cdef list prow = rows[r]
    cdef list row
    cdef Py_ssize_t i, j, k, m = len(prow), nrows = len(rows)
    cdef object pv = prow[c], f
    if pv != 1:
        prow = [v / pv for v in prow]
        rows[r] = prow
    cdef list nz = [j for j in range(m) if prow[j]]
    cdef Py_ssize_t nnz = len(nz)
    for i in range(nrows):
        if i == r:
            continue
        row = rows[i]
        f = row[c]
        if f:
            for k in range(nnz):
                j = nz[k]
                row[j] = row[j] - f * prow[j]
