"""Pure-Python kernels; reference semantics for the compiled ``_kernels``.

Relations are ``n x n`` numpy boolean matrices, ``M[i, j]`` meaning
"event i is related to event j". Internally rows are Python-int bitsets.
"""

import numpy as np


def _row_to_int(row):
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def _ints_to_matrix(rows, n):
    nbytes = (n + 7) // 8
    out = np.zeros((n, n), dtype=bool)
    for i, bits in enumerate(rows):
        buf = np.frombuffer(bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        out[i] = np.unpackbits(buf, bitorder="little")[:n].astype(bool)
    return out


def subset_matrix(masks):
    """``S[i, j]`` iff outcome mask ``i`` is contained in mask ``j``."""
    n = len(masks)
    out = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(masks):
        row = out[i]
        for j, b in enumerate(masks):
            if not a & ~b:
                row[j] = True
    return out


def closure(weak_base, strict_base):
    """Reflexive-transitive closure of ``weak_base`` plus propagated strictness.

    ``strict_base`` edges must also be present in ``weak_base``. A pair is
    strict in the result iff some weak chain between them uses a strict edge,
    i.e. ``strict = W . S . W``.
    """
    n = weak_base.shape[0]
    w = [_row_to_int(weak_base[i]) | (1 << i) for i in range(n)]
    for k in range(n):
        bk = 1 << k
        rk = w[k]
        for i in range(n):
            if w[i] & bk:
                w[i] |= rk

    s_then_w = []
    for a in range(n):
        acc = 0
        for b in np.flatnonzero(strict_base[a]):
            acc |= w[b]
        s_then_w.append(acc)

    strict = []
    for i in range(n):
        acc = 0
        bits = w[i]
        while bits:
            low = bits & -bits
            acc |= s_then_w[low.bit_length() - 1]
            bits ^= low
        strict.append(acc)
    return _ints_to_matrix(w, n), _ints_to_matrix(strict, n)


def measure_relation(values):
    """``(weak, strict)`` with ``weak[i, j] iff values[i] <= values[j]``.

    Works on any exactly-comparable numbers (ints, Fractions).
    """
    v = np.empty(len(values), dtype=object)
    v[:] = list(values)
    weak = (v[:, None] <= v[None, :]).astype(bool)
    strict = (v[:, None] < v[None, :]).astype(bool)
    return weak, strict


def pivot(rows, r, c):
    """Gauss-Jordan pivot of a list-of-lists tableau on entry ``(r, c)``, in place."""
    prow = rows[r]
    pv = prow[c]
    if pv != 1:
        prow = [v / pv for v in prow]
        rows[r] = prow
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
