"""Pure-Python integer matrix kernels.

Matrices are lists of lists of Python ints. All routines are exact.
"""
from __future__ import annotations


def matmul(a, b):
    """Integer product ``a @ b``, skipping zero entries."""
    if not a:
        return []
    p = len(b[0]) if b else 0
    sparse_b = [[(j, v) for j, v in enumerate(row) if v] for row in b]
    out = []
    for row in a:
        acc = [0] * p
        for k, aik in enumerate(row):
            if aik:
                for j, v in sparse_b[k]:
                    acc[j] += aik * v
        out.append(acc)
    return out


def rank(a):
    """Rank over the rationals via fraction-free (Bareiss) elimination."""
    m = [list(r) for r in a]
    nrows = len(m)
    if nrows == 0:
        return 0
    ncols = len(m[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = -1
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            m[piv], m[r] = m[r], m[piv]
        pr = m[r]
        p = pr[c]
        for i in range(r + 1, nrows):
            row = m[i]
            f = row[c]
            if f:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j] - f * pr[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j]) // prev
            row[c] = 0
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def inverse(a):
    """Fraction-free Gauss-Jordan inverse.

    Returns ``(x, d)`` with ``a @ x == d * I``, or ``None`` when ``a`` is
    singular.
    """
    n = len(a)
    m = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    w = 2 * n
    prev = 1
    for k in range(n):
        piv = -1
        for i in range(k, n):
            if m[i][k]:
                piv = i
                break
        if piv < 0:
            return None
        if piv != k:
            m[piv], m[k] = m[k], m[piv]
        pk = m[k]
        p = pk[k]
        nz = [j for j in range(w) if pk[j] and j != k]
        for i in range(n):
            if i == k:
                continue
            row = m[i]
            f = row[k]
            if f:
                for j in range(w):
                    row[j] = p * row[j]
                for j in nz:
                    row[j] -= f * pk[j]
                for j in range(w):
                    row[j] //= prev
            elif p != prev:
                for j in range(w):
                    row[j] = (p * row[j]) // prev
            row[k] = 0
        prev = p
    d = m[0][0]
    return [row[n:] for row in m], d
