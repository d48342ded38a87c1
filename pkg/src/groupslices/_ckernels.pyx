# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled integer matrix kernels (same contract as ``_pykernels``).

Entries stay Python ints so results are exact at any size; the speedup
comes from typed loop indices and skipping the interpreter dispatch.
"""


def matmul(list a, list b):
    cdef Py_ssize_t n = len(a)
    if n == 0:
        return []
    cdef Py_ssize_t p = len(b[0]) if b else 0
    cdef Py_ssize_t k, j, kk, nk
    cdef list sparse_idx = []
    cdef list sparse_val = []
    cdef list row, acc, idx, val, out
    cdef object aik, v
    for row in b:
        idx = []
        val = []
        for j in range(p):
            v = row[j]
            if v:
                idx.append(j)
                val.append(v)
        sparse_idx.append(idx)
        sparse_val.append(val)
    out = []
    for row in a:
        acc = [0] * p
        nk = len(row)
        for k in range(nk):
            aik = row[k]
            if aik:
                idx = <list>sparse_idx[k]
                val = <list>sparse_val[k]
                for kk in range(len(idx)):
                    j = <Py_ssize_t>idx[kk]
                    acc[j] = acc[j] + aik * val[kk]
        out.append(acc)
    return out


def rank(a):
    cdef list m = [list(src) for src in a]
    cdef Py_ssize_t nrows = len(m)
    if nrows == 0:
        return 0
    cdef Py_ssize_t ncols = len(m[0])
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef object prev = 1, p, f
    cdef list pr, row
    for c in range(ncols):
        piv = -1
        for i in range(r, nrows):
            if (<list>m[i])[c]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            m[piv], m[r] = m[r], m[piv]
        pr = <list>m[r]
        p = pr[c]
        for i in range(r + 1, nrows):
            row = <list>m[i]
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
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t w = 2 * n
    cdef Py_ssize_t i, j, k, piv, jj
    cdef list m = []
    cdef list pk, row, nz
    cdef object prev = 1, p, f
    for i in range(n):
        row = list(a[i]) + [0] * n
        row[n + i] = 1
        m.append(row)
    for k in range(n):
        piv = -1
        for i in range(k, n):
            if (<list>m[i])[k]:
                piv = i
                break
        if piv < 0:
            return None
        if piv != k:
            m[piv], m[k] = m[k], m[piv]
        pk = <list>m[k]
        p = pk[k]
        nz = [j for j in range(w) if pk[j] and j != k]
        for i in range(n):
            if i == k:
                continue
            row = <list>m[i]
            f = row[k]
            if f:
                for j in range(w):
                    row[j] = p * row[j]
                for jj in range(len(nz)):
                    j = <Py_ssize_t>nz[jj]
                    row[j] = row[j] - f * pk[j]
                for j in range(w):
                    row[j] = row[j] // prev
            elif p != prev:
                for j in range(w):
                    row[j] = (p * row[j]) // prev
            row[k] = 0
        prev = p
    d = (<list>m[0])[0]
    return [(<list>row)[n:] for row in m], d
