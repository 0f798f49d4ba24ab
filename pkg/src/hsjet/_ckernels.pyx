# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of :mod:`hsjet._pykernels`; identical semantics."""

cpdef tuple mono_mul(tuple a, tuple b):
    cdef Py_ssize_t i = 0, j = 0, k = 0
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef long va, vb
    if la == 0:
        return b
    if lb == 0:
        return a
    cdef list out = [None] * (la + lb)
    while i < la and j < lb:
        va = a[i]
        vb = b[j]
        if va == vb:
            out[k] = a[i]
            out[k + 1] = a[i + 1] + b[j + 1]
            i += 2
            j += 2
        elif va < vb:
            out[k] = a[i]
            out[k + 1] = a[i + 1]
            i += 2
        else:
            out[k] = b[j]
            out[k + 1] = b[j + 1]
            j += 2
        k += 2
    while i < la:
        out[k] = a[i]
        i += 1
        k += 1
    while j < lb:
        out[k] = b[j]
        j += 1
        k += 1
    return tuple(out[:k])


cpdef dict poly_add(dict a, dict b):
    if len(a) < len(b):
        a, b = b, a
    cdef dict out = dict(a)
    cdef object m, c, s
    for m, c in b.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            del out[m]
    return out


cpdef dict poly_sub(dict a, dict b):
    cdef dict out = dict(a)
    cdef object m, c, s
    for m, c in b.items():
        s = out.get(m, 0) - c
        if s:
            out[m] = s
        else:
            del out[m]
    return out


cpdef dict poly_scale(dict a, object c):
    if not c:
        return {}
    cdef dict out = {}
    cdef object m, v
    for m, v in a.items():
        out[m] = v * c
    return out


cpdef dict poly_addmul(dict acc, dict a, dict b, object c=1):
    cdef object ma, ca, mb, cb, s
    cdef tuple m
    if not c:
        return acc
    cdef list items_a = list(a.items())
    for mb, cb in b.items():
        cb = cb * c
        for ma, ca in items_a:
            m = mono_mul(<tuple>ma, <tuple>mb)
            s = acc.get(m, 0) + ca * cb
            if s:
                acc[m] = s
            else:
                del acc[m]
    return acc


cpdef dict poly_mul(dict a, dict b):
    if len(a) < len(b):
        a, b = b, a
    return poly_addmul({}, a, b, 1)
