"""Pure-Python sparse polynomial kernels.

A monomial is a flat tuple ``(v0, e0, v1, e1, ...)`` with variable codes
strictly increasing and every exponent positive.  A polynomial is a dict
mapping monomials to nonzero exact rationals (``int`` or ``Fraction``).
"""


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, vb = a[i], b[j]
        if va == vb:
            out.append(va)
            out.append(a[i + 1] + b[j + 1])
            i += 2
            j += 2
        elif va < vb:
            out.append(va)
            out.append(a[i + 1])
            i += 2
        else:
            out.append(vb)
            out.append(b[j + 1])
            j += 2
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            del out[m]
    return out


def poly_sub(a, b):
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) - c
        if s:
            out[m] = s
        else:
            del out[m]
    return out


def poly_scale(a, c):
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def poly_mul(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = mono_mul(ma, mb)
            s = get(m, 0) + ca * cb
            if s:
                out[m] = s
            else:
                del out[m]
    return out


def poly_addmul(acc, a, b, c=1):
    """In place ``acc += c * a * b``; returns ``acc``."""
    if not c:
        return acc
    for mb, cb in b.items():
        cb = cb * c
        for ma, ca in a.items():
            m = mono_mul(ma, mb)
            s = acc.get(m, 0) + ca * cb
            if s:
                acc[m] = s
            else:
                del acc[m]
    return acc
