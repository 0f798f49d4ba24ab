"""Hasse-Schmidt algebras A_n of polynomial rings and their truncated series.

``d(f, j)`` is the j-th universal derivation ``A -> A_n``.  On monomials it
is computed by peeling one variable off and applying the convolution rule
``d_j(uv) = sum_{a+b=j} d_a(u) d_b(v)``, memoized on ``(monomial, j)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from hsjet.ratpoly import (
    ONE,
    ZERO,
    Monomial,
    Poly,
    jet_variables,
    mono,
    mono_degree,
    mono_dict,
    mono_str,
    monomials_in,
    parse,
    partial,
    psum,
    to_text,
    var,
    var_base,
    var_order,
)


class JetRingError(ValueError):
    pass


class PreconditionError(ValueError):
    """Inputs fall outside the hypotheses of the identity being checked."""


@dataclass(frozen=True)
class JetRing:
    """A_n for ``A = Q[x_1..x_s] / (relations)`` at finite truncation ``n``."""

    s: int
    n: int
    relations: tuple[Poly, ...] = field(default=())

    def __post_init__(self):
        if self.s < 1 or self.n < 0:
            raise JetRingError(f"need s >= 1 and n >= 0, got s={self.s} n={self.n}")
        object.__setattr__(self, "relations", tuple(self.relations))
        for f in self.relations:
            for v in f.variables():
                if var_order(v) != 0 or var_base(v) > self.s:
                    raise JetRingError(f"relation {f} is not in the base variables")

    def variables(self) -> list[int]:
        return jet_variables(self.s, self.n)

    def base_variables(self) -> list[int]:
        return [var(i, 0) for i in range(1, self.s + 1)]

    def contains(self, f: Poly) -> bool:
        return all(var_base(v) <= self.s and var_order(v) <= self.n for v in f.variables())

    def is_base(self, f: Poly) -> bool:
        return all(var_base(v) <= self.s and var_order(v) == 0 for v in f.variables())

    def jet_ideal(self) -> list[Poly]:
        """Generators ``d_j(f)`` of the ideal defining A_n in the jet variables."""
        return [d(f, j, self) for f in self.relations for j in range(self.n + 1)]

    def base(self) -> "JetRing":
        return JetRing(self.s, 0, self.relations)

    def at(self, n: int) -> "JetRing":
        return JetRing(self.s, n, self.relations)

    def to_text(self) -> str:
        lines = [f"ring s={self.s} n={self.n}"]
        lines += [f"rel {to_text(f)}" for f in self.relations]
        return "\n".join(lines)


_LINE_SPLIT = re.compile(r"\n|\s+/\s+|;")


def split_lines(text: str) -> list[str]:
    """Split a multi-line spec; ``' / '`` and ``;`` also separate lines."""
    return [ln.strip() for ln in _LINE_SPLIT.split(text) if ln.strip()]


def parse_ring(text: str) -> JetRing:
    lines = split_lines(text)
    if not lines:
        raise JetRingError("empty ring descriptor")
    head = lines[0].split()
    if head and head[0] == "ring":
        head = head[1:]
    params = {}
    for tok in head:
        key, sep, val = tok.partition("=")
        if not sep or key not in ("s", "n"):
            raise JetRingError(f"bad ring parameter {tok!r}")
        try:
            params[key] = int(val)
        except ValueError:
            raise JetRingError(f"bad ring parameter {tok!r}") from None
    if set(params) != {"s", "n"}:
        raise JetRingError("ring descriptor needs s=<int> and n=<int>")
    rels = []
    for ln in lines[1:]:
        kw, _, rest = ln.partition(" ")
        if kw != "rel":
            raise JetRingError(f"unexpected line {ln!r}")
        rels.append(parse(rest))
    return JetRing(params["s"], params["n"], tuple(rels))


# --------------------------------------------------------------------------
# universal derivations


@lru_cache(maxsize=None)
def _d_mono(m: Monomial, j: int) -> Poly:
    if j == 0:
        return Poly.monomial(m)
    if not m:
        return ZERO
    v, e = m[0], m[1]
    rest = m[2:] if e == 1 else (v, e - 1) + m[2:]
    terms: dict = {}
    for a in range(j + 1):
        tail = _d_mono(rest, j - a)
        if not tail.terms:
            continue
        head = Poly.monomial((v + a, 1))
        for mm, c in (head * tail).terms.items():
            s = terms.get(mm, 0) + c
            if s:
                terms[mm] = s
            else:
                del terms[mm]
    return Poly(terms)


def d(f: Poly, j: int, ring: JetRing | None = None) -> Poly:
    """The j-th universal Hasse-Schmidt derivation of a base polynomial."""
    if j < 0:
        raise JetRingError(f"jet order must be nonnegative, got {j}")
    if ring is not None and j > ring.n:
        raise JetRingError(f"jet order {j} exceeds truncation n={ring.n}")
    for v in f.variables():
        if var_order(v) != 0:
            raise JetRingError(f"d_j is defined on base variables only; found x{var_base(v)}^({var_order(v)})")
        if ring is not None and var_base(v) > ring.s:
            raise JetRingError(f"variable x{var_base(v)} outside ring with s={ring.s}")
    if j == 0:
        return f
    return psum(_d_mono(m, j) * c for m, c in f.terms.items())


def d_cache_clear() -> None:
    _d_mono.cache_clear()


# --------------------------------------------------------------------------
# B_n = A_n[t] / (t^{n+1})


class Series:
    """Element of ``A_n[t]/(t^{n+1})`` stored as its ``n+1`` coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Poly]):
        if not coeffs:
            raise ValueError("a series needs at least the t^0 coefficient")
        self.coeffs = tuple(Poly.coerce(c) for c in coeffs)

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, n: int) -> "Series":
        return cls([ZERO] * (n + 1))

    @classmethod
    def one(cls, n: int) -> "Series":
        return cls([ONE] + [ZERO] * n)

    @classmethod
    def monomial_t(cls, p: Poly, k: int, n: int) -> "Series":
        out = [ZERO] * (n + 1)
        if k <= n:
            out[k] = p
        return cls(out)

    def _check(self, other: "Series"):
        if other.n != self.n:
            raise ValueError(f"truncation mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        return Series([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        return Series([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Series([-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, Series):
            self._check(other)
            n = self.n
            out = []
            for k in range(n + 1):
                out.append(psum(self.coeffs[a] * other.coeffs[k - a] for a in range(k + 1)))
            return Series(out)
        other = Poly.coerce(other)
        if other is NotImplemented:
            return other
        return Series([a * other for a in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                parts.append(f"({to_text(c)})" + ("" if k == 0 else f"*t^{k}"))
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"Series({[to_text(c) for c in self.coeffs]})"


def gamma_sharp(f: Poly, ring: JetRing) -> Series:
    """``f -> sum_j d_j(f) t^j``, a ring map A -> B_n."""
    return Series([d(f, j, ring) for j in range(ring.n + 1)])


# --------------------------------------------------------------------------
# jet multi-indices


class JetIndex:
    """A multi-index over jet variables with its base collapse and weight."""

    __slots__ = ("alpha",)

    def __init__(self, alpha):
        if isinstance(alpha, dict):
            alpha = mono(alpha)
        self.alpha: Monomial = tuple(alpha)

    def size(self) -> int:
        return mono_degree(self.alpha)

    def hat(self, s: int | None = None) -> tuple[int, ...]:
        exps = mono_dict(self.alpha)
        if s is None:
            s = max((var_base(v) for v in exps), default=0)
        out = [0] * s
        for v, e in exps.items():
            out[var_base(v) - 1] += e
        return tuple(out)

    def hat_monomial(self) -> Monomial:
        acc: dict[int, int] = {}
        for v, e in mono_dict(self.alpha).items():
            b = var(var_base(v), 0)
            acc[b] = acc.get(b, 0) + e
        return mono(acc)

    @property
    def weight(self) -> int:
        return sum(var_order(v) * e for v, e in mono_dict(self.alpha).items())

    def __eq__(self, other):
        return isinstance(other, JetIndex) and other.alpha == self.alpha

    def __hash__(self):
        return hash(self.alpha)

    def __repr__(self):
        return f"JetIndex({mono_str(self.alpha)})"


# --------------------------------------------------------------------------
# jets of monomials, term by term


def base_monomial(beta: Sequence[int]) -> Monomial:
    return mono({var(i + 1, 0): b for i, b in enumerate(beta)})


def enumerate_gamma(size: int, j: int) -> list[tuple[int, ...]]:
    """Compositions of ``j`` into ``size`` parts with no part equal to ``j``."""
    if size < 1 or j < 0:
        raise ValueError("need size >= 1 and j >= 0")
    if j == 0:
        return []
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], left: int, slots: int):
        if slots == 1:
            if left != j:
                out.append(tuple(prefix + [left]))
            return
        for part in range(min(left, j - 1), -1, -1):
            rec(prefix + [part], left - part, slots - 1)

    rec([], j, size)
    return out


def _block_bases(beta: Sequence[int]) -> list[int]:
    out: list[int] = []
    for i, b in enumerate(beta):
        out += [i + 1] * b
    return out


def jet_product(gamma: Sequence[int], beta: Sequence[int]) -> Monomial:
    """``x^(gamma)``: the l-th factor of ``x^beta`` lifted to jet order ``gamma_l``."""
    bases = _block_bases(beta)
    if len(gamma) != len(bases):
        raise ValueError("gamma must have |beta| entries")
    return mono(var(i, g) for i, g in zip(bases, gamma))


def gamma_to_alpha(gamma: Sequence[int], beta: Sequence[int]) -> JetIndex:
    """Count, block by block, how many entries of gamma take each jet order."""
    bases = _block_bases(beta)
    if len(gamma) != len(bases):
        raise ValueError("gamma must have |beta| entries")
    counts: dict[int, int] = {}
    for i, g in zip(bases, gamma):
        key = var(i, g)
        counts[key] = counts.get(key, 0) + 1
    return JetIndex(mono(counts))


def monomial_jet_formula(beta: Sequence[int], j: int, ring: JetRing | None = None) -> Poly:
    """``(x^beta)^(j)`` as the single-jet-factor terms plus the Gamma^j remainder.

    At ``j = 0`` the jet is the product itself, ``x^beta``.
    """
    if sum(beta) < 1:
        raise ValueError("need |beta| >= 1")
    if ring is not None and (j > ring.n or len(beta) > ring.s):
        raise JetRingError("beta or j outside the ring")
    if j == 0:
        return Poly.monomial(base_monomial(beta))
    s = len(beta)
    lead = []
    for i in range(s):
        if beta[i] == 0:
            continue
        rest = list(beta)
        rest[i] -= 1
        exps = mono_dict(base_monomial(rest))
        exps[var(i + 1, j)] = 1
        lead.append(Poly.monomial(mono(exps), beta[i]))
    tail = (Poly.monomial(jet_product(g, beta)) for g in enumerate_gamma(sum(beta), j))
    return psum(lead) + psum(tail)


# --------------------------------------------------------------------------
# partial derivatives against universal derivations


def commute_check(alpha, l: int, f: Poly, ring: JetRing) -> tuple[Poly, Poly]:
    """Both sides of ``d^alpha/dx^alpha o d_l = d_{l - weight} o d^hat/dx^hat``."""
    idx = alpha if isinstance(alpha, JetIndex) else JetIndex(alpha)
    lam = idx.weight
    if not 0 <= l <= ring.n:
        raise PreconditionError(f"need 0 <= l <= n, got l={l}, n={ring.n}")
    if lam > l:
        raise PreconditionError(f"weight {lam} of alpha exceeds l={l}")
    for v in mono_dict(idx.alpha):
        if var_base(v) > ring.s or var_order(v) > ring.n:
            raise PreconditionError("alpha mentions a variable outside the ring")
    lhs = partial(d(f, l, ring), idx.alpha)
    rhs = d(partial(f, idx.hat_monomial()), l - lam, ring)
    return lhs, rhs


def iter_base_monomials(s: int, lo: int, hi: int) -> list[Monomial]:
    return monomials_in([var(i, 0) for i in range(1, s + 1)], lo, hi)
