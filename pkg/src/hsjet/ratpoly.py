"""Exact sparse polynomials over Q in jet variables ``x_i^(j)``.

Variables are encoded as integers ``(base << 20) | order`` so that integer
order coincides with the lexicographic order on ``(base, order)``.  Nothing
is registered globally: a polynomial mentions only the variables it uses,
which makes the inclusions A = A_0 < A_1 < A_2 < ... free.

Monomials are flat tuples ``(v0, e0, v1, e1, ...)`` sorted by variable code
(see :mod:`hsjet._pykernels`).
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Iterable, Mapping, NamedTuple, Union

from hsjet.kernels import mono_mul, poly_add, poly_mul, poly_scale, poly_sub

Rational = Union[int, Fraction]
Monomial = tuple

VAR_SHIFT = 20
_ORDER_MASK = (1 << VAR_SHIFT) - 1
UNIT: Monomial = ()


class JetVar(NamedTuple):
    base: int
    order: int = 0

    @property
    def code(self) -> int:
        return var(self.base, self.order)


def var(base: int, order: int = 0) -> int:
    if base < 1 or order < 0 or order > _ORDER_MASK:
        raise ValueError(f"invalid jet variable x{base}^({order})")
    return (base << VAR_SHIFT) | order


def var_base(v: int) -> int:
    return v >> VAR_SHIFT


def var_order(v: int) -> int:
    return v & _ORDER_MASK


def var_name(v: int) -> str:
    return f"x{v >> VAR_SHIFT}^({v & _ORDER_MASK})"


def _code(v) -> int:
    if isinstance(v, int):
        return v
    if isinstance(v, tuple):
        return var(*v)
    raise TypeError(f"not a variable: {v!r}")


# --------------------------------------------------------------------------
# monomials


def mono(exps: Mapping | Iterable = ()) -> Monomial:
    """Build a monomial from ``{var: exponent}`` or an iterable of variables."""
    acc: dict[int, int] = {}
    items = exps.items() if isinstance(exps, Mapping) else ((v, 1) for v in exps)
    for v, e in items:
        if e < 0:
            raise ValueError("negative exponent")
        if e:
            c = _code(v)
            acc[c] = acc.get(c, 0) + e
    out: list[int] = []
    for c in sorted(acc):
        out += (c, acc[c])
    return tuple(out)


def mono_dict(m: Monomial) -> dict[int, int]:
    return dict(zip(m[::2], m[1::2]))


def mono_degree(m: Monomial) -> int:
    return sum(m[1::2])


def mono_vars(m: Monomial) -> tuple[int, ...]:
    return m[::2]


def mono_factors(m: Monomial) -> list[int]:
    """Variables of ``m`` repeated by multiplicity, in variable order."""
    out: list[int] = []
    for v, e in zip(m[::2], m[1::2]):
        out += [v] * e
    return out


def mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    parts = []
    for v, e in zip(m[::2], m[1::2]):
        parts.append(var_name(v) if e == 1 else f"{var_name(v)}^{e}")
    return "*".join(parts)


def grlex_key(m: Monomial):
    """Sort key placing monomials in descending graded-lex order."""
    pairs = [(v, -e) for v, e in zip(m[::2], m[1::2])]
    pairs.append((1 << 62, 0))
    return (-mono_degree(m), pairs)


# --------------------------------------------------------------------------
# polynomials


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Rational] | None = None):
        if terms is None:
            terms = {}
        elif any(not c for c in terms.values()):
            terms = {m: c for m, c in terms.items() if c}
        self.terms = terms
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Rational) -> "Poly":
        c = Fraction(c) if not isinstance(c, (int, Fraction)) else c
        return cls._raw({UNIT: c} if c else {})

    @classmethod
    def gen(cls, base: int, order: int = 0) -> "Poly":
        return cls._raw({(var(base, order), 1): 1})

    @classmethod
    def monomial(cls, m: Monomial, c: Rational = 1) -> "Poly":
        return cls._raw({m: c} if c else {})

    @staticmethod
    def coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, (int, Fraction)):
            return Poly.const(x)
        return NotImplemented

    # -- ring structure ----------------------------------------------------
    def __add__(self, other):
        other = Poly.coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(poly_add(self.terms, other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        other = Poly.coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(poly_sub(self.terms, other.terms))

    def __rsub__(self, other):
        other = Poly.coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly._raw(poly_scale(self.terms, other))
        if not isinstance(other, Poly):
            return NotImplemented
        return Poly._raw(poly_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __truediv__(self, c):
        if not isinstance(c, (int, Fraction)):
            return NotImplemented
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return Poly._raw({m: _normalize(Fraction(v) / c) for m, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out, base = Poly.const(1), self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def scale(self, c: Rational) -> "Poly":
        return self * c

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # -- inspection --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=-1)

    def variables(self) -> set[int]:
        out: set[int] = set()
        for m in self.terms:
            out.update(m[::2])
        return out

    def max_order(self) -> int:
        return max((var_order(v) for v in self.variables()), default=0)

    def coeff(self, m: Monomial) -> Rational:
        return self.terms.get(m, 0)

    def sorted_terms(self) -> list[tuple[Monomial, Rational]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Poly({to_text(self)!r})"


ZERO = Poly()
ONE = Poly.const(1)


def add(f: Poly, g: Poly) -> Poly:
    return f + g


def mul(f: Poly, g: Poly) -> Poly:
    return f * g


def scale(c: Rational, f: Poly) -> Poly:
    return f * c


def psum(polys: Iterable[Poly]) -> Poly:
    acc: dict = {}
    for p in polys:
        for m, c in p.terms.items():
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                del acc[m]
    return Poly._raw(acc)


# --------------------------------------------------------------------------
# derivatives


def as_multi_index(alpha) -> dict[int, int]:
    """Accept a monomial tuple, ``{var: k}`` mapping or iterable of variables."""
    if isinstance(alpha, Poly):
        if len(alpha.terms) != 1:
            raise ValueError("multi-index must be a single monomial")
        ((m, _),) = alpha.terms.items()
        return mono_dict(m)
    if isinstance(alpha, tuple) and all(isinstance(x, int) for x in alpha):
        return mono_dict(alpha)
    return mono_dict(mono(alpha))


def _derive(f: Poly, alpha, weight) -> Poly:
    a = as_multi_index(alpha)
    if not a:
        return f
    if any(k < 0 for k in a.values()):
        raise ValueError("multi-index entries must be nonnegative")
    out: dict = {}
    for m, c in f.terms.items():
        exps = mono_dict(m)
        for v, k in a.items():
            e = exps.get(v, 0)
            if e < k:
                break
            c = c * weight(e, k)
            if e == k:
                del exps[v]
            else:
                exps[v] = e - k
        else:
            nm = []
            for v in sorted(exps):
                nm += (v, exps[v])
            nm = tuple(nm)
            s = out.get(nm, 0) + c
            if s:
                out[nm] = _normalize(s)
            else:
                del out[nm]
    return Poly._raw(out)


def _falling(e: int, k: int) -> int:
    return factorial(e) // factorial(e - k)


def partial(f: Poly, alpha) -> Poly:
    """Iterated partial derivative; ``alpha`` maps variables to orders."""
    return _derive(f, alpha, _falling)


def divided_partial(f: Poly, alpha) -> Poly:
    """``(1/alpha!) * partial(f, alpha)``, computed with binomials."""
    return _derive(f, alpha, comb)


# --------------------------------------------------------------------------
# monomial enumeration


def jet_variables(s: int, n: int) -> list[int]:
    return [var(i, j) for i in range(1, s + 1) for j in range(n + 1)]


def monomials_in(variables: Iterable[int], lo: int, hi: int) -> list[Monomial]:
    vs = sorted(set(variables))
    out = []
    for d in range(lo, hi + 1):
        for combo in combinations_with_replacement(vs, d):
            out.append(mono(combo))
    out.sort(key=lambda m: (mono_degree(m), grlex_key(m)[1]))
    return out


def monomials_up_to(s: int, n: int, m: int) -> list[Monomial]:
    """All monomials of degree 1..m in ``x_i^(j)``, ``i <= s``, ``j <= n``."""
    if s < 1 or n < 0 or m < 1:
        raise ValueError("need s >= 1, n >= 0, m >= 1")
    return monomials_in(jet_variables(s, n), 1, m)


# --------------------------------------------------------------------------
# printing


def _coeff_text(c) -> str:
    c = _normalize(c)
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def to_text(f: Poly) -> str:
    if not f.terms:
        return "0"
    pieces = []
    for i, (m, c) in enumerate(f.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _coeff_text(a)
        elif a == 1:
            body = mono_str(m)
        else:
            body = f"{_coeff_text(a)}*{mono_str(m)}"
        if i == 0:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


# --------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnknownVariableError(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")
_VARNAME = re.compile(r"x(\d+)\Z")


class _Parser:
    def __init__(self, text: str, univariate: bool = False):
        self.text = text
        self.univariate = univariate
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt is None:
                break
            if mt.group(1):
                self.toks.append(("int", mt.group(1), mt.start(1)))
            elif mt.group(2):
                self.toks.append(("name", mt.group(2), mt.start(2)))
            elif mt.group(3):
                self.toks.append(("op", mt.group(3), mt.start(3)))
            pos = mt.end()
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else ("end", "", len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        p = self.poly()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return p

    def poly(self) -> Poly:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term() * sign
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Poly:
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Poly:
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            k = int(self.take("int")[1])
            base = base ** k
        return base

    def atom(self) -> Poly:
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            num = int(tok[1])
            if self.peek()[1] == "/" and self.peek()[0] == "op":
                self.take()
                den_tok = self.take("int")
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("division by zero", den_tok[2])
                return Poly.const(_normalize(Fraction(num, den)))
            return Poly.const(num)
        if tok[0] == "name":
            return Poly._raw({(self.variable(), 1): 1})
        if tok[1] == "(":
            self.take()
            p = self.poly()
            self.take("op", ")")
            return p
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])

    def variable(self) -> int:
        _, name, pos = self.take("name")
        mt = _VARNAME.match(name)
        if not mt or int(mt.group(1)) < (0 if self.univariate else 1):
            raise UnknownVariableError(f"unknown variable {name!r}", pos)
        idx = int(mt.group(1))
        explicit = (
            self.peek()[1] == "^"
            and self.peek(1)[1] == "("
            and self.peek()[0] == self.peek(1)[0] == "op"
        )
        if explicit:
            self.take()
            self.take()
            order = int(self.take("int")[1])
            self.take("op", ")")
            if idx < 1:
                raise UnknownVariableError(f"unknown variable {name!r}", pos)
            return var(idx, order)
        if self.univariate:
            return var(1, idx)
        return var(idx, 0)


def parse(text: str, univariate: bool = False) -> Poly:
    """Parse polynomial text.

    ``x3`` means ``x3^(0)``.  With ``univariate=True`` the bare names
    ``x0, x1, ...`` denote the jet variables ``x1^(0), x1^(1), ...`` of a
    one-variable base ring, matching the usual ``K[x_0, ..., x_n]`` naming.
    """
    return _Parser(text, univariate).parse()


def parse_monomial(text: str, univariate: bool = False) -> Monomial:
    p = parse(text, univariate)
    if len(p.terms) != 1:
        raise ValueError(f"not a monomial: {text!r}")
    ((m, c),) = p.terms.items()
    if c != 1:
        raise ValueError(f"monomial must have coefficient 1: {text!r}")
    return m
