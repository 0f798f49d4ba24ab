"""High-order (Nakai) derivations of polynomial rings.

An order-m derivation on a free polynomial ring is pinned down by its values
on monomials of degree 1..m; every other monomial is reached through the
order-m product rule

    D(x_0 ... x_m) = sum_{s=1}^{m} (-1)^{s-1} sum_{|S|=s} x_S * D(x_{not S}),

which lowers total degree, so the recursion terminates.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Iterable, Mapping, Sequence

from hsjet.jetring import JetRing, split_lines
from hsjet.kernels import mono_mul
from hsjet.ratpoly import (
    ZERO,
    Monomial,
    Poly,
    mono,
    mono_degree,
    mono_dict,
    mono_factors,
    mono_str,
    monomials_up_to,
    parse,
    parse_monomial,
    partial,
    psum,
    to_text,
    var_base,
    var_order,
)


class DerivationError(ValueError):
    pass


def _mono_prod(parts: Iterable[Monomial]) -> Monomial:
    out: Monomial = ()
    for p in parts:
        out = mono_mul(out, p)
    return out


class MDeriv:
    """Order-m derivation ``A_n -> A_N`` given by its values on low monomials.

    ``table`` maps monomials of degree 1..m in the domain variables to their
    values; unlisted monomials take the value 0.
    """

    def __init__(self, m: int, domain: JetRing, table: Mapping[Monomial, Poly] | None = None):
        if m < 1:
            raise DerivationError("order must be at least 1")
        self.m = m
        self.domain = domain
        clean: dict[Monomial, Poly] = {}
        for k, v in (table or {}).items():
            deg = mono_degree(k)
            if not 1 <= deg <= m:
                raise DerivationError(f"table key {mono_str(k)} has degree {deg} outside 1..{m}")
            self._check_vars(mono_dict(k))
            v = Poly.coerce(v)
            if v:
                clean[k] = v
        self.table = clean
        self._memo: dict[Monomial, Poly] = {}

    def _check_vars(self, exps):
        for v in exps:
            if var_base(v) > self.domain.s or var_order(v) > self.domain.n:
                raise DerivationError(
                    f"variable x{var_base(v)}^({var_order(v)}) outside the domain "
                    f"(s={self.domain.s}, n={self.domain.n})"
                )

    # -- evaluation --------------------------------------------------------
    def value(self, m: Monomial) -> Poly:
        return self.table.get(m, ZERO)

    def total_table(self) -> dict[Monomial, Poly]:
        return {k: self.value(k) for k in monomials_up_to(self.domain.s, self.domain.n, self.m)}

    def eval_monomial(self, m: Monomial) -> Poly:
        deg = mono_degree(m)
        if deg == 0:
            return ZERO
        if deg <= self.m:
            return self.table.get(m, ZERO)
        hit = self._memo.get(m)
        if hit is None:
            hit = self._split(mono_factors(m))
            self._memo[m] = hit
        return hit

    def eval_with_factors(self, factors: Sequence[int]) -> Poly:
        """Evaluate the monomial with these factors, splitting in the given order."""
        if len(factors) <= self.m:
            return self.eval_monomial(mono(factors))
        self._check_vars(set(factors))
        return self._split(list(factors))

    def _split(self, factors: list[int]) -> Poly:
        m = self.m
        parts = [(v, 1) for v in factors[:m]] + [mono(factors[m:])]
        k = m + 1
        acc: dict = {}
        for s in range(1, k):
            sign = 1 if s % 2 else -1
            for chosen in combinations(range(k), s):
                mult = _mono_prod(parts[i] for i in chosen)
                rest = _mono_prod(parts[i] for i in range(k) if i not in chosen)
                val = self.eval_monomial(rest)
                for mm, c in val.terms.items():
                    key = mono_mul(mult, mm)
                    t = acc.get(key, 0) + sign * c
                    if t:
                        acc[key] = t
                    else:
                        del acc[key]
        return Poly(acc)

    def __call__(self, f: Poly) -> Poly:
        return self.eval(f)

    def eval(self, f: Poly) -> Poly:
        self._check_vars(f.variables())
        return psum(self.eval_monomial(m) * c for m, c in f.terms.items())

    # -- module structure --------------------------------------------------
    def __add__(self, other: "MDeriv") -> "MDeriv":
        self._compatible(other)
        keys = set(self.table) | set(other.table)
        return MDeriv(max(self.m, other.m), self.domain, {k: self.value(k) + other.value(k) for k in keys})

    def __sub__(self, other: "MDeriv") -> "MDeriv":
        return self + other * -1

    def __mul__(self, c) -> "MDeriv":
        c = Poly.coerce(c)
        if c is NotImplemented:
            return c
        return MDeriv(self.m, self.domain, {k: v * c for k, v in self.table.items()})

    __rmul__ = __mul__

    def _compatible(self, other):
        if self.domain != other.domain:
            raise DerivationError("derivations have different domains")

    def __eq__(self, other):
        if not isinstance(other, MDeriv):
            return NotImplemented
        return self.domain == other.domain and self.total_table() == other.total_table()

    def __repr__(self):
        return f"MDeriv(m={self.m}, s={self.domain.s}, n={self.domain.n}, entries={len(self.table)})"


def zero_deriv(m: int, domain: JetRing) -> MDeriv:
    return MDeriv(m, domain, {})


def eval(D: MDeriv, f: Poly) -> Poly:  # noqa: A001 - mirrors the operation name
    return D.eval(f)


# --------------------------------------------------------------------------
# the order-m product rule as a check


def nakai_check(
    D: Callable,
    xs: Sequence[Poly],
    act: Callable | None = None,
    m: int | None = None,
) -> bool:
    """Whether ``D`` satisfies the order-m product rule on the tuple ``xs``.

    ``act(a, value)`` is the module action of a ring element on a value of
    ``D``; by default plain multiplication.
    """
    order = getattr(D, "m", m)
    if order is not None and len(xs) != order + 1:
        raise DerivationError(f"need {order + 1} elements for order {order}, got {len(xs)}")
    if len(xs) < 2:
        raise DerivationError("need at least two elements")
    if act is None:
        act = lambda a, val: val * a  # noqa: E731
    k = len(xs)
    lhs = D(_prod(xs))
    rhs = None
    for s in range(1, k):
        sign = 1 if s % 2 else -1
        for chosen in combinations(range(k), s):
            term = act(_prod(xs[i] for i in chosen), D(_prod(xs[i] for i in range(k) if i not in chosen)))
            term = term if sign > 0 else -term
            rhs = term if rhs is None else rhs + term
    return lhs == rhs


def _prod(items) -> Poly:
    out = Poly.const(1)
    for p in items:
        out = out * p
    return out


# --------------------------------------------------------------------------
# literal differential operators


def apply_operator(spec: Sequence[tuple], f: Poly) -> Poly:
    """``sum c_alpha * d^alpha f`` for ``spec = [(alpha, c), ...]``."""
    return psum(partial(f, alpha) * Poly.coerce(c) for alpha, c in spec)


def _normalize_spec(spec) -> list[tuple[Monomial, Poly]]:
    out = []
    for alpha, c in spec:
        a = alpha if isinstance(alpha, tuple) and all(isinstance(x, int) for x in alpha) else mono(alpha)
        out.append((a, Poly.coerce(Fraction(c) if isinstance(c, str) else c)))
    return out


def from_partials(spec, domain: JetRing, m: int | None = None) -> MDeriv:
    """The derivation whose table is the literal operator ``sum c_alpha d^alpha``."""
    spec = _normalize_spec(spec)
    orders = [mono_degree(a) for a, _ in spec]
    if any(o == 0 for o in orders):
        raise DerivationError("a zeroth-order term does not kill constants")
    if m is None:
        m = max(orders, default=1)
    if any(o > m for o in orders):
        raise DerivationError(f"operator order exceeds m={m}")
    table = {}
    for k in monomials_up_to(domain.s, domain.n, m):
        val = apply_operator(spec, Poly.monomial(k))
        if val:
            table[k] = val
    D = MDeriv(m, domain, table)
    D.operator = spec
    return D


# --------------------------------------------------------------------------
# order 2: closed form through the values on x^alpha, |alpha| <= 2


class OperatorDeriv:
    """Coefficients ``F_alpha = D(x^alpha)`` for ``1 <= |alpha| <= m``."""

    def __init__(self, m: int, coeffs: Mapping[Monomial, Poly]):
        self.m = m
        self.coeffs = {k: Poly.coerce(v) for k, v in coeffs.items() if v}

    @classmethod
    def from_table(cls, D: MDeriv) -> "OperatorDeriv":
        return cls(D.m, dict(D.table))

    def F(self, alpha: Monomial) -> Poly:
        return self.coeffs.get(alpha, ZERO)


def sub_indices(beta: Monomial, size: int) -> list[Monomial]:
    vs = mono_factors(beta)
    return sorted({mono(c) for c in combinations(vs, size)})


def divided_coefficient(beta: Monomial, alpha: Monomial) -> tuple[int, Monomial] | None:
    """``(1/alpha!) d^alpha x^beta`` as ``(coefficient, monomial)``."""
    b = mono_dict(beta)
    c = 1
    for v, k in mono_dict(alpha).items():
        e = b.get(v, 0)
        if e < k:
            return None
        c *= comb(e, k)
        b[v] = e - k
    return c, mono(b)


def eval_operator_m2(F: OperatorDeriv, beta) -> Poly:
    """``D(x^beta)`` from the order-2 closed formula with the ``(2 - |beta|)`` term."""
    if F.m != 2:
        raise DerivationError("closed form is only available for m = 2")
    if not isinstance(beta, tuple) or (beta and not isinstance(beta[0], int)):
        beta = mono(beta)
    size = mono_degree(beta)
    if size == 0:
        return ZERO
    acc: dict = {}
    for order, weight in ((2, 1), (1, 2 - size)):
        if not weight:
            continue
        for alpha in sub_indices(beta, order):
            fa = F.F(alpha)
            if not fa:
                continue
            c, rest = divided_coefficient(beta, alpha)
            for mm, v in fa.terms.items():
                key = mono_mul(rest, mm)
                t = acc.get(key, 0) + weight * c * v
                if t:
                    acc[key] = t
                else:
                    del acc[key]
    return Poly(acc)


def b2_identity_check(beta: Monomial, D: MDeriv) -> bool:
    """The order-2 expansion of ``D(x^beta)`` through ``D(x^alpha)``, ``|alpha| <= 2``."""
    if D.m != 2:
        raise DerivationError("identity is stated for order 2")
    size = mono_degree(beta)
    if size < 1:
        raise DerivationError("need |beta| >= 1")
    rhs = ZERO
    for order, weight in ((2, 1), (1, 2 - size)):
        for alpha in sub_indices(beta, order):
            c, rest = divided_coefficient(beta, alpha)
            rhs = rhs + Poly.monomial(rest, c * weight) * D.eval_monomial(alpha)
    return D.eval_monomial(beta) == rhs


# --------------------------------------------------------------------------
# text format


def parse_deriv(text: str, domain: JetRing, univariate: bool = False) -> MDeriv:
    """Parse ``deriv m=<int>`` followed by ``partial``/``value`` lines.

    ``partial x1,x1 1/2`` adds ``(1/2) d^2/dx1^2``; ``value <monomial> <poly>``
    sets a table entry.  The two line kinds cannot be mixed.
    """
    lines = split_lines(text)
    if not lines or not lines[0].startswith("deriv"):
        raise DerivationError("derivation spec must start with 'deriv m=<int>'")
    head = lines[0].split()
    m = None
    for tok in head[1:]:
        key, _, val = tok.partition("=")
        if key != "m":
            raise DerivationError(f"bad header token {tok!r}")
        m = int(val)
    if m is None:
        raise DerivationError("missing m=<int> in header")
    partials, values = [], {}
    for ln in lines[1:]:
        kw, _, rest = ln.partition(" ")
        rest = rest.strip()
        if kw == "partial":
            names, _, coeff = rest.partition(" ")
            factors = []
            for name in names.split(","):
                factors += mono_factors(parse_monomial(name.strip(), univariate))
            alpha = mono(factors)
            partials.append((alpha, parse(coeff.strip() or "1", univariate)))
        elif kw == "value":
            key, _, val = rest.partition(" ")
            values[parse_monomial(key, univariate)] = parse(val.strip(), univariate)
        else:
            raise DerivationError(f"unexpected line {ln!r}")
    if partials and values:
        raise DerivationError("cannot mix 'partial' and 'value' lines")
    if partials:
        return from_partials(partials, domain, m)
    return MDeriv(m, domain, values)


def deriv_to_text(D: MDeriv) -> str:
    lines = [f"deriv m={D.m}"]
    for k in monomials_up_to(D.domain.s, D.domain.n, D.m):
        v = D.table.get(k)
        if v:
            lines.append(f"value {mono_str(k)} {to_text(v)}")
    return "\n".join(lines)
