"""Finite presentations of order-m Kähler differentials and the dual map.

A module element is a finite map from generator keys to polynomial
coefficients.  Keys are symbol monomials ``(dx)^alpha`` (stored as ordinary
monomials in the same variable codes) or, in ``Omega (x) P_n``, pairs
``(symbol, j)`` standing for ``(dx)^alpha (x) t^-j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Hashable, Iterable, Mapping, Sequence

from hsjet.jetring import JetRing, PreconditionError, d
from hsjet.kernels import mono_mul
from hsjet.mderiv import divided_coefficient, sub_indices
from hsjet.ratpoly import (
    ZERO,
    Monomial,
    Poly,
    grlex_key,
    mono,
    mono_degree,
    mono_dict,
    monomials_in,
    parse,
    parse_monomial,
    to_text,
    var,
    var_name,
)


class CertificateError(AssertionError):
    def __init__(self, msg: str, residual: "ModElement"):
        super().__init__(f"{msg}\n{residual.to_text() or '0'}")
        self.residual = residual


# --------------------------------------------------------------------------
# module elements


def symbol_text(sym: Monomial) -> str:
    if not sym:
        return "1"
    parts = []
    for v, e in mono_dict(sym).items():
        parts.append(f"d{var_name(v)}" if e == 1 else f"d{var_name(v)}^{e}")
    return "*".join(parts)


def parse_symbol(text: str) -> Monomial:
    factors = []
    for piece in text.strip().split("*"):
        piece = piece.strip()
        if not piece.startswith("d"):
            raise ValueError(f"bad symbol factor {piece!r}")
        factors.append(piece[1:])
    return parse_monomial("*".join(factors))


def key_text(key) -> str:
    if len(key) == 2 and isinstance(key[0], tuple):
        sym, j = key
        return f"{symbol_text(sym)} (x) t^-{j}"
    return symbol_text(key)


def _sort_key(key):
    if len(key) == 2 and isinstance(key[0], tuple):
        return (key[1], grlex_key(key[0]))
    return (0, grlex_key(key))


class ModElement:
    """Element of a free module over a polynomial ring."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Hashable, Poly] | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def gen(cls, key, coeff=1) -> "ModElement":
        return cls({key: Poly.coerce(coeff)})

    def coeff(self, key) -> Poly:
        return self.terms.get(key, ZERO)

    def __add__(self, other: "ModElement") -> "ModElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return ModElement(out)

    def __sub__(self, other: "ModElement") -> "ModElement":
        return self + (-other)

    def __neg__(self) -> "ModElement":
        return ModElement({k: -v for k, v in self.terms.items()})

    def __mul__(self, c) -> "ModElement":
        c = Poly.coerce(c)
        if c is NotImplemented:
            return c
        return ModElement({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ModElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def keys(self) -> list:
        return sorted(self.terms, key=_sort_key)

    def to_text(self) -> str:
        return "\n".join(f"gen {key_text(k)} : {to_text(self.terms[k])}" for k in self.keys())

    def __str__(self):
        return self.to_text() or "0"

    def __repr__(self):
        return f"ModElement({len(self.terms)} terms)"


def parse_module(text: str) -> ModElement:
    """Inverse of :meth:`ModElement.to_text`."""
    out = ModElement()
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln == "0":
            continue
        if not ln.startswith("gen "):
            raise ValueError(f"expected 'gen <symbol> : <poly>', got {ln!r}")
        head, sep, poly = ln[4:].rpartition(" : ")
        if not sep:
            raise ValueError(f"missing ' : ' in {ln!r}")
        sym_text, tsep, j = head.partition(" (x) t^-")
        sym = parse_symbol(sym_text)
        key = (sym, int(j)) if tsep else sym
        out = out + ModElement.gen(key, parse(poly))
    return out


def msum(items: Iterable[ModElement]) -> ModElement:
    acc: dict = {}
    for e in items:
        for k, v in e.terms.items():
            acc[k] = acc.get(k, ZERO) + v
    return ModElement(acc)


# --------------------------------------------------------------------------
# the canonical order-m derivation


def canonical_dm(f: Poly, m: int, ring: JetRing | None = None) -> ModElement:
    """``d^m(f) = sum_{1<=|alpha|<=m} Delta_alpha(f) (dx)^alpha``."""
    if m < 1:
        raise PreconditionError("order must be at least 1")
    if ring is not None and not ring.contains(f):
        raise PreconditionError("polynomial is not in the ring")
    acc: dict = {}
    for k, c in f.terms.items():
        for size in range(1, min(m, mono_degree(k)) + 1):
            for alpha in sub_indices(k, size):
                coef, rest = divided_coefficient(k, alpha)
                acc[alpha] = acc.get(alpha, ZERO) + Poly.monomial(rest, c * coef)
    return ModElement(acc)


def symbol_mul(elem: ModElement, beta: Monomial, m: int) -> ModElement:
    """Multiply every symbol by ``(dx)^beta``, dropping symbol degree above m."""
    out = {}
    for k, v in elem.terms.items():
        key = mono_mul(beta, k)
        if mono_degree(key) <= m:
            out[key] = out.get(key, ZERO) + v
    return ModElement(out)


@dataclass
class DiffPresentation:
    """Free module on ``(dx)^alpha``, ``1 <= |alpha| <= m``, modulo the rows ``f_beta``.

    ``ideal`` holds the relations of the coefficient ring; the rows are
    ``(dx)^beta * d^m(f)`` for ``f`` in the ideal and ``|beta| <= m - 1``.
    """

    variables: tuple[int, ...]
    m: int
    ideal: tuple[Poly, ...] = ()
    generators: list[Monomial] = field(init=False)
    relations: list[ModElement] = field(init=False)
    labels: list[tuple[int, Monomial]] = field(init=False)

    def __post_init__(self):
        self.variables = tuple(self.variables)
        self.ideal = tuple(self.ideal)
        self.generators = monomials_in(self.variables, 1, self.m)
        self.relations = []
        self.labels = []
        betas = monomials_in(self.variables, 0, self.m - 1)
        for i, f in enumerate(self.ideal):
            df = canonical_dm(f, self.m)
            for beta in betas:
                self.relations.append(symbol_mul(df, beta, self.m))
                self.labels.append((i, beta))

    @classmethod
    def from_ring(cls, ring: JetRing, m: int) -> "DiffPresentation":
        """Presentation for A_n of the ring."""
        return cls(tuple(ring.variables()), m, tuple(ring.jet_ideal()))

    @classmethod
    def for_base(cls, ring: JetRing, m: int) -> "DiffPresentation":
        """Presentation for the base ring A itself."""
        return cls(tuple(ring.base_variables()), m, ring.relations)

    def row(self, i: int, beta: Monomial) -> ModElement:
        return self.relations[self.labels.index((i, beta))]

    def ideal_rows(self) -> list[ModElement]:
        """``g * e`` for ideal generators g and module generators e."""
        return [ModElement.gen(e, g) for g in self.ideal for e in self.generators]

    @property
    def rank(self) -> int:
        return len(self.generators)


def free_rank(num_vars: int, m: int) -> int:
    """Number of symbols ``(dx)^alpha`` with ``1 <= |alpha| <= m``."""
    return comb(num_vars + m, m) - 1


def ranks(s: int, n: int, m: int) -> dict[str, int]:
    """Free ranks over A_n of ``Omega_A (x) P_n`` and of ``Omega_{A_n}`` for polynomial A."""
    return {
        "tensor": (n + 1) * free_rank(s, m),
        "jet": free_rank(s * (n + 1), m),
    }


# --------------------------------------------------------------------------
# Omega_A (x) P_n and the dual map


def tensor_t(elem: ModElement, j: int, ring: JetRing) -> ModElement:
    """``elem (x) t^-j`` with A acting on ``P_n`` through ``gamma_sharp``.

    ``c * sym (x) t^-j = sum_k d_k(c) * (sym (x) t^-(j-k))``.
    """
    if not 0 <= j <= ring.n:
        raise PreconditionError(f"need 0 <= j <= {ring.n}, got {j}")
    acc: dict = {}
    for sym, c in elem.terms.items():
        if not ring.is_base(c):
            raise PreconditionError("coefficients must lie in the base ring")
        for k in range(j + 1):
            key = (sym, j - k)
            acc[key] = acc.get(key, ZERO) + d(c, k, ring)
    return ModElement(acc)


def symbol_jet(sym: Monomial, j: int, ring: JetRing) -> ModElement:
    """Image of ``(dx)^alpha (x) t^-j``: the j-th jet of the symbol monomial."""
    return ModElement({k: Poly.const(c) for k, c in d(Poly.monomial(sym), j, ring).terms.items()})


def phi_vee(elem: ModElement, ring: JetRing) -> ModElement:
    """Apply the dual map to an element of ``Omega_A (x) P_n`` with A_n coefficients."""
    acc: dict = {}
    for (sym, j), c in elem.terms.items():
        if not 0 <= j <= ring.n:
            raise PreconditionError(f"t^-{j} outside P_{ring.n}")
        for k, v in symbol_jet(sym, j, ring).terms.items():
            acc[k] = acc.get(k, ZERO) + v * c
    return ModElement(acc)


def phi_vee_on_generator(f: Poly, j: int, m: int, ring: JetRing) -> ModElement:
    """``d^m(f) (x) t^-j -> d^m(d_j f)``."""
    if not 0 <= j <= ring.n:
        raise PreconditionError(f"need 0 <= j <= {ring.n}, got {j}")
    if not ring.is_base(f):
        raise PreconditionError("f must lie in the base ring")
    return canonical_dm(d(f, j, ring), m)


# --------------------------------------------------------------------------
# exact sparse linear algebra


def solve_exact(columns: Sequence[Mapping[Hashable, Fraction]], rhs: Mapping[Hashable, Fraction]):
    """A rational solution ``x`` of ``sum_c x_c * columns[c] = rhs``, or None.

    Gauss-Jordan elimination over sparse rows; free unknowns are set to 0.
    """
    rows: dict = {}
    for c, col in enumerate(columns):
        for key, v in col.items():
            if v:
                rows.setdefault(key, {})[c] = Fraction(v)
    for key in rhs:
        rows.setdefault(key, {})
    pivots: dict[int, tuple[dict, Fraction]] = {}
    for key, row in rows.items():
        b = Fraction(rhs.get(key, 0))
        row = dict(row)
        for c in [c for c in row if c in pivots]:
            f = row.get(c)
            if not f:
                continue
            prow, pb = pivots[c]
            for cc, vv in prow.items():
                t = row.get(cc, 0) - f * vv
                if t:
                    row[cc] = t
                else:
                    row.pop(cc, None)
            b -= f * pb
        if not row:
            if b:
                return None
            continue
        p = min(row)
        inv = 1 / row[p]
        row = {cc: vv * inv for cc, vv in row.items()}
        b *= inv
        for c, (prow, pb) in list(pivots.items()):
            f = prow.get(p)
            if f:
                for cc, vv in row.items():
                    t = prow.get(cc, 0) - f * vv
                    if t:
                        prow[cc] = t
                    else:
                        prow.pop(cc, None)
                pivots[c] = (prow, pb - f * b)
        pivots[p] = (row, b)
    x = [Fraction(0)] * len(columns)
    for p, (_, b) in pivots.items():
        x[p] = b
    return x


@dataclass
class Membership:
    feasible: bool
    coefficients: list[Poly] | None
    unknowns: int
    equations: int

    @property
    def verdict(self) -> str:
        return "feasible" if self.feasible else "infeasible"


def _element_vars(elems: Iterable[ModElement]) -> list[int]:
    vs: set[int] = set()
    for e in elems:
        for c in e.terms.values():
            vs |= c.variables()
    return sorted(vs)


def combine(coefficients: Sequence[Poly], relations: Sequence[ModElement]) -> ModElement:
    return msum(r * g for g, r in zip(coefficients, relations) if g)


def bounded_nonmembership(
    target: ModElement,
    relations: Sequence[ModElement],
    degree: int = 2,
    variables: Sequence[int] | None = None,
) -> Membership:
    """Search for ``target = sum g_i * relations[i]`` with ``deg g_i <= degree``.

    Infeasible certifies that no such combination exists within the bound.
    A feasible answer is checked by substitution before it is returned.
    """
    if degree < 0:
        raise PreconditionError("degree bound must be nonnegative")
    if variables is None:
        variables = _element_vars([target, *relations])
    mults = monomials_in(variables, 0, degree)
    columns = []
    for r in relations:
        for mu in mults:
            col = {}
            for key, c in r.terms.items():
                for mm, v in c.terms.items():
                    col[(key, mono_mul(mu, mm))] = v
            columns.append(col)
    rhs = {(key, mm): v for key, c in target.terms.items() for mm, v in c.terms.items()}
    eq_keys = set(rhs)
    for col in columns:
        eq_keys.update(col)
    x = solve_exact(columns, rhs)
    if x is None:
        return Membership(False, None, len(columns), len(eq_keys))
    coeffs = []
    for i in range(len(relations)):
        part = x[i * len(mults) : (i + 1) * len(mults)]
        coeffs.append(Poly({mu: c for mu, c in zip(mults, part) if c}))
    if combine(coeffs, relations) != target:
        raise ArithmeticError("solver returned a combination that does not reproduce the target")
    return Membership(True, coeffs, len(columns), len(eq_keys))


# --------------------------------------------------------------------------
# the worked example over Q[x1, x2] / (x1 x2)


def example_ring() -> JetRing:
    x1, x2 = Poly.gen(1, 0), Poly.gen(2, 0)
    return JetRing(2, 1, (x1 * x2,))


def example_F() -> ModElement:
    """``2 (dx2)^2 (x) x1^(0) x1^(1) + 1/2 (dx2)^2 (x) (x1^(0))^2 t^-1``."""
    sq = mono({var(2, 0): 2})
    x10, x11 = Poly.gen(1, 0), Poly.gen(1, 1)
    return ModElement({(sq, 0): x10 * x11 * 2, (sq, 1): x10 * x10 * Fraction(1, 2)})


def example_rows(ring: JetRing | None = None) -> tuple[ModElement, ModElement]:
    """``F^1, F^2``: the rows of ``d_0(x1 x2)`` and ``d_1(x1 x2)`` times ``dx2^(0)``."""
    ring = ring or example_ring()
    pres = DiffPresentation.from_ring(ring, 2)
    beta = mono([var(2, 0)])
    return pres.row(0, beta), pres.row(1, beta)


def example_combination(ring: JetRing | None = None) -> list[tuple[Poly, ModElement]]:
    F1, F2 = example_rows(ring)
    return [(Poly.gen(1, 1), F1), (Poly.gen(1, 0), F2)]


@dataclass
class Section3Certificate:
    holds: bool
    image: ModElement
    combination: ModElement
    ideal_part: ModElement
    ideal_coefficients: list[tuple[str, Poly]]
    residual: ModElement


def verify_section3_certificate(
    F: ModElement | None = None,
    combination: Sequence[tuple[Poly, ModElement]] | None = None,
    strict: bool = False,
) -> Section3Certificate:
    """Check ``phi_vee(F) = sum c_i * row_i`` exactly in the free module.

    The two sides differ by multiples ``g * e`` of the jet-ideal generators
    ``g`` and module generators ``e``; these are found by exact linear algebra
    and included in the certificate, so the identity checked is
    ``phi_vee(F) = sum c_i * row_i - sum h * g * e`` with nothing left over.
    """
    ring = example_ring()
    pres = DiffPresentation.from_ring(ring, 2)
    if F is None and combination is None:
        F, combination = example_F(), example_combination(ring)
    F = F if F is not None else ModElement()
    combination = combination or []
    image = phi_vee(F, ring)
    combo = msum(row * c for c, row in combination)
    diff = combo - image
    rows = pres.ideal_rows()
    found = bounded_nonmembership(diff, rows, degree=1, variables=ring.variables())
    labels = [f"({to_text(g)}) * {symbol_text(e)}" for g in pres.ideal for e in pres.generators]
    if found.feasible:
        ideal_part = combine(found.coefficients, rows)
        coefs = [(lab, c) for lab, c in zip(labels, found.coefficients) if c]
    else:
        ideal_part, coefs = ModElement(), []
    residual = image - (combo - ideal_part)
    cert = Section3Certificate(residual.is_zero(), image, combo, ideal_part, coefs, residual)
    if strict and not cert.holds:
        raise CertificateError("certificate does not close; residual:", residual)
    return cert


def tensor_relations(ring: JetRing, m: int, with_ideal: bool = False) -> list[ModElement]:
    """Rows ``f_beta (x) t^-j`` of ``Omega_A (x) P_n``; optionally jet-ideal multiples too."""
    base = DiffPresentation.for_base(ring, m)
    rows = [tensor_t(r, j, ring) for r in base.relations for j in range(ring.n + 1)]
    if with_ideal:
        keys = [(sym, j) for j in range(ring.n + 1) for sym in base.generators]
        rows += [ModElement.gen(k, g) for g in ring.jet_ideal() for k in keys]
    return rows


def section3_nonmembership(degree: int = 2, with_ideal: bool = False) -> Membership:
    ring = example_ring()
    return bounded_nonmembership(example_F(), tensor_relations(ring, 2, with_ideal), degree, ring.variables())
