"""The map ``D -> (a -> sum_j D(d_j a) t^j)`` from Der^m(A_n) to Der^m(A, B_n).

Its explicit section, the order-2 kernel test over ``Q[x]`` and the tower of
kernel elements D_0, D_1, D_2, ... live here too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from hsjet.jetring import (
    JetRing,
    PreconditionError,
    Series,
    d,
    gamma_sharp,
    iter_base_monomials,
    split_lines,
)
from hsjet.kernels import mono_mul
from hsjet.mderiv import DerivationError, MDeriv, from_partials, zero_deriv
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
    to_text,
    var,
    var_base,
    var_order,
)


class DomainMismatch(ValueError):
    pass


# --------------------------------------------------------------------------
# B_n-valued derivations of the base ring


class SeriesDeriv:
    """Order-m derivation ``A -> A_N (x) B_n`` with A acting through gamma_sharp.

    Stored by its values on base monomials of degree 1..m.  The t^j
    coefficients of those values are the components ``E_j``; note that the
    components alone are not derivations for the plain action of A, the
    product rule mixes them through ``gamma_sharp``.
    """

    def __init__(self, m: int, ring: JetRing, table: Mapping[Monomial, Series] | None = None):
        self.m = m
        self.ring = ring
        clean = {}
        for k, v in (table or {}).items():
            if not 1 <= mono_degree(k) <= m:
                raise DerivationError(f"table key {mono_str(k)} has degree outside 1..{m}")
            if any(var_order(x) or var_base(x) > ring.s for x in mono_dict(k)):
                raise DerivationError(f"table key {mono_str(k)} is not a base monomial")
            if v.n != ring.n:
                raise DerivationError("series truncation does not match the ring")
            if not v.is_zero():
                clean[k] = v
        self.table = clean
        self._memo: dict[Monomial, Series] = {}
        self._gamma: dict[Monomial, Series] = {}

    @classmethod
    def from_components(cls, m: int, ring: JetRing, components: Sequence[Mapping[Monomial, Poly]]) -> "SeriesDeriv":
        if len(components) != ring.n + 1:
            raise DerivationError(f"need {ring.n + 1} components, got {len(components)}")
        keys = set()
        for comp in components:
            keys.update(comp)
        table = {k: Series([Poly.coerce(comp.get(k, ZERO)) for comp in components]) for k in keys}
        return cls(m, ring, table)

    def basis(self) -> list[Monomial]:
        return iter_base_monomials(self.ring.s, 1, self.m)

    def value(self, k: Monomial) -> Series:
        return self.table.get(k) or Series.zero(self.ring.n)

    def component(self, j: int) -> dict[Monomial, Poly]:
        return {k: v.coeffs[j] for k, v in self.table.items() if v.coeffs[j]}

    def _gamma_mono(self, k: Monomial) -> Series:
        hit = self._gamma.get(k)
        if hit is None:
            hit = gamma_sharp(Poly.monomial(k), self.ring)
            self._gamma[k] = hit
        return hit

    def eval_monomial(self, k: Monomial) -> Series:
        deg = mono_degree(k)
        if deg == 0:
            return Series.zero(self.ring.n)
        if deg <= self.m:
            return self.value(k)
        hit = self._memo.get(k)
        if hit is None:
            hit = self._split(mono_factors(k))
            self._memo[k] = hit
        return hit

    def _split(self, factors: list[int]) -> Series:
        m = self.m
        parts = [(v, 1) for v in factors[:m]] + [mono(factors[m:])]
        total = Series.zero(self.ring.n)
        for s in range(1, m + 1):
            for chosen in combinations(range(m + 1), s):
                mult: Monomial = ()
                rest: Monomial = ()
                for i in range(m + 1):
                    if i in chosen:
                        mult = mono_mul(mult, parts[i])
                    else:
                        rest = mono_mul(rest, parts[i])
                term = self._gamma_mono(mult) * self.eval_monomial(rest)
                total = total + term if s % 2 else total - term
        return total

    def __call__(self, f: Poly) -> Series:
        if not self.ring.is_base(f):
            raise DerivationError("argument must be a base-ring polynomial")
        total = Series.zero(self.ring.n)
        for k, c in f.terms.items():
            total = total + self.eval_monomial(k) * c
        return total

    def act(self, a: Poly, value: Series) -> Series:
        """Module action of a base element on a value."""
        return gamma_sharp(a, self.ring) * value

    def __eq__(self, other):
        if not isinstance(other, SeriesDeriv):
            return NotImplemented
        return (
            self.ring.s == other.ring.s
            and self.ring.n == other.ring.n
            and all(self.value(k) == other.value(k) for k in set(self.table) | set(other.table))
        )

    def is_zero(self) -> bool:
        return not self.table

    def __repr__(self):
        return f"SeriesDeriv(m={self.m}, s={self.ring.s}, n={self.ring.n}, entries={len(self.table)})"


# --------------------------------------------------------------------------
# the map and its section


def phi_eval(D: MDeriv, f: Poly, ring: JetRing) -> Series:
    """``sum_j D(d_j f) t^j`` evaluated directly."""
    _check_domain(D, ring)
    return Series([D.eval(d(f, j, ring)) for j in range(ring.n + 1)])


def _check_domain(D: MDeriv, ring: JetRing):
    if D.domain.s != ring.s or D.domain.n != ring.n:
        raise DomainMismatch(
            f"derivation is defined on A_{D.domain.n} with s={D.domain.s}, "
            f"ring is A_{ring.n} with s={ring.s}"
        )


def phi_apply(D: MDeriv, ring: JetRing) -> SeriesDeriv:
    _check_domain(D, ring)
    table = {k: phi_eval(D, Poly.monomial(k), ring) for k in iter_base_monomials(ring.s, 1, D.m)}
    return SeriesDeriv(D.m, ring, table)


@dataclass
class DeltaSets:
    """Strata of the monomials of degree 1..m in the jet variables of A_n."""

    s: int
    n: int
    m: int
    delta: list[Monomial] = field(init=False)
    delta0: list[Monomial] = field(init=False)
    delta_ij: dict[tuple[int, int], list[Monomial]] = field(init=False)

    def __post_init__(self):
        self.delta = monomials_up_to(self.s, self.n, self.m)
        self.delta0 = []
        self.delta_ij = {(i, j): [] for i in range(1, self.s + 1) for j in range(1, self.n + 1)}
        for k in self.delta:
            tag = self.classify(k)
            if tag == 0:
                self.delta0.append(k)
            elif tag is not None:
                self.delta_ij[tag].append(k)

    @staticmethod
    def classify(k: Monomial):
        """``0`` for pure order-0 monomials, ``(i, j)`` for the jet stratum, else None."""
        exps = mono_dict(k)
        jets = [(v, e) for v, e in exps.items() if var_order(v) > 0]
        if not jets:
            return 0
        if len(jets) != 1 or jets[0][1] != 1:
            return None
        i, j = var_base(jets[0][0]), var_order(jets[0][0])
        if any(var_base(v) < i for v, e in exps.items() if var_order(v) == 0):
            return None
        return (i, j)


def phi_section(E: SeriesDeriv, ring: JetRing | None = None, characteristic: int = 0) -> MDeriv:
    """A derivation D on A_n with ``phi_apply(D) = E``.

    The construction divides by exponents, so only characteristic 0 is accepted.
    """
    if characteristic != 0:
        raise PreconditionError("the section needs characteristic 0")
    ring = ring or E.ring
    if ring.s != E.ring.s or ring.n != E.ring.n:
        raise DomainMismatch("series derivation and ring disagree")
    table = {}
    for k in monomials_up_to(ring.s, ring.n, E.m):
        tag = DeltaSets.classify(k)
        if tag is None:
            continue
        exps = mono_dict(k)
        if tag == 0:
            val = E.value(k).coeffs[0]
        else:
            i, j = tag
            del exps[var(i, j)]
            a0 = exps.get(var(i, 0), 0)
            exps[var(i, 0)] = a0 + 1
            val = E.value(mono(exps)).coeffs[j] * Fraction(1, a0 + 1)
        if val:
            table[k] = val
    return MDeriv(E.m, ring, table)


# --------------------------------------------------------------------------
# kernel over Q[x], order 2


@dataclass
class KernelVerdict:
    member: bool
    witness: str | None = None
    linear: list[Poly] = field(default_factory=list)
    quadratic: list[Poly] = field(default_factory=list)

    def __bool__(self):
        return self.member


def kernel_membership_m2(D: MDeriv) -> KernelVerdict:
    """Vanishing of ``F_{e_j}`` and ``sum_{i<=j} F_{e_i + e_{j-i}}`` for all ``j <= n``."""
    if D.domain.s != 1 or D.m != 2:
        raise DerivationError("kernel test needs s = 1 and m = 2")
    n = D.domain.n
    x = [Poly.gen(1, j) for j in range(n + 1)]
    linear = [D.eval(x[j]) for j in range(n + 1)]
    quadratic = [sum((D.eval(x[i] * x[j - i]) for i in range(j + 1)), ZERO) for j in range(n + 1)]
    witness = None
    for j, v in enumerate(linear):
        if v:
            witness = f"F_e{j} = {to_text(v)}"
            break
    if witness is None:
        for j, v in enumerate(quadratic):
            if v:
                witness = f"sum_(i=0..{j}) F_(e_i+e_{j}-i) = {to_text(v)}"
                break
    return KernelVerdict(witness is None, witness, linear, quadratic)


def phi_vanishes_on_generators(D: MDeriv) -> bool:
    """``phi(D)`` is zero on ``x`` and ``x^2``, which pin down order-2 maps on Q[x]."""
    ring = JetRing(1, D.domain.n)
    x = Poly.gen(1, 0)
    return phi_eval(D, x, ring).is_zero() and phi_eval(D, x * x, ring).is_zero()


# --------------------------------------------------------------------------
# the tower D_0, D_1, D_2, ...


def _pair(i: int, j: int) -> Monomial:
    return mono([var(1, i), var(1, j)])


def tower_spec(k: int) -> list[tuple[Monomial, Fraction]]:
    if k < 0:
        raise ValueError("level must be nonnegative")
    spec: list[tuple[Monomial, Fraction]] = []
    if k >= 1:
        spec.append((_pair(1, 1), Fraction(1, 2)))
    if k >= 2:
        spec.append((_pair(0, 2), Fraction(-1, 2)))
    for level in range(3, k + 1):
        spec.append((_pair(0, level), Fraction(1)))
        spec.append((_pair(1, level - 1), Fraction(-1)))
    return spec


def tower(k: int) -> MDeriv:
    """``D_k`` on ``A_k`` of ``Q[x]``, built from its operator recursion."""
    ring = JetRing(1, k)
    spec = tower_spec(k)
    if not spec:
        return zero_deriv(2, ring)
    return from_partials(spec, ring, 2)


def tower_restriction_mismatch(k: int):
    """First ``(j, monomial, D_k value, D_j value)`` where ``D_k|A_j != D_j``."""
    if k < 1:
        raise ValueError("need k >= 1")
    Dk = tower(k)
    for j in range(k):
        Dj = tower(j)
        for mm in monomials_up_to(1, j, 2):
            f = Poly.monomial(mm)
            a, b = Dk.eval(f), Dj.eval(f)
            if a != b:
                return j, mm, a, b
    return None


def tower_compatibility_check(k: int) -> bool:
    """``D_k`` restricted to ``A_j`` equals ``D_j`` on every monomial of degree <= 2."""
    return tower_restriction_mismatch(k) is None


def tower_image_compatibility_check(k: int) -> bool:
    """``D_k`` and ``D_j`` agree on ``d_i(A)`` for all ``i <= j < k``.

    Both sides are order-2 data on Q[x], so ``x`` and ``x^2`` suffice.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    Dk = tower(k)
    x = Poly.gen(1, 0)
    for j in range(k):
        Dj = tower(j)
        ring = JetRing(1, j)
        for f in (x, x * x):
            for i in range(j + 1):
                g = d(f, i, ring)
                if Dk.eval(g) != Dj.eval(g):
                    return False
    return True


# --------------------------------------------------------------------------
# text format


def parse_series_deriv(text: str, ring: JetRing) -> SeriesDeriv:
    """Parse ``series m=<int>`` followed by ``comp <j> <base monomial> <poly>`` lines."""
    lines = split_lines(text)
    if not lines or lines[0].split()[0] != "series":
        raise DerivationError("series derivation spec must start with 'series m=<int>'")
    m = None
    for tok in lines[0].split()[1:]:
        key, _, val = tok.partition("=")
        if key != "m" or not val.isdigit():
            raise DerivationError(f"bad header token {tok!r}")
        m = int(val)
    if m is None:
        raise DerivationError("missing m=<int> in header")
    comps: list[dict[Monomial, Poly]] = [{} for _ in range(ring.n + 1)]
    for ln in lines[1:]:
        parts = ln.split(None, 3)
        if len(parts) != 4 or parts[0] != "comp" or not parts[1].isdigit():
            raise DerivationError(f"expected 'comp <j> <monomial> <poly>', got {ln!r}")
        j = int(parts[1])
        if j > ring.n:
            raise DerivationError(f"component t^{j} exceeds n={ring.n}")
        k = parse_monomial(parts[2])
        comps[j][k] = comps[j].get(k, ZERO) + parse(parts[3])
    return SeriesDeriv.from_components(m, ring, comps)


def series_deriv_to_text(E: SeriesDeriv) -> str:
    lines = [f"series m={E.m}"]
    for j in range(E.ring.n + 1):
        for k in E.basis():
            v = E.value(k).coeffs[j]
            if v:
                lines.append(f"comp {j} {mono_str(k)} {to_text(v)}")
    return "\n".join(lines)
