import random
from fractions import Fraction

import pytest

from hsjet.jetring import JetRing, PreconditionError, Series, d, gamma_sharp, iter_base_monomials
from hsjet.mderiv import DerivationError, from_partials, nakai_check, zero_deriv
from hsjet.phimap import (
    DeltaSets,
    DomainMismatch,
    SeriesDeriv,
    kernel_membership_m2,
    parse_series_deriv,
    phi_apply,
    phi_eval,
    phi_section,
    phi_vanishes_on_generators,
    series_deriv_to_text,
    tower,
    tower_compatibility_check,
    tower_image_compatibility_check,
    tower_restriction_mismatch,
)
from hsjet.ratpoly import Poly, mono, mono_degree, partial, var
from hsjet.verify import random_kernel_candidate, random_mderiv, random_poly, random_series_deriv

x1, x2 = Poly.gen(1, 0), Poly.gen(2, 0)


def jet(i, j):
    return Poly.gen(i, j)


def test_delta_sets_worked_example():
    ds = DeltaSets(2, 1, 2)
    assert set(ds.delta0) == {
        mono([var(1, 0)]),
        mono([var(2, 0)]),
        mono([var(1, 0)] * 2),
        mono([var(1, 0), var(2, 0)]),
        mono([var(2, 0)] * 2),
    }
    assert set(ds.delta_ij[1, 1]) == {mono([var(1, 1)]), mono([var(1, 0), var(1, 1)]), mono([var(1, 1), var(2, 0)])}
    assert set(ds.delta_ij[2, 1]) == {mono([var(2, 1)]), mono([var(2, 1), var(2, 0)])}


def test_delta_sets_disjoint():
    ds = DeltaSets(2, 2, 3)
    seen = set(ds.delta0)
    for part in ds.delta_ij.values():
        assert not seen & set(part)
        seen |= set(part)
    assert seen <= set(ds.delta)


def test_worked_example_section():
    rng = random.Random(2)
    R = JetRing(2, 1)
    E = random_series_deriv(rng, 2, R)
    D = phi_section(E, R)
    E1 = E.component(1)
    zero = Poly()
    assert D.eval(jet(1, 1)) == E1.get(mono([var(1, 0)]), zero)
    assert D.eval(jet(1, 0) * jet(1, 1)) == E1.get(mono([var(1, 0)] * 2), zero) * Fraction(1, 2)
    assert D.eval(jet(1, 1) * jet(2, 0)) == E1.get(mono([var(1, 0), var(2, 0)]), zero)
    for f in (x1, x1 * x1, x1 * x2, x2, x2 * x2):
        assert phi_eval(D, f, R) == E(f)


def test_section_of_zero():
    R = JetRing(2, 2)
    assert phi_section(SeriesDeriv(2, R), R).table == {}


@pytest.mark.parametrize("shape", [(1, 2, 2), (2, 1, 2), (2, 2, 3)])
def test_section_round_trip(shape):
    s, n, m = shape
    rng = random.Random(sum(shape))
    R = JetRing(s, n)
    for _ in range(10):
        E = random_series_deriv(rng, m, R)
        assert phi_apply(phi_section(E, R), R) == E
    assert len(iter_base_monomials(2, 1, 3)) == 9


def test_section_rejects_positive_characteristic():
    R = JetRing(1, 1)
    with pytest.raises(PreconditionError):
        phi_section(SeriesDeriv(2, R), R, characteristic=3)


def test_phi_is_an_order_m_derivation():
    rng = random.Random(9)
    for _ in range(15):
        m, s, n = rng.choice((2, 3)), rng.randint(1, 2), rng.randint(0, 2)
        R = JetRing(s, n)
        D = random_mderiv(rng, m, R)
        Dbar = lambda a: phi_eval(D, a, R)  # noqa: E731
        act = lambda a, v: gamma_sharp(a, R) * v  # noqa: E731
        for _ in range(5):
            xs = [random_poly(rng, R.base_variables(), 2, 2, min_deg=1) for _ in range(m + 1)]
            assert nakai_check(Dbar, xs, act=act, m=m)


def test_series_extension_matches_direct_map():
    rng = random.Random(4)
    R = JetRing(2, 2)
    for m in (2, 3):
        D = random_mderiv(rng, m, R)
        E = phi_apply(D, R)
        for _ in range(10):
            f = random_poly(rng, R.base_variables(), 6, 3)
            assert E(f) == phi_eval(D, f, R)


def test_components_alone_are_not_plain_derivations():
    # with E_0 != 0 the t^1 part of E(x^2) picks up x^(1) E_0(x) through gamma_sharp
    R = JetRing(1, 1)
    D = from_partials([(mono([var(1, 0)]), 1), (mono([var(1, 1)]), 1)], R, 1)
    E = phi_apply(D, R)
    x = x1
    E0, E1 = (lambda f: E(f).coeffs[0]), (lambda f: E(f).coeffs[1])
    plain = E1(x) * x * 2
    assert E1(x * x) != plain
    twisted = (gamma_sharp(x, R) * E(x)) * 2
    assert E(x * x) == twisted
    assert E0(x * x) == x * 2 * E0(x)


def test_order_one_specialization():
    # phi of sum c_ij d/dx_i^(j) applied to f is sum_k sum c_ij d_{k-j}(df/dx_i) t^k
    rng = random.Random(6)
    R = JetRing(2, 2)
    for _ in range(10):
        coeffs = {(i, j): Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for i in (1, 2) for j in range(3)}
        D = from_partials([(mono([var(i, j)]), c) for (i, j), c in coeffs.items() if c], R, 1)
        f = random_poly(rng, R.base_variables(), 4, 4)
        expect = []
        for k in range(3):
            acc = Poly()
            for (i, j), c in coeffs.items():
                if j <= k:
                    acc = acc + d(partial(f, [var(i, 0)]), k - j, R) * c
            expect.append(acc)
        assert phi_eval(D, f, R) == Series(expect)


def test_phi_is_linear_over_jet_ring():
    rng = random.Random(8)
    R = JetRing(2, 1)
    for _ in range(10):
        D = random_mderiv(rng, 2, R)
        F = random_poly(rng, R.variables(), 2, 3)
        lhs = phi_apply(D * F, R)
        rhs = phi_apply(D, R)
        for k in iter_base_monomials(2, 1, 2):
            assert lhs.value(k) == rhs.value(k) * F


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        phi_apply(zero_deriv(2, JetRing(1, 1)), JetRing(1, 2))


def test_notiny():
    for m, c in ((2, Fraction(1, 2)), (3, Fraction(1, 6))):
        for n in (1, 2, 3):
            R = JetRing(1, n)
            D = from_partials([(mono([var(1, n)] * m), c)], R, m)
            assert phi_apply(D, R).is_zero()


def test_kernel_examples():
    for n in (1, 2, 3):
        D = from_partials([(mono([var(1, n)] * 2), Fraction(1, 2))], JetRing(1, n), 2)
        assert kernel_membership_m2(D).member
    D0 = from_partials([(mono([var(1, 0)] * 2), Fraction(1, 2))], JetRing(1, 0), 2)
    assert not kernel_membership_m2(D0).member
    D = from_partials([(mono([var(1, 0), var(1, 1)]), 1)], JetRing(1, 1), 2)
    verdict = kernel_membership_m2(D)
    assert not verdict.member
    assert verdict.quadratic[1] == Poly.const(2)
    assert kernel_membership_m2(zero_deriv(2, JetRing(1, 2))).member
    with pytest.raises(DerivationError):
        kernel_membership_m2(zero_deriv(3, JetRing(1, 2)))


def test_kernel_equivalence_random():
    rng = random.Random(12)
    members = 0
    for _ in range(120):
        n = rng.randint(0, 3)
        D = random_kernel_candidate(rng, n)
        verdict = kernel_membership_m2(D).member
        members += verdict
        assert verdict == phi_vanishes_on_generators(D)
        assert verdict == phi_apply(D, JetRing(1, n)).is_zero()
    assert 20 < members < 100


def test_tower_values():
    assert tower(0).table == {}
    D2, D3 = tower(2), tower(3)
    x = [jet(1, j) for j in range(4)]
    assert D2.eval(x[0] * x[2]) == Poly.const(Fraction(-1, 2))
    assert D2.eval(x[1] * x[1]) == Poly.const(1)
    assert D3.eval(x[0] * x[3]) * 2 + D3.eval(x[1] * x[2]) * 2 == Poly()
    assert D3.eval(x[0] * x[3]) == Poly.const(1)
    for k in range(6):
        assert kernel_membership_m2(tower(k)).member
        assert phi_apply(tower(k), JetRing(1, k)).is_zero()


def test_tower_restriction_literal():
    assert tower_compatibility_check(1)
    assert tower_compatibility_check(2)
    # the -d^2/dx1 dx(k-1) term already acts on A_{k-1}
    j, mm, a, b = tower_restriction_mismatch(3)
    assert (j, mm, a, b) == (2, mono([var(1, 1), var(1, 2)]), Poly.const(-1), Poly())
    for k in (3, 4, 5):
        assert not tower_compatibility_check(k)


def test_tower_agrees_on_jet_images():
    for k in range(1, 7):
        assert tower_image_compatibility_check(k)


def test_series_text_round_trip():
    rng = random.Random(1)
    R = JetRing(2, 1)
    E = random_series_deriv(rng, 2, R)
    assert parse_series_deriv(series_deriv_to_text(E), R) == E


def test_series_deriv_validation():
    R = JetRing(1, 1)
    with pytest.raises(DerivationError):
        SeriesDeriv(2, R, {mono([var(1, 1)]): Series.zero(1)})
    with pytest.raises(DerivationError):
        SeriesDeriv(2, R, {mono([var(1, 0)] * 3): Series.zero(1)})
    with pytest.raises(DerivationError):
        SeriesDeriv(2, R, {mono([var(1, 0)]): Series.zero(2)})
    assert all(mono_degree(k) <= 2 for k in SeriesDeriv(2, R).basis())
