"""Randomized and exhaustive identity suites with JSON-ready reports.

Every suite draws from its own ``random.Random`` seeded with
``"<seed>:<suite>"``, so a suite's cases do not depend on which other suites
run alongside it.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator

from hsjet.diffmod import (
    ModElement,
    canonical_dm,
    example_F,
    example_ring,
    example_rows,
    phi_vee,
    section3_nonmembership,
    verify_section3_certificate,
)
from hsjet.jetring import JetRing, Series, commute_check, d, gamma_sharp, iter_base_monomials, monomial_jet_formula
from hsjet.mderiv import (
    MDeriv,
    OperatorDeriv,
    b2_identity_check,
    divided_coefficient,
    eval_operator_m2,
    from_partials,
    nakai_check,
    sub_indices,
)
from hsjet.phimap import (
    DeltaSets,
    SeriesDeriv,
    kernel_membership_m2,
    phi_apply,
    phi_eval,
    phi_section,
    phi_vanishes_on_generators,
    tower,
    tower_compatibility_check,
    tower_image_compatibility_check,
    tower_restriction_mismatch,
)
from hsjet.ratpoly import (
    Poly,
    mono,
    mono_degree,
    mono_factors,
    mono_str,
    monomials_in,
    monomials_up_to,
    to_text,
    var,
    var_order,
)

DEFAULT_SEED = 42

Case = tuple[dict, object, object]


# --------------------------------------------------------------------------
# random inputs


def random_coeff(rng: random.Random, bound: int = 5) -> Fraction:
    num = rng.randint(-bound, bound)
    return Fraction(num, rng.choice((1, 1, 1, 2, 3)))


def random_poly(rng: random.Random, variables, max_deg: int, max_terms: int = 4, min_deg: int = 0) -> Poly:
    variables = list(variables)
    acc: dict = {}
    for _ in range(rng.randint(1, max_terms)):
        deg = rng.randint(min_deg, max_deg)
        k = mono(rng.choice(variables) for _ in range(deg))
        acc[k] = acc.get(k, 0) + random_coeff(rng)
    return Poly(acc)


def random_mderiv(rng: random.Random, m: int, ring: JetRing, value_deg: int = 1, density: float = 0.6) -> MDeriv:
    """Random table on every monomial of degree 1..m with values in A_n."""
    vs = ring.variables()
    table = {}
    for k in monomials_up_to(ring.s, ring.n, m):
        if rng.random() < density:
            table[k] = random_poly(rng, vs, value_deg, 2)
    return MDeriv(m, ring, table)


def random_series_deriv(rng: random.Random, m: int, ring: JetRing, value_deg: int = 1) -> SeriesDeriv:
    vs = ring.variables()
    table = {}
    for k in iter_base_monomials(ring.s, 1, m):
        table[k] = Series([random_poly(rng, vs, value_deg, 2) for _ in range(ring.n + 1)])
    return SeriesDeriv(m, ring, table)


# --------------------------------------------------------------------------
# suites


def _leibniz(rng: random.Random) -> Iterator[Case]:
    for _ in range(300):
        s, n = rng.randint(1, 3), rng.randint(0, 4)
        ring = JetRing(s, n)
        base = ring.base_variables()
        f, g = random_poly(rng, base, 4), random_poly(rng, base, 4)
        j = rng.randint(0, n)
        rhs = sum((d(f, a, ring) * d(g, j - a, ring) for a in range(j + 1)), Poly())
        yield {"s": s, "n": n, "f": to_text(f), "g": to_text(g), "j": j}, d(f * g, j, ring), rhs


def _xbeta(rng: random.Random) -> Iterator[Case]:
    for s in (1, 2, 3):
        for beta in product(range(6), repeat=s):
            if not 1 <= sum(beta) <= 5 or beta[-1] == 0:
                continue
            for j in range(5):
                f = Poly.monomial(mono({var(i + 1, 0): b for i, b in enumerate(beta)}))
                yield {"beta": list(beta), "j": j}, d(f, j), monomial_jet_formula(beta, j)


def _worked_example(rng: random.Random) -> Iterator[Case]:
    ring = JetRing(2, 1)
    ds = DeltaSets(2, 1, 2)
    x = {(i, j): var(i, j) for i in (1, 2) for j in (0, 1)}
    expected_sets = {
        "delta0": sorted(mono_str(mono(f)) for f in ([x[1, 0]], [x[2, 0]], [x[1, 0]] * 2, [x[1, 0], x[2, 0]], [x[2, 0]] * 2)),
        "delta_1^1": sorted(mono_str(mono(f)) for f in ([x[1, 1]], [x[1, 0], x[1, 1]], [x[1, 1], x[2, 0]])),
        "delta_2^1": sorted(mono_str(mono(f)) for f in ([x[2, 1]], [x[2, 1], x[2, 0]])),
    }
    actual_sets = {
        "delta0": sorted(mono_str(k) for k in ds.delta0),
        "delta_1^1": sorted(mono_str(k) for k in ds.delta_ij[1, 1]),
        "delta_2^1": sorted(mono_str(k) for k in ds.delta_ij[2, 1]),
    }
    yield {"strata": "s=2 n=1 m=2"}, expected_sets, actual_sets
    x1, x2 = Poly.gen(1, 0), Poly.gen(2, 0)
    for trial in range(25):
        comps = []
        for _ in range(2):
            Ej = random_mderiv(rng, 2, JetRing(2, 0), value_deg=1, density=0.8)
            # values live in A_1, so lift with random jet terms
            comps.append({k: Ej.value(k) + random_poly(rng, ring.variables(), 1, 1) for k in iter_base_monomials(2, 1, 2)})
        E = SeriesDeriv.from_components(2, ring, comps)
        D = phi_section(E, ring)
        E0, E1 = comps
        tag = {"trial": trial}
        for f in (x1, x1 * x1, x1 * x2):
            yield {**tag, "f": to_text(f)}, E(f), phi_eval(D, f, ring)
        yield {**tag, "D": "x1^(1)"}, E1[mono([x[1, 0]])], D.eval_monomial(mono([x[1, 1]]))
        yield {**tag, "D": "x1^(0)*x1^(1)"}, E1[mono([x[1, 0]] * 2)] * Fraction(1, 2), D.eval_monomial(mono([x[1, 0], x[1, 1]]))
        yield {**tag, "D": "x1^(1)*x2^(0)"}, E1[mono([x[1, 0], x[2, 0]])], D.eval_monomial(mono([x[1, 1], x[2, 0]]))
        yield {**tag, "D": "x1^(0)*x2^(1)"}, Poly(), D.eval_monomial(mono([x[1, 0], x[2, 1]]))


def _nakai_phi(rng: random.Random) -> Iterator[Case]:
    for trial in range(100):
        m, s, n = rng.choice((2, 3)), rng.randint(1, 2), rng.randint(0, 2)
        ring = JetRing(s, n)
        D = random_mderiv(rng, m, ring, value_deg=1, density=0.5)
        Dbar = lambda a, D=D, ring=ring: phi_eval(D, a, ring)  # noqa: E731
        act = lambda a, v, ring=ring: gamma_sharp(a, ring) * v  # noqa: E731
        bad = None
        for _ in range(20):
            xs = [random_poly(rng, ring.base_variables(), 2, 2, min_deg=1) for _ in range(m + 1)]
            if not nakai_check(Dbar, xs, act=act, m=m):
                bad = [to_text(p) for p in xs]
                break
        yield {"trial": trial, "m": m, "s": s, "n": n, "tuple": bad}, True, bad is None


def _section(rng: random.Random) -> Iterator[Case]:
    shapes = ((1, 2, 2), (2, 1, 2), (2, 2, 3))
    for trial in range(100):
        s, n, m = shapes[trial % 3]
        ring = JetRing(s, n)
        E = random_series_deriv(rng, m, ring)
        back = phi_apply(phi_section(E, ring), ring)
        for k in iter_base_monomials(s, 1, m):
            yield {"trial": trial, "s": s, "n": n, "m": m, "monomial": mono_str(k)}, E.value(k), back.value(k)


def random_kernel_candidate(rng: random.Random, n: int) -> MDeriv:
    """Random order-2 operator on A_n of Q[x]; about half are pushed into the kernel."""
    ring = JetRing(1, n)
    spec = []
    for k in monomials_up_to(1, n, 2):
        if rng.random() < 0.5:
            spec.append((k, random_coeff(rng, 3)))
    D = from_partials(spec, ring, 2) if spec else MDeriv(2, ring, {})
    if rng.random() < 0.5:
        table = dict(D.table)
        for j in range(n + 1):
            table.pop(mono([var(1, j)]), None)
        for j in range(n + 1):
            rest = sum(
                (table.get(mono([var(1, i), var(1, j - i)]), Poly()) for i in range(1, j)),
                Poly(),
            )
            key = mono([var(1, 0), var(1, j)])
            table[key] = rest * Fraction(-1, 2) if j else Poly()
        D = MDeriv(2, ring, table)
    return D


def _kernel(rng: random.Random) -> Iterator[Case]:
    for trial in range(200):
        n = rng.randint(0, 3)
        D = random_kernel_candidate(rng, n)
        verdict = kernel_membership_m2(D)
        vanish = phi_vanishes_on_generators(D)
        full = phi_apply(D, JetRing(1, n)).is_zero()
        inputs = {"trial": trial, "n": n, "table": {mono_str(k): to_text(v) for k, v in sorted(D.table.items())}}
        yield {**inputs, "check": "member <=> phi(D)(x, x^2) = 0"}, vanish, verdict.member
        yield {**inputs, "check": "phi(D) = 0 on all of degree <= 2"}, vanish, full


def _notiny(rng: random.Random) -> Iterator[Case]:
    for m in (2, 3):
        for n in (1, 2, 3):
            ring = JetRing(1, n)
            D = from_partials([(mono([var(1, n)] * m), Fraction(1, 2 if m == 2 else 6))], ring, m)
            yield {"m": m, "n": n}, True, phi_apply(D, ring).is_zero()


def _tower(rng: random.Random) -> Iterator[Case]:
    for k in range(6):
        D = tower(k)
        yield {"k": k, "check": "phi(D_k) = 0"}, True, phi_apply(D, JetRing(1, k)).is_zero()
        yield {"k": k, "check": "kernel membership"}, True, kernel_membership_m2(D).member
        if k >= 1:
            bad = tower_restriction_mismatch(k)
            detail = None
            if bad is not None:
                j, mm, a, b = bad
                detail = f"D_{k}({mono_str(mm)}) = {to_text(a)} but D_{j}({mono_str(mm)}) = {to_text(b)}"
            yield {"k": k, "check": "D_k restricted to A_j equals D_j", "mismatch": detail}, True, tower_compatibility_check(k)
            yield {"k": k, "check": "D_k agrees with D_j on d_i(A)"}, True, tower_image_compatibility_check(k)
    x = [Poly.gen(1, j) for j in range(4)]
    D2, D3 = tower(2), tower(3)
    yield {"value": "D_2(x0*x2)"}, Fraction(-1, 2), D2.eval(x[0] * x[2]).coeff(())
    yield {"value": "D_2(x1^2)"}, 1, D2.eval(x[1] * x[1]).coeff(())
    yield {"value": "2*D_2(x0*x2) + D_2(x1^2)"}, Poly(), D2.eval(x[0] * x[2]) * 2 + D2.eval(x[1] * x[1])
    yield {"value": "D_3(x0*x3)"}, 1, D3.eval(x[0] * x[3]).coeff(())
    yield {"value": "D_3(x1*x2)"}, -1, D3.eval(x[1] * x[2]).coeff(())
    yield {"value": "2*D_3(x0*x3) + 2*D_3(x1*x2)"}, Poly(), D3.eval(x[0] * x[3]) * 2 + D3.eval(x[1] * x[2]) * 2
    yield {"value": "D_0"}, True, not tower(0).table


def _b2_module_rhs(beta, size) -> ModElement:
    acc = ModElement()
    for order, weight in ((2, 1), (1, 2 - size)):
        if not weight:
            continue
        for alpha in sub_indices(beta, order):
            c, rest = divided_coefficient(beta, alpha)
            acc = acc + canonical_dm(Poly.monomial(alpha), 2) * Poly.monomial(rest, c * weight)
    return acc


def _b2(rng: random.Random) -> Iterator[Case]:
    for trial in range(50):
        s = 1 + trial % 2
        ring = JetRing(s, 0)
        D = random_mderiv(rng, 2, ring, value_deg=2, density=0.9)
        F = OperatorDeriv.from_table(D)
        for beta in monomials_in(ring.base_variables(), 1, 5):
            yield {"trial": trial, "beta": mono_str(beta), "form": "closed"}, D.eval_monomial(beta), eval_operator_m2(F, beta)
            yield {"trial": trial, "beta": mono_str(beta), "form": "expansion"}, True, b2_identity_check(beta, D)
    for s in (1, 2):
        for beta in monomials_in([var(i, 0) for i in range(1, s + 1)], 1, 5):
            size = mono_degree(beta)
            yield {"s": s, "beta": mono_str(beta), "form": "module"}, canonical_dm(Poly.monomial(beta), 2), _b2_module_rhs(beta, size)


def _random_jet_index(rng: random.Random, s: int, l: int, size: int):
    for _ in range(50):
        factors = [var(rng.randint(1, s), rng.randint(0, l)) for _ in range(size)]
        alpha = mono(factors)
        if sum(var_order(v) for v in factors) <= l:
            return alpha
    return mono([var(1, 0)] * size)


def _commute(rng: random.Random) -> Iterator[Case]:
    for trial in range(300):
        n, s = rng.randint(0, 4), rng.randint(1, 2)
        l = rng.randint(0, n)
        size = 1 if trial % 4 == 0 else rng.randint(0, 3)
        alpha = _random_jet_index(rng, s, l, size)
        ring = JetRing(s, n)
        f = random_poly(rng, ring.base_variables(), 5, 4)
        lhs, rhs = commute_check(alpha, l, f, ring)
        yield {"alpha": mono_str(alpha), "l": l, "n": n, "f": to_text(f)}, lhs, rhs


def _section3(rng: random.Random) -> Iterator[Case]:
    cert = verify_section3_certificate()
    yield {"check": "certificate"}, True, cert.holds
    ring = example_ring()
    F1, F2 = example_rows(ring)
    dx10, dx20 = var(1, 0), var(2, 0)
    x10, x20 = Poly.gen(1, 0), Poly.gen(2, 0)
    expected_F1 = ModElement({mono([dx10, dx20]): x20, mono([dx20, dx20]): x10})
    yield {"check": "F^1 row"}, expected_F1, F1
    expected_image = ModElement({mono([dx20, dx20]): x10 * Poly.gen(1, 1) * 2, mono([dx20, var(2, 1)]): x10 * x10})
    yield {"check": "phi_vee(F)"}, expected_image, phi_vee(example_F(), ring)
    yield {"check": "zero F"}, True, verify_section3_certificate(ModElement(), []).holds
    yield {"check": "F outside the relation rows, degree <= 2"}, "infeasible", section3_nonmembership(2).verdict


def _permutation(rng: random.Random) -> Iterator[Case]:
    for trial in range(200):
        m = rng.choice((2, 3))
        s, n = rng.randint(1, 2), rng.randint(0, 2)
        ring = JetRing(s, n)
        D = random_mderiv(rng, m, ring, value_deg=1)
        vs = ring.variables()
        factors = [rng.choice(vs) for _ in range(rng.randint(m + 1, m + 4))]
        k = mono(factors)
        ref = D.eval_monomial(k)
        for p in range(2):
            perm = list(mono_factors(k))
            rng.shuffle(perm)
            yield {"trial": trial, "m": m, "monomial": mono_str(k), "order": [mono_str(mono([v])) for v in perm]}, ref, D.eval_with_factors(perm)


SUITES: dict[str, Callable[[random.Random], Iterator[Case]]] = {
    "leibniz": _leibniz,
    "xbeta": _xbeta,
    "worked_example": _worked_example,
    "nakai_phi": _nakai_phi,
    "section": _section,
    "kernel": _kernel,
    "notiny": _notiny,
    "tower": _tower,
    "b2": _b2,
    "commute": _commute,
    "section3": _section3,
    "permutation": _permutation,
}


# --------------------------------------------------------------------------
# reports


def show(x):
    if isinstance(x, Poly):
        return to_text(x)
    if isinstance(x, (Series, ModElement)):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, dict):
        return {str(k): show(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [show(v) for v in x]
    return str(x)


def run_suite(name: str, seed: int = DEFAULT_SEED) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or 'all'")
    rng = random.Random(f"{seed}:{name}")
    cases = passed = 0
    first = None
    for inputs, expected, actual in SUITES[name](rng):
        cases += 1
        if expected == actual:
            passed += 1
        elif first is None:
            first = {"inputs": show(inputs), "expected": show(expected), "actual": show(actual)}
    return {
        "suite": name,
        "seed": seed,
        "cases": cases,
        "passed": passed,
        "failed": cases - passed,
        "first_failure": first,
    }


def run(suite: str = "all", seed: int = DEFAULT_SEED) -> dict:
    names = list(SUITES) if suite == "all" else [suite]
    reports = [run_suite(n, seed) for n in names]
    return {"seed": seed, "ok": all(r["failed"] == 0 for r in reports), "suites": reports}
