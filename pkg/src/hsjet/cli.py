"""Command-line front end.

Exit codes: 0 on success, 1 when a requested check fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from hsjet import diffmod, verify
from hsjet.jetring import JetRing, commute_check, d, gamma_sharp, parse_ring
from hsjet.mderiv import deriv_to_text, parse_deriv
from hsjet.phimap import (
    kernel_membership_m2,
    parse_series_deriv,
    phi_apply,
    phi_eval,
    phi_section,
    series_deriv_to_text,
    tower,
    tower_compatibility_check,
    tower_image_compatibility_check,
)
from hsjet.ratpoly import mono_str, parse, parse_monomial, to_text


class UsageError(Exception):
    pass


def _emit(args, payload, text: str):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.verb} needs --{name}")


def _read_spec(text: str) -> str:
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {text[1:]}: {exc.strerror}") from None
    return text


def _ring(args) -> JetRing:
    _need(args, "ring")
    return parse_ring(_read_spec(args.ring))


def _base_poly(args, ring: JetRing):
    f = parse(args.f)
    if not ring.is_base(f):
        raise UsageError("--f must use base variables x_i^(0) only")
    return f


# --------------------------------------------------------------------------
# verbs


def cmd_jet(args) -> int:
    _need(args, "f", "j")
    ring = _ring(args)
    out = to_text(d(_base_poly(args, ring), args.j, ring))
    _emit(args, {"jet": out}, out)
    return 0


def cmd_gamma(args) -> int:
    _need(args, "f")
    ring = _ring(args)
    series = gamma_sharp(_base_poly(args, ring), ring)
    _emit(args, {"coefficients": [to_text(c) for c in series.coeffs]}, str(series))
    return 0


def cmd_apply(args) -> int:
    _need(args, "deriv", "f")
    ring = _ring(args)
    D = parse_deriv(_read_spec(args.deriv), ring)
    f = parse(args.f)
    if not ring.contains(f):
        raise UsageError("--f mentions variables outside A_n")
    out = to_text(D.eval(f))
    _emit(args, {"value": out}, out)
    return 0


def cmd_phi(args) -> int:
    _need(args, "deriv")
    ring = _ring(args)
    D = parse_deriv(_read_spec(args.deriv), ring)
    if args.f is not None:
        series = phi_eval(D, _base_poly(args, ring), ring)
        _emit(args, {"coefficients": [to_text(c) for c in series.coeffs]}, str(series))
        return 0
    E = phi_apply(D, ring)
    text = series_deriv_to_text(E)
    payload = {mono_str(k): [to_text(c) for c in E.value(k).coeffs] for k in E.basis()}
    _emit(args, {"m": E.m, "values": payload}, text)
    return 0


def cmd_section(args) -> int:
    _need(args, "deriv")
    ring = _ring(args)
    E = parse_series_deriv(_read_spec(args.deriv), ring)
    D = phi_section(E, ring)
    ok = phi_apply(D, ring) == E
    text = deriv_to_text(D)
    _emit(args, {"deriv": text, "roundtrip": ok}, text)
    return 0 if ok else 1


def cmd_kernel(args) -> int:
    _need(args, "n", "deriv")
    ring = JetRing(1, args.n)
    D = parse_deriv(_read_spec(args.deriv), ring, univariate=True)
    verdict = kernel_membership_m2(D)
    payload = {"member": verdict.member}
    if verdict.witness:
        payload["witness"] = verdict.witness
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_tower(args) -> int:
    _need(args, "k")
    if args.k < 0:
        raise UsageError("--k must be nonnegative")
    D = tower(args.k)
    ring = JetRing(1, args.k)
    payload = {
        "k": args.k,
        "deriv": deriv_to_text(D),
        "phi_zero": phi_apply(D, ring).is_zero(),
        "member": kernel_membership_m2(D).member,
    }
    if args.k >= 1:
        payload["restriction_compatible"] = tower_compatibility_check(args.k)
        payload["image_compatible"] = tower_image_compatibility_check(args.k)
    _emit(args, payload, payload["deriv"])
    return 0


def cmd_commute(args) -> int:
    _need(args, "alpha", "l", "f")
    ring = _ring(args)
    alpha = parse_monomial(args.alpha)
    lhs, rhs = commute_check(alpha, args.l, _base_poly(args, ring), ring)
    ok = lhs == rhs
    payload = {"lhs": to_text(lhs), "rhs": to_text(rhs), "equal": ok}
    _emit(args, payload, f"{to_text(lhs)}\n{to_text(rhs)}\n{'equal' if ok else 'DIFFERENT'}")
    return 0 if ok else 1


def cmd_section3(args) -> int:
    cert = diffmod.verify_section3_certificate()
    bound = 2 if args.degree is None else args.degree
    nm = diffmod.section3_nonmembership(bound)
    nm_ideal = diffmod.section3_nonmembership(bound, with_ideal=True)
    payload = {
        "certificate": cert.holds,
        "ideal_terms": [f"({to_text(c)}) * {lab}" for lab, c in cert.ideal_coefficients],
        "degree": bound,
        "nonmembership": nm.verdict,
        "nonmembership_with_jet_ideal": nm_ideal.verdict,
    }
    if not cert.holds:
        payload["residual"] = cert.residual.to_text()
    print(json.dumps(payload, sort_keys=True))
    return 0 if cert.holds and not nm.feasible else 1


def cmd_verify(args) -> int:
    seed = verify.DEFAULT_SEED if args.seed is None else args.seed
    suite = args.suite or "all"
    if suite != "all" and suite not in verify.SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(verify.SUITES)} or all")
    report = verify.run(suite, seed)
    print(json.dumps(report, sort_keys=True))
    for r in report["suites"]:
        if r["failed"]:
            print(f"hsjet verify: {r['suite']} failed {r['failed']}/{r['cases']}", file=sys.stderr)
    return 0 if report["ok"] else 1


VERBS = {
    "jet": cmd_jet,
    "gamma": cmd_gamma,
    "apply": cmd_apply,
    "phi": cmd_phi,
    "section": cmd_section,
    "kernel": cmd_kernel,
    "tower": cmd_tower,
    "commute": cmd_commute,
    "section3": cmd_section3,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hsjet", description="Jets, higher-order derivations and their identities.")
    p.add_argument("verb", choices=list(VERBS))
    p.add_argument("--ring", help='ring descriptor, e.g. "s=2 n=1" or "ring s=2 n=1 / rel x1*x2"')
    p.add_argument("--f", help="polynomial text")
    p.add_argument("--j", type=int, help="jet order")
    p.add_argument("--l", type=int, help="jet order for commute")
    p.add_argument("--m", type=int, help="derivation order (informational; specs carry their own)")
    p.add_argument("--n", type=int, help="truncation for kernel")
    p.add_argument("--k", type=int, help="tower level")
    p.add_argument("--alpha", help="jet multi-index as a monomial, e.g. x1^(1)*x2^(0)")
    p.add_argument("--deriv", help="derivation spec text, or @file")
    p.add_argument("--degree", type=int, help="coefficient degree bound for section3 (default 2)")
    p.add_argument("--seed", type=int, help=f"seed for randomized suites (default {verify.DEFAULT_SEED})")
    p.add_argument("--suite", help="suite name or 'all'")
    p.add_argument("--json", action="store_true", help="emit JSON")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return VERBS[args.verb](args)
    except (UsageError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else exc.__class__.__name__
        print(f"hsjet {args.verb}: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
