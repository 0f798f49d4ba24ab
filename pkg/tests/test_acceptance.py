"""Acceptance checks, one per criterion.

Each test prints a single ``PASS``/``FAIL criterion N: ...`` line (run with
``-s`` to see them) and asserts exact equality on every case of the
corresponding verification suite.
"""

import pytest

from hsjet.verify import DEFAULT_SEED, run_suite

# criterion number -> (suite, what it checks, minimum number of cases)
CRITERIA = {
    1: ("leibniz", "d_j(fg) is the Leibniz sum of jets", 300),
    2: ("xbeta", "closed jet formula for monomials matches d_j", 1),
    3: ("worked_example", "section on s=2 n=1 m=2 reproduces E(x1), E(x1^2), E(x1*x2)", 75),
    4: ("nakai_phi", "phi(D) satisfies the twisted Nakai identity", 100),
    5: ("section", "phi of the section returns E", 100),
    6: ("kernel", "kernel test for m=2 agrees with phi vanishing on x, x^2", 400),
    7: ("notiny", "phi kills (1/m!) d^m/dx_n^m", 6),
    8: ("tower", "tower D_k: restriction, phi(D_k) = 0, kernel membership", 1),
    9: ("b2", "closed order-2 formula and module identity", 50),
    10: ("commute", "partials of jets commute with jets of partials", 300),
    11: ("section3", "relation certificate and bounded non-membership", 5),
    12: ("permutation", "Nakai evaluation ignores factor order", 400),
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    suite, label, minimum = CRITERIA[number]
    report = run_suite(suite, DEFAULT_SEED)
    ok = report["failed"] == 0 and report["cases"] >= minimum
    status = "PASS" if ok else "FAIL"
    print(f"\n{status} criterion {number}: {label} ({report['passed']}/{report['cases']})")
    if report["first_failure"]:
        print(f"  first failure: {report['first_failure']}")
    assert report["cases"] >= minimum
    assert report["failed"] == 0, report["first_failure"]
