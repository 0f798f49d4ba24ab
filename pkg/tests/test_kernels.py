import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from hsjet import _pykernels as py

ck = pytest.importorskip("hsjet._ckernels", reason="compiled extension not built")

def rand_mono(rng):
    codes = sorted(((v % 3 + 1) << 20) | v // 3 for v in rng.sample(range(6), rng.randint(0, 3)))
    return tuple(x for v in codes for x in (v, rng.randint(1, 3)))


def rand_poly(rng):
    out = {}
    for _ in range(rng.randint(0, 6)):
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        if c:
            out[rand_mono(rng)] = c
    return out


def test_backends_agree():
    rng = random.Random(0)
    for _ in range(300):
        a, b, acc = rand_poly(rng), rand_poly(rng), rand_poly(rng)
        ma, mb = rand_mono(rng), rand_mono(rng)
        c = Fraction(rng.randint(-3, 3), 2)
        assert ck.mono_mul(ma, mb) == py.mono_mul(ma, mb)
        assert ck.poly_add(a, b) == py.poly_add(a, b)
        assert ck.poly_sub(a, b) == py.poly_sub(a, b)
        assert ck.poly_scale(a, c) == py.poly_scale(a, c)
        assert ck.poly_mul(a, b) == py.poly_mul(a, b)
        assert ck.poly_addmul(dict(acc), a, b, c) == py.poly_addmul(dict(acc), a, b, c)


def test_cancellation_removes_terms():
    a = {(1, 1): 1, (): 1}
    b = {(1, 1): 1, (): -1}
    for k in (ck, py):
        assert k.poly_mul(a, b) == {(1, 2): 1, (): -1}
        assert k.poly_sub(a, a) == {}
        assert k.poly_scale(a, 0) == {}


def test_big_coefficients_stay_exact():
    big = {(1, 1): 2**80 + 1}
    for k in (ck, py):
        assert k.poly_mul(big, big) == {(1, 2): (2**80 + 1) ** 2}


def _backend(pure):
    env = {k: v for k, v in os.environ.items() if k != "HSJET_PURE_PYTHON"}
    if pure:
        env["HSJET_PURE_PYTHON"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", "import hsjet.kernels as k; print(k.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return proc.stdout.strip()


def test_backend_selection():
    assert _backend(False) == "cython"
    assert _backend(True) == "python"


def test_pure_python_backend_reproduces_jets():
    code = "from hsjet.cli import main; main(['jet', '--ring', 's=2 n=2', '--f', 'x1^3*x2', '--j', '2'])"
    outs = set()
    for flag in ("", "1"):
        proc = subprocess.run(
            [sys.executable, "-c", code],
            env={**os.environ, "HSJET_PURE_PYTHON": flag},
            capture_output=True,
            text=True,
            check=True,
        )
        outs.add(proc.stdout)
    assert len(outs) == 1


def test_addmul_with_zero_scale_is_identity():
    acc = {(1, 1): Fraction(1, 2)}
    for k in (ck, py):
        assert k.poly_addmul(dict(acc), {(2, 1): 1}, {(3, 1): 1}, 0) == acc
