"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

The raw kernels are timed in-process.  The end-to-end jet workload runs in
subprocesses so that backend selection at import is exercised for real.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from hsjet import _pykernels

try:
    from hsjet import _ckernels
except ImportError:
    _ckernels = None


def random_poly(rng, nvars, terms, max_exp):
    out = {}
    for _ in range(terms):
        codes = sorted(rng.sample(range(nvars), rng.randint(1, min(3, nvars))))
        m = tuple(x for v in codes for x in (((v % 4 + 1) << 20) | v // 4, rng.randint(1, max_exp)))
        out[m] = Fraction(rng.randint(-20, 20) or 1, rng.randint(1, 6))
    return out


JET_WORKLOAD = """
import time
from hsjet.jetring import JetRing, d
from hsjet.ratpoly import parse
R = JetRing(3, 4)
f = parse("(x1 + 2*x2 - x3 + 1)^4 * (x1*x2 - x3^2)")
t = time.perf_counter()
for j in range(5):
    d(f, j, R)
print(time.perf_counter() - t)
"""


def jet_time(pure: bool) -> float:
    env = {k: v for k, v in os.environ.items() if k != "HSJET_PURE_PYTHON"}
    if pure:
        env["HSJET_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", JET_WORKLOAD], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        sys.exit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    rng = random.Random(0)
    a = random_poly(rng, 12, 120, 4)
    b = random_poly(rng, 12, 120, 4)
    print(f"{'kernel':<22}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, call in (
        ("poly_mul 120x120", lambda k: k.poly_mul(a, b)),
        ("poly_addmul 120x120", lambda k: k.poly_addmul({}, a, b, 3)),
        ("poly_add", lambda k: k.poly_add(a, b)),
    ):
        assert call(_pykernels) == call(_ckernels)
        tp = min(timeit.repeat(lambda: call(_pykernels), number=5, repeat=args.repeat)) / 5
        tc = min(timeit.repeat(lambda: call(_ckernels), number=5, repeat=args.repeat)) / 5
        print(f"{name:<22}{tp * 1e3:>12.3f}{tc * 1e3:>12.3f}{tp / tc:>9.2f}x")

    tp = min(jet_time(True) for _ in range(args.repeat))
    tc = min(jet_time(False) for _ in range(args.repeat))
    print(f"{'jets d_0..d_4, s=3':<22}{tp * 1e3:>12.3f}{tc * 1e3:>12.3f}{tp / tc:>9.2f}x")


if __name__ == "__main__":
    main()
