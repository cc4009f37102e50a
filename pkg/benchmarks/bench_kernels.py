"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Micro-benchmarks call both kernel modules directly on the same inputs; the
end-to-end rows time a quadrant probability in a fresh interpreter with and
without COVPAIR_PURE_PYTHON.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from covpair import _kernels_py, make_structure

try:
    from covpair import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def end_to_end(pure: bool) -> float:
    env = dict(os.environ)
    env.pop("COVPAIR_PURE_PYTHON", None)
    if pure:
        env["COVPAIR_PURE_PYTHON"] = "1"
    code = (
        "import time, covpair as cp\n"
        "s = cp.make_structure(0.5, 0.5)\n"
        "t = time.perf_counter()\n"
        "for n in (1, 2, 3, 4): cp.quadrant_probability(s, n)\n"
        "print(time.perf_counter() - t)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=100_000)
    args = ap.parse_args(argv)
    if _ckernels is None:
        sys.exit("compiled extension not built; run `pip install -e .` first")

    rng = np.random.default_rng(0)
    x = rng.uniform(1e-3, 40, args.size)
    k = make_structure(0.5, 0.5).constants
    px, py = rng.normal(0, 3, (2, args.size))

    rows = []
    for label, fn_c, fn_p in [
        ("bessel_k nu=0", lambda: _ckernels.bessel_k(0, x), lambda: _kernels_py.bessel_k(0, x)),
        ("bessel_k nu=5/2", lambda: _ckernels.bessel_k(5, x), lambda: _kernels_py.bessel_k(5, x)),
        ("bessel_k nu=7", lambda: _ckernels.bessel_k(14, x), lambda: _kernels_py.bessel_k(14, x)),
        ("density n=2", lambda: _ckernels.density(2, k.lam, k.kappa, k.delta, k.alpha, px, py),
         lambda: _kernels_py.density(2, k.lam, k.kappa, k.delta, k.alpha, px, py)),
        ("density n=5", lambda: _ckernels.density(5, k.lam, k.kappa, k.delta, k.alpha, px, py),
         lambda: _kernels_py.density(5, k.lam, k.kappa, k.delta, k.alpha, px, py)),
    ]:
        tc = best_of(fn_c, args.repeat, 3)
        tp = best_of(fn_p, args.repeat, 3)
        rows.append((f"{label} ({args.size} pts)", tc, tp))

    tc = min(end_to_end(False) for _ in range(args.repeat))
    tp = min(end_to_end(True) for _ in range(args.repeat))
    rows.append(("quadrant probability n=1..4", tc, tp))

    print(f"{'kernel':<36}{'cython [ms]':>14}{'python [ms]':>14}{'speedup':>10}")
    for label, c, p in rows:
        print(f"{label:<36}{1e3 * c:>14.2f}{1e3 * p:>14.2f}{p / c:>9.1f}x")


if __name__ == "__main__":
    main()
