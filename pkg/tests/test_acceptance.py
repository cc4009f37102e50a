"""The ten acceptance criteria, each at its stated tolerance.

Every criterion prints one PASS/FAIL line (collected into the pytest
terminal summary as well). Run standalone with

    python tests/test_acceptance.py
"""

from __future__ import annotations

import json
import math
import os
import shutil
import sys
import tempfile
import time

import numpy as np
import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
if HERE not in sys.path:
    sys.path.insert(0, HERE)

from covpair import cli, make_structure  # noqa: E402
from covpair import distributions as D  # noqa: E402
from covpair import numerics as N  # noqa: E402
from covpair.inference import equality_test  # noqa: E402
from covpair.simulation import SimulationPlan, clt_check, empirical_quadrant, normal_triples, sample_cov_pairs  # noqa: E402
from covpair.special import BesselOrder, bessel_k  # noqa: E402

RESULTS: dict[int, str] = {}

HALF = make_structure(0.5, 0.5)
REFERENCE_QUADRANT = {1: 0.5, 2: 0.608173447, 3: 0.6837762984, 4: 0.7409625593}
GRID_STRUCTURES = [make_structure(0.5, 0.5), make_structure(-0.3, 0.2)]


def report(number: int, title: str, ok: bool, detail: str, seconds: float) -> None:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{seconds:.1f}s]"
    RESULTS[number] = line
    print(line)


def _random_structures(rng, count, margin=0.02):
    from conftest import random_structures

    return random_structures(rng, count, margin)


# ---------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    errs = {n: abs(N.quadrant_probability(HALF, n).value - ref) for n, ref in REFERENCE_QUADRANT.items()}
    dt = time.perf_counter() - t0
    ok = max(errs.values()) <= 1e-6 and dt < 60
    return ok, f"max |P - reference| = {max(errs.values()):.2e} (tol 1e-6), runtime {dt:.2f}s (limit 60s)"


def criterion_2():
    t0 = time.perf_counter()
    worst = 0.0
    for rho, sigma in [(0.0, 0.0), (0.5, 0.5), (-0.3, 0.2), (0.6, 0.1)]:
        s = make_structure(rho, sigma)
        for n in range(1, 7):
            worst = max(worst, abs(N.integrate_density(s, n).value - 1.0))
    dt = time.perf_counter() - t0
    return worst <= 1e-5 and dt < 300, f"24 integrals, max |mass - 1| = {worst:.2e} (tol 1e-5), {dt:.1f}s (limit 300s)"


def criterion_3():
    worst, count = 0.0, 0
    xs = np.linspace(-5.0, 5.0, 21)
    for s in GRID_STRUCTURES:
        for n in (1, 2, 3, 4):
            for x in xs:
                if n == 1 and x == 0.0:
                    continue  # the n = 1 marginal is infinite at 0
                worst = max(worst, abs(N.marginalize(s, n, x) - D.marginal_density(s, n, x)))
                count += 1
    return worst <= 1e-5, f"{count} points, max error {worst:.2e} (tol 1e-5)"


def criterion_4():
    rng = np.random.default_rng(2024)
    structs = _random_structures(rng, 1000)
    worst = 0.0
    for s in structs:
        n = int(rng.integers(1, 11))
        u, v = rng.uniform(-10, 10, 2)
        c, r, d = D.cf_closed(s, n, u, v), D.cf_reduced(s, n, u, v), D.cf_determinant(s, n, u, v)
        for a, b in ((c, r), (c, d), (r, d)):
            worst = max(worst, abs(a - b) / abs(b))
    origin = max(abs(D.cf_reduced(s, int(rng.integers(1, 11)), 0.0, 0.0) - 1.0) for s in structs[:100])
    ok = worst <= 1e-12 and origin <= 1e-12
    return ok, f"1000 tuples max pairwise rel diff {worst:.2e}; |cf_reduced(0,0) - 1| max {origin:.2e} (tol 1e-12)"


def criterion_5():
    worst, slow = 0.0, 0
    grid = np.linspace(-2.0, 2.0, 5)
    for s in GRID_STRUCTURES:
        for n in (1, 2, 3, 4):
            for x in grid:
                for y in grid:
                    if x == 0.0 and y == 0.0:
                        continue
                    r = N.invert_cf(s, n, x, y)
                    worst = max(worst, abs(r.value - D.density_general(s, n, x, y)))
                    slow += r.slow_convergence
    return worst <= 1e-4, f"192 points, max |inverted - density| = {worst:.2e} (tol 1e-4), {slow} flagged slow"


def criterion_6():
    rng = np.random.default_rng(6)
    worst = 0.0
    structs = _random_structures(rng, 200)
    for i, s in enumerate(structs):
        n = i % 4 + 1
        x, y = rng.normal(0, 2.5, 2)
        a, b = D.SPECIALIZED[n](s, x, y), D.density_general(s, n, x, y)
        worst = max(worst, abs(a - b) / b)
    f3 = 0.0
    for s in structs:
        x, y = rng.normal(0, 2.5, 2)
        f3 = max(f3, abs(D.density_n3(s, x, y) / D.density_n3_rotated(s, x, y) - 1))
    ok = worst <= 1e-12 and f3 <= 1e-12
    return ok, f"200 points max rel diff {worst:.2e}; two n=3 forms {f3:.2e} (tol 1e-12)"


def criterion_7():
    with open(os.path.join(HERE, "oracles", "oracles.json")) as fh:
        orc = json.load(fh)
    worst = max(abs(bessel_k(BesselOrder(t), x) / v - 1) for t, x, v in orc["bessel_k"])
    half = max(abs(bessel_k(BesselOrder(t), x) / v - 1) for t, x, v in orc["bessel_k_half_closed"])
    ok = worst <= 1e-10 and half <= 1e-12
    return ok, (f"2nu in 0..10 on [1e-6, 50]: max rel err {worst:.2e} (tol 1e-10); "
                f"half-integer closed forms {half:.2e} (tol 1e-12)")


def _mc_once(seed):
    z = {}
    for n, ref in REFERENCE_QUADRANT.items():
        p, se = empirical_quadrant(SimulationPlan(HALF, n, 10**6, seed))
        z[n] = abs(p - ref) / se
    clt = clt_check(HALF, [32], 10**6, seed)[0]
    return z, clt.max_z


def criterion_8():
    seed = 20240101
    z, clt_z = _mc_once(seed)
    ok = max(z.values()) < 3 and clt_z < 4
    note = ""
    if not ok:
        # flake policy: one re-run with seed + 1, fail only on double exceedance
        z2, clt_z2 = _mc_once(seed + 1)
        ok = (max(z.values()) < 3 or max(z2.values()) < 3) and (clt_z < 4 or clt_z2 < 4)
        note = f"; re-run seed+1: max z {max(z2.values()):.2f}, CLT {clt_z2:.2f}"
    plan = SimulationPlan(HALF, 3, 10**6, seed)
    same = sample_cov_pairs(plan, workers=1).tobytes() == sample_cov_pairs(plan, workers=4).tobytes()
    ok = ok and same
    zs = ", ".join(f"n={n}: {v:.2f}" for n, v in z.items())
    return ok, f"quadrant |z| ({zs}) < 3; CLT n=32 max |z| {clt_z:.2f} < 4; reruns identical: {same}{note}"


def _ks_stat(seed, trials=10_000, n=20):
    s = make_structure(0.3, 0.5)
    data = normal_triples(s, trials * n, seed).reshape(trials, n, 3)
    p = np.sort([equality_test(d, sigma=0.5).p_value for d in data])
    i = np.arange(1, trials + 1)
    return float(max(np.max(i / trials - p), np.max(p - (i - 1) / trials)))


def criterion_9():
    # asymptotic Kolmogorov critical value at level 0.001
    crit = 1.94947 / math.sqrt(10_000)
    d1 = _ks_stat(99)
    ok, note = d1 < crit, ""
    if not ok:
        d2 = _ks_stat(100)
        ok, note = d2 < crit, f"; re-run seed+1 D = {d2:.4f}"
    return ok, f"10^4 null p-values, KS D = {d1:.4f} (critical {crit:.4f} at 0.001){note}"


def criterion_10():
    import warnings

    import test_cli

    from covpair.errors import ConvergenceWarning

    bad, codes = [], set()
    cwd = os.getcwd()
    with tempfile.TemporaryDirectory() as tmp, warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        shutil.copy(os.path.join(HERE, "golden", "h0.csv"), tmp)
        with open(os.path.join(tmp, "bad_header.csv"), "w") as fh:
            fh.write("x,y,z\n1,2,3\n")
        with open(os.path.join(tmp, "bad_row.csv"), "w") as fh:
            fh.write("a,b,c\n1,2,3\n1,2\n")
        os.chdir(tmp)
        try:
            for name, (argv, code) in test_cli.CASES.items():
                got, out = _run_cli(argv)
                try:
                    with open(os.path.join(HERE, "golden", f"{name}.jsonl")) as fh:
                        test_cli.close(json.loads(out), json.loads(fh.read()))
                    assert got == code
                except (AssertionError, ValueError):
                    bad.append(name)
            for argv, code, _ in test_cli.EXIT_MATRIX:
                got, _ = _run_cli(argv)
                codes.add(got)
                if got != code:
                    bad.append(argv)
        finally:
            os.chdir(cwd)
    ok = not bad and {0, 2, 3, 4} <= codes
    return ok, (f"{len(test_cli.CASES)} golden records, exit codes seen {sorted(codes)}"
                + (f"; mismatches: {bad}" if bad else ""))


def _run_cli(argv):
    import contextlib
    import io

    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(argv.split())
    return code, out.getvalue()


CRITERIA = {
    1: ("quadrant probabilities", criterion_1),
    2: ("normalization", criterion_2),
    3: ("marginalization", criterion_3),
    4: ("CF equivalence", criterion_4),
    5: ("Fourier-pair verification", criterion_5),
    6: ("specialization consistency", criterion_6),
    7: ("Bessel quality", criterion_7),
    8: ("Monte Carlo", criterion_8),
    9: ("inference calibration", criterion_9),
    10: ("CLI contract", criterion_10),
}


def run_criterion(number):
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    ok, detail = fn()
    report(number, title, ok, detail, time.perf_counter() - t0)
    return ok, detail


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, detail = run_criterion(number)
    assert ok, detail


if __name__ == "__main__":
    results = [run_criterion(k)[0] for k in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
