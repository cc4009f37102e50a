import math

import numpy as np
import pytest

from covpair import QuadratureConfig, Rectangle, make_structure
from covpair import distributions as D
from covpair import numerics as N
from covpair.inference import diff_tail
from covpair.quadrature import integrate_1d


def test_truncation_radius_n3(half):
    r = N.truncation_radius(half, 3, 1e-10)
    assert r <= 60
    # mass outside the square, integrated directly over the four strips
    cfg = QuadratureConfig(abs_tol=1e-16, rel_tol=1e-8, truncation=4 * r)
    f = lambda x, y: D.density_general(half, 3, x, y)
    strips = [Rectangle(r, math.inf, -math.inf, math.inf), Rectangle(-math.inf, -r, -math.inf, math.inf),
              Rectangle(-r, r, r, math.inf), Rectangle(-r, r, -math.inf, -r)]
    from covpair.quadrature import integrate_2d

    outside = sum(integrate_2d(f, s, cfg).value for s in strips)
    assert 0 <= outside < 1e-10


def test_truncation_radius_monotone(half):
    eps = [0.5, 1e-2, 1e-4, 1e-8, 1e-12]
    radii = [N.truncation_radius(half, 2, e) for e in eps]
    assert radii == sorted(radii)
    assert radii[0] < 5


def test_truncation_radius_product_normal():
    # rho = sigma = 0, n = 1: the outside mass is at least each marginal tail
    s = make_structure(0.0, 0.0)
    r = N.truncation_radius(s, 1, 1e-8)
    tail = integrate_1d(lambda x: D.marginal_density(s, 1, x), r, math.inf).value
    assert 2 * tail < 1e-8
    # and the bound is not wildly conservative: the marginal tail at R/2 is far above eps
    half_tail = integrate_1d(lambda x: D.marginal_density(s, 1, x), r / 2, math.inf).value
    assert half_tail > 1e-8


def test_tail_bound_dominates_numerical_tail():
    for s in (make_structure(0.6, 0.1), make_structure(-0.3, 0.2)):
        for n in (1, 4):
            r = N.truncation_radius(s, n, 1e-6)
            # the mass beyond |x| > r alone is below the bound
            t = integrate_1d(lambda x: D.marginal_density(s, n, x), r, math.inf).value
            t += integrate_1d(lambda x: D.marginal_density(s, n, x), -math.inf, -r).value
            assert t <= N.tail_bound(s, n, r) <= 1e-6


def test_truncation_radius_bad_eps(half):
    with pytest.raises(ValueError):
        N.truncation_radius(half, 1, 0.0)


@pytest.mark.parametrize(
    "n, ref",
    [(1, 0.5), (2, 0.608173447), (3, 0.6837762984), (4, 0.7409625593)],
)
def test_quadrant_probabilities(half, n, ref):
    res = N.quadrant_probability(half, n)
    assert res.value == pytest.approx(ref, abs=1e-9)
    assert res.converged and res.error_estimate < 1e-6


def test_quadrant_independent():
    assert N.quadrant_probability(make_structure(0, 0), 1).value == pytest.approx(0.25, abs=1e-9)


def test_shifted_quadrant_matches_cdf_identity(half):
    # P(g_ac > x0) via the marginal equals the half-plane integral of the joint density
    x0 = 0.8
    half_plane = N.integrate_density(half, 2, Rectangle(x0, math.inf, -math.inf, math.inf)).value
    marg = integrate_1d(lambda x: D.marginal_density(half, 2, x), x0, math.inf).value
    assert half_plane == pytest.approx(marg, abs=1e-8)
    far = N.quadrant_probability(half, 2, 1e3, 1e3)
    assert far.value == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("s", [make_structure(0.5, 0.5), make_structure(-0.3, 0.2)])
@pytest.mark.parametrize("n", [1, 3, 6])
def test_normalization(s, n):
    assert N.integrate_density(s, n).value == pytest.approx(1.0, abs=1e-7)


def test_marginalize(half):
    assert N.marginalize(half, 3, 0.7) == pytest.approx(D.marginal_density(half, 3, 0.7), abs=1e-8)
    s = make_structure(0, 0)
    assert N.marginalize(s, 2, 1.0) == pytest.approx(D.marginal_density(s, 2, 1.0), abs=1e-8)
    assert N.marginalize(half, 2, 60.0) == pytest.approx(0.0, abs=1e-12)
    assert N.marginalize(half, 2, -40.0) == pytest.approx(0.0, abs=1e-12)


def test_marginal_integrates_to_one():
    s = make_structure(0.6, 0.1)
    for n in (1, 2, 5):
        val = integrate_1d(lambda x: D.marginal_density(s, n, x), -math.inf, math.inf, breakpoints=[0.0]).value
        assert val == pytest.approx(1.0, abs=1e-8)


def test_diff_density_normalized():
    for sigma in (0.0, 0.5):
        assert 2 * diff_tail(sigma, 1, 1e-300) == pytest.approx(1.0, abs=1e-9)


def test_invert_cf_points(half):
    r = N.invert_cf(half, 3, 0.5, 0.25)
    assert r.value == pytest.approx(D.density_general(half, 3, 0.5, 0.25), abs=1e-10)
    assert not r.slow_convergence and r.imag_residual < 1e-8
    r = N.invert_cf(half, 1, 1.0, 1.0)
    assert r.value == pytest.approx(math.exp(1 - math.sqrt(3)) / (2 * math.pi), abs=1e-10)


def test_invert_cf_on_axes(half):
    # p = 0 or q = 0 take the exp-sinh branch for the outer integral
    for x, y in [(1.0, -1.0), (0.7, 0.7), (0.0, 1.2)]:
        assert N.invert_cf(half, 2, x, y).value == pytest.approx(D.density_general(half, 2, x, y), abs=1e-9)


def test_invert_cf_origin_rejected(half):
    with pytest.raises(ValueError):
        N.invert_cf(half, 3, 0.0, 0.0)


def test_invert_cf_error_estimate(half):
    coarse = N.invert_cf(half, 1, 0.3, 1.1, m=8)
    assert coarse.slow_convergence and coarse.error_estimate > 1e-6
    fine = N.invert_cf(half, 1, 0.3, 1.1)
    assert not fine.slow_convergence and fine.error_estimate < 1e-10
    with pytest.raises(ValueError):
        N.invert_cf(half, 1, 0.3, 1.1, m=2)


def test_invert_cf_symmetric(half):
    a = N.invert_cf(half, 2, 0.4, -1.3).value
    b = N.invert_cf(half, 2, -1.3, 0.4).value
    assert a == pytest.approx(b, abs=1e-12)


def test_quadrant_increasing_in_n():
    for s in (make_structure(0.5, 0.5), make_structure(0.3, -0.2)):
        vals = [N.quadrant_probability(s, n).value for n in (1, 2, 3, 4)]
        assert all(0 <= v <= 1 for v in vals)
        assert vals == sorted(vals) and len(set(vals)) == 4


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_error_estimates_honest(half, n):
    # tightening the tolerances moves the value by no more than the old estimate
    loose = N.quadrant_probability(half, n, cfg=QuadratureConfig(abs_tol=1e-6, rel_tol=1e-6))
    tight = N.quadrant_probability(half, n, cfg=QuadratureConfig(abs_tol=5e-7, rel_tol=5e-7))
    assert abs(tight.value - loose.value) <= loose.error_estimate
    shifted = N.quadrant_probability(half, n, 0.3, -0.4, QuadratureConfig(abs_tol=1e-6, rel_tol=1e-6))
    shifted2 = N.quadrant_probability(half, n, 0.3, -0.4, QuadratureConfig(abs_tol=5e-7, rel_tol=5e-7))
    assert abs(shifted2.value - shifted.value) <= shifted.error_estimate


@pytest.mark.parametrize("rho, sigma", [(0.0, 0.0), (0.5, 0.5), (-0.3, 0.2), (0.6, 0.1)])
def test_marginalization_grid(rho, sigma):
    s = make_structure(rho, sigma)
    for n in range(1, 7):
        for x in np.linspace(-5, 5, 21):
            if n == 1 and x == 0:
                continue
            assert N.marginalize(s, n, x) == pytest.approx(D.marginal_density(s, n, x), abs=1e-5)
