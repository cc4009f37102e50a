import math

import numpy as np
import pytest

from covpair import ConstraintViolation, make_structure


def test_half_half_constants(half):
    k = half.constants
    assert k.xi == pytest.approx(1.0)
    assert k.eta == pytest.approx(3.0)
    assert k.lam == pytest.approx(math.sqrt(2))
    assert k.kappa == pytest.approx(1.0)
    assert k.delta == pytest.approx(1.0)
    assert k.alpha == pytest.approx(math.sqrt(6))
    assert (k.a, k.b) == pytest.approx((0.75, 0.25))


def test_identity_constants():
    k = make_structure(0, 0).constants
    assert (k.xi, k.eta, k.lam, k.kappa, k.delta, k.a, k.b) == pytest.approx((1, 1, 1, 1, 0, 1, 0))
    assert k.alpha == pytest.approx(math.sqrt(2))
    assert np.array_equal(make_structure(0, 0).matrix, np.eye(3))


def test_constants_from_defining_expressions():
    rho, sigma = 0.6, 0.1
    k = make_structure(rho, sigma).constants
    xi = 1 - 2 * 0.36 + 0.1
    assert k.xi == pytest.approx(0.38, rel=1e-14)
    assert k.eta == pytest.approx(1.1 / 0.9, rel=1e-14)
    assert k.lam == pytest.approx(0.9**-0.5, rel=1e-14)
    assert k.kappa == pytest.approx(xi**-0.5, rel=1e-14)
    assert k.delta == pytest.approx(1.2 / xi, rel=1e-14)
    assert k.alpha == pytest.approx(math.sqrt(2 * 1.1 / 0.9) / xi, rel=1e-14)
    assert (k.a, k.b) == pytest.approx((0.64, 0.1 - 0.36), rel=1e-14)


@pytest.mark.parametrize(
    "rho, sigma, which",
    [(0.9, 0.0, "XiBound"), (0.0, 1.0, "SigmaBound"), (0.0, -1.0, "SigmaBound"),
     (0.5, -0.5, "XiBound"), (0.2, 1.5, "SigmaBound")],
)
def test_constraint_violation_names_bound(rho, sigma, which):
    with pytest.raises(ConstraintViolation) as info:
        make_structure(rho, sigma)
    assert info.value.which == which


def test_boundary_is_strict():
    # 1 - 2 rho^2 + sigma == 0 exactly
    with pytest.raises(ConstraintViolation):
        make_structure(0.5, -0.5)
    make_structure(0.5, -0.5 + 1e-12)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        make_structure(float("nan"), 0.0)


def test_positive_definite_inside_region():
    rng = np.random.default_rng(3)
    from conftest import random_structures

    for s in random_structures(rng, 200, margin=1e-6):
        assert np.all(np.linalg.eigvalsh(s.matrix) > 0)


def test_identity_between_constants():
    # alpha^2 - lam^2 delta^2 = 2 lam^2 kap^2 holds everywhere in the region
    rng = np.random.default_rng(4)
    from conftest import random_structures

    for s in random_structures(rng, 100):
        k = s.constants
        assert k.alpha**2 - k.lam**2 * k.delta**2 == pytest.approx(2 * k.lam**2 * k.kappa**2, rel=1e-12)
