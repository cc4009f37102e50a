"""Probabilities, normalization and marginal checks, and numerical inversion
of the characteristic function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import cf_closed
from .params import CovarianceStructure
from .quadrature import (
    DEFAULT_CONFIG,
    PLANE,
    QuadratureConfig,
    Rectangle,
    exp_sinh,
    fourier_half_line,
    integrate_1d,
    integrate_2d,
)
from .special import log_bessel_k

PROBABILITY_CONFIG = DEFAULT_CONFIG
NORMALIZATION_CONFIG = DEFAULT_CONFIG.with_(truncation=("auto", 1e-8))


@dataclass(frozen=True)
class ProbabilityResult:
    value: float
    error_estimate: float
    subdivisions_used: int
    raw_value: float
    converged: bool = True


# ---------------------------------------------------------------------------
# tail bound


def _envelope_mass(a, b, radius):
    """int over |w| + |z| >= 2R of exp(-a|w| - b|z|) dw dz, halved for dx dy."""
    two_r = 2.0 * radius
    if abs(b - a) <= 1e-9 * max(a, b):
        quarter = math.exp(-two_r * a) * (1.0 + two_r * a) / (a * a)
    else:
        quarter = (b * math.exp(-two_r * a) - a * math.exp(-two_r * b)) / (a * b * (b - a))
    return 0.5 * 4.0 * quarter


_GRID = np.linspace(0.0, 1.0, 101)[1:-1]
_KEEP_GRID = (0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99)


def tail_bound(s: CovarianceStructure, n: int, radius: float) -> float:
    """Upper bound on the mass outside the square |x|, |y| < radius.

    With r = sqrt(Q) and c = alpha / (2 lam kap) the density is
    C exp(delta w / 2) r^nu K_nu(c r). Outside the square |w| + |z| >= 2R,
    so r >= sqrt(2) min(lam, kap) R =: r0 and, from the integral
    representation, K_nu(c r) <= K_nu(c r0) exp(c r0 - c r). A share
    1 - keep of the decay absorbs r^nu, and
    r >= theta kap |w| + sqrt(1 - theta^2) lam |z| turns what is left into a
    product of exponentials in w and z. The w-rate is positive for theta
    above |delta| lam / alpha < 1 (alpha^2 - lam^2 delta^2 = 2 lam^2 kap^2).
    Every (theta, keep) gives a valid bound; the smallest is returned.
    """
    k = s.constants
    c = k.alpha / (2.0 * k.lam * k.kappa)
    nu = 0.5 * (n - 2)
    r0 = math.sqrt(2.0) * min(k.kappa, k.lam) * radius
    log_coef = (
        -math.lgamma(0.5 * n)
        + 0.5 * n * math.log(k.lam * k.kappa)
        - 0.5 * n * math.log(2.0)
        - math.log(math.pi)
        - nu * math.log(k.alpha)
    )
    log_k = log_bessel_k(abs(n - 2) / 2, c * r0) + c * r0
    # both keep and theta must exceed lam |delta| / alpha for a positive w-rate
    floor = k.lam * abs(k.delta) / k.alpha
    best = math.inf
    for share in _KEEP_GRID if nu > 0 else (1.0,):
        keep = floor + (1.0 - floor) * share
        tau = 1.0 - keep
        theta = floor / keep + (1.0 - floor / keep) * _GRID
        if nu > 0:
            r_use = max(nu / (tau * c), r0)
            log_poly = nu * math.log(r_use) - tau * c * r_use
        else:
            log_poly = nu * math.log(r0)
        kw = keep * c * k.kappa * theta - 0.5 * abs(k.delta)
        kz = keep * c * k.lam * np.sqrt(1.0 - theta**2)
        for a, b in zip(kw[kw > 0], kz[kw > 0]):
            best = min(best, _envelope_mass(a, b, radius) * math.exp(log_coef + log_k + log_poly))
    return best


def truncation_radius(s: CovarianceStructure, n: int, epsilon: float) -> float:
    """Half-width R of a centered square holding all but epsilon of the mass."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    lo, hi = 0.0, 1.0
    while tail_bound(s, n, hi) > epsilon:
        lo, hi = hi, hi * 2.0
        if hi > 1e8:
            raise ArithmeticError("truncation radius search diverged")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid <= 0:
            break
        if tail_bound(s, n, mid) > epsilon:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-3 * hi:
            break
    return hi


def _radius(s, n, cfg: QuadratureConfig) -> float:
    eps = cfg.auto_epsilon
    if eps is None:
        return float(cfg.truncation)
    return truncation_radius(s, n, eps)


def _density_integrand(s, n):
    k = s.constants
    from . import _backend

    def f(x, y):
        return _backend.density(n, k.lam, k.kappa, k.delta, k.alpha, x, y)

    return f


# ---------------------------------------------------------------------------
# probabilities and checks


def integrate_density(
    s: CovarianceStructure,
    n: int,
    region: Rectangle = PLANE,
    cfg: QuadratureConfig = NORMALIZATION_CONFIG,
):
    """Integral of the joint density over region (infinite edges truncated)."""
    radius = _radius(s, n, cfg)
    clipped = region.clip(radius)
    return integrate_2d(
        _density_integrand(s, n),
        clipped,
        cfg.with_(truncation=radius),
        singular_points=[(0.0, 0.0)],
    )


def quadrant_probability(
    s: CovarianceStructure,
    n: int,
    x0: float = 0.0,
    y0: float = 0.0,
    cfg: QuadratureConfig = PROBABILITY_CONFIG,
) -> ProbabilityResult:
    """P(g_ac > x0, g_bc > y0)."""
    res = integrate_density(s, n, Rectangle(x0, math.inf, y0, math.inf), cfg)
    raw = res.value
    # with automatic truncation the neglected tail adds at most epsilon
    trunc = cfg.auto_epsilon or 0.0
    return ProbabilityResult(
        value=min(max(raw, 0.0), 1.0),
        error_estimate=res.error + trunc,
        subdivisions_used=res.subdivisions,
        raw_value=raw,
        converged=res.converged,
    )


def marginalize(
    s: CovarianceStructure,
    n: int,
    x: float,
    cfg: QuadratureConfig = NORMALIZATION_CONFIG,
) -> float:
    """Integrate the joint density over y at fixed x."""
    k = s.constants
    from . import _backend

    def g(y):
        return _backend.density(n, k.lam, k.kappa, k.delta, k.alpha, np.full_like(y, x), y)

    bps = [0.0] if x == 0.0 else []
    # the y-section peaks where x + y and x - y balance; give the rule a hint
    bps += [-x, x]
    res = integrate_1d(g, -math.inf, math.inf, cfg, breakpoints=sorted(set(bps)))
    return res.value


# ---------------------------------------------------------------------------
# characteristic-function inversion


@dataclass(frozen=True)
class InversionResult:
    value: float
    error_estimate: float
    imag_residual: float
    slow_convergence: bool


def _line_fourier(h, omega, m=96):
    """int_R exp(-i omega s) h(s) ds for vectorized, possibly complex h.

    h maps an array of nodes (axis 0) to values with optional trailing axes.
    """
    if omega == 0.0:
        return exp_sinh(lambda s: h(s) + h(-s))
    sign = 1.0 if omega > 0 else -1.0
    om = abs(omega)
    even = fourier_half_line(lambda s: h(s) + h(-s), om, "cos", m)
    odd = fourier_half_line(lambda s: h(s) - h(-s), om, "sin", m)
    return even - 1j * sign * odd


def _invert_once(s, n, p, q, m):
    def cf_st(sv, tv):
        return cf_closed(s, n, 0.5 * (sv - tv), 0.5 * (sv + tv))

    if abs(q) >= abs(p):
        def outer(sv):
            return _line_fourier(lambda tv: cf_st(sv[None, ...], tv[:, None]), q, m)
        total = _line_fourier(outer, p, m)
    else:
        def outer(tv):
            return _line_fourier(lambda sv: cf_st(sv[:, None], tv[None, ...]), p, m)
        total = _line_fourier(outer, q, m)
    return total / (2.0 * (2.0 * math.pi) ** 2)


def invert_cf(
    s: CovarianceStructure,
    n: int,
    x: float,
    y: float,
    m: int = 96,
    tol: float = 1e-6,
) -> InversionResult:
    """Recover the density at (x, y) from the closed-form CF.

    In the rotated frequencies s = u + v, t = v - u (Jacobian 1/2) the phase
    splits as exp(-i p s - i q t) with p = (x + y) / 2, q = (y - x) / 2. The
    inner integral runs along the variable with the larger frequency using
    the Ooura-Mori rule, which copes with the 1/|t| decay at n = 1; its
    result then decays exponentially in the outer variable.

    The error estimate is the change from a coarser mesh (2m/3); above
    ``tol`` the result is flagged ``slow_convergence``. The imaginary part,
    zero in exact arithmetic, is reported as a further sanity check.
    """
    p = 0.5 * (x + y)
    q = 0.5 * (y - x)
    if p == 0.0 and q == 0.0:
        raise ValueError("inversion at the origin is not supported (singular for n <= 2)")
    if m < 3:
        raise ValueError("m must be at least 3")
    val = _invert_once(s, n, p, q, m)
    coarse = _invert_once(s, n, p, q, max(2, (2 * m) // 3))
    err = float(abs(val - coarse))
    return InversionResult(
        value=float(val.real),
        error_estimate=err,
        imag_residual=float(abs(val.imag)),
        slow_convergence=bool(err > tol or abs(val.imag) > tol),
    )
