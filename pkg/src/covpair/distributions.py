"""Closed-form densities and characteristic functions of the covariance pair.

For a sample of n triples from N(0, Sigma) the pair is
(g_ac, g_bc) = (sum A_j C_j, sum B_j C_j). Every function here accepts
scalars or numpy arrays and returns a float/complex for scalar input.
Integrable singularities (the origin for n <= 2) evaluate to +inf.

In the rotated frame w = x + y, z = x - y the densities depend on
Q = kappa^2 w^2 + lambda^2 z^2; the Bessel argument is c sqrt(Q) with
c = alpha / (2 lambda kappa).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import DomainError
from .params import CovarianceStructure
from .special import BesselOrder, log_bessel_k

_SMALL_ARG = 1e-8


def _out(val, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return val.item() if isinstance(val, np.ndarray) else val
    return val


def _rotated(s: CovarianceStructure, x, y):
    k = s.constants
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = x + y
    z = x - y
    root_q = np.sqrt(k.kappa**2 * w * w + k.lam**2 * z * z)
    c = k.alpha / (2.0 * k.lam * k.kappa)
    return w, root_q, c


def _miller_quadratic(s: CovarianceStructure, x, y):
    k = s.constants
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return k.a * x * x - 2.0 * k.b * x * y + k.a * y * y


# ---------------------------------------------------------------------------
# joint densities


class DensityQuery(NamedTuple):
    structure: CovarianceStructure
    n: int
    x: float
    y: float


def density_general(s: CovarianceStructure, n: int, x, y):
    """Joint density of (g_ac, g_bc) for any sample size n >= 1."""
    n = _check_n(n)
    k = s.constants
    val = _backend.density(n, k.lam, k.kappa, k.delta, k.alpha, x, y)
    return _out(val, x, y)


def density_n1(s: CovarianceStructure, x, y):
    """Single-observation density in its original (rho, sigma) form."""
    k = s.constants
    q0 = _miller_quadratic(s, x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        r0 = np.sqrt(q0)
        val = np.exp((s.rho * (np.asarray(x) + np.asarray(y)) - math.sqrt(k.eta) * r0) / k.xi) / (
            2.0 * math.pi * r0
        )
    val = np.where(r0 == 0.0, np.inf, val)
    return _out(val, x, y)


def density_n2(s: CovarianceStructure, x, y):
    k = s.constants
    w, root_q, c = _rotated(s, x, y)
    safe = np.where(root_q > 0, root_q, 1.0)
    logk = log_bessel_k(BesselOrder(0), c * safe)
    with np.errstate(over="ignore", under="ignore"):
        val = k.lam * k.kappa / (2.0 * math.pi) * np.exp(0.5 * k.delta * w + logk)
    val = np.where(root_q > 0, val, np.inf)
    return _out(val, x, y)


def density_n3(s: CovarianceStructure, x, y):
    """n = 3 density, 1 / (2 pi sqrt(1 - sigma^2)) times the Miller exponential."""
    k = s.constants
    q0 = _miller_quadratic(s, x, y)
    expo = (s.rho * (np.asarray(x) + np.asarray(y)) - math.sqrt(k.eta) * np.sqrt(q0)) / k.xi
    with np.errstate(under="ignore", over="ignore"):
        val = np.exp(expo) / (2.0 * math.pi * math.sqrt(1.0 - s.sigma**2))
    return _out(val, x, y)


def density_n3_rotated(s: CovarianceStructure, x, y):
    """n = 3 density written with the derived constants.

    The prefactor is lambda^2 kappa^2 / (sqrt(2) * pi * alpha); it equals
    1 / (2 pi sqrt(1 - sigma^2)) identically.
    """
    k = s.constants
    w, root_q, c = _rotated(s, x, y)
    pref = k.lam**2 * k.kappa**2 / (math.sqrt(2.0) * math.pi * k.alpha)
    with np.errstate(under="ignore", over="ignore"):
        val = pref * np.exp(0.5 * k.delta * w - c * root_q)
    return _out(val, x, y)


def density_n4(s: CovarianceStructure, x, y):
    k = s.constants
    w, root_q, c = _rotated(s, x, y)
    pref = k.lam**2 * k.kappa**2 / (4.0 * math.pi * k.alpha)
    safe = np.where(root_q > 0, root_q, 1.0)
    logk = log_bessel_k(BesselOrder(2), c * safe)
    with np.errstate(over="ignore", under="ignore"):
        val = pref * np.exp(0.5 * k.delta * w + np.log(safe) + logk)
    # sqrt(Q) K_1(c sqrt(Q)) -> 1 / c at the origin
    val = np.where(root_q > 0, val, pref / c * np.exp(0.5 * k.delta * w))
    return _out(val, x, y)


SPECIALIZED = {1: density_n1, 2: density_n2, 3: density_n3, 4: density_n4}


def density(s: CovarianceStructure, n: int, x, y, form: str = "general"):
    """Dispatch to the general formula or, for n <= 4, the hand-specialized one."""
    if form == "general":
        return density_general(s, n, x, y)
    if form == "specialized":
        n = _check_n(n)
        if n in SPECIALIZED:
            return SPECIALIZED[n](s, x, y)
        return density_general(s, n, x, y)
    raise ValueError(f"unknown density form {form!r}")


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


# ---------------------------------------------------------------------------
# one-dimensional laws


def _log_abs_power_bessel(n, x, scale):
    """log(|x/2|^mu K_mu(|x| / scale)) with mu = (n - 1) / 2; -> +inf at 0 for n = 1."""
    mu = 0.5 * (n - 1)
    ax = np.abs(np.asarray(x, dtype=float))
    arg = ax / scale
    out = np.empty(np.shape(ax))
    small = ax == 0 if n <= 2 else arg < _SMALL_ARG
    regular = ~small
    if np.any(regular):
        out[regular] = mu * np.log(0.5 * ax[regular]) + log_bessel_k(
            BesselOrder(n - 1), np.atleast_1d(arg[regular])
        )
    if np.any(small):
        if n == 1:
            out[small] = np.inf
        else:
            out[small] = math.lgamma(mu) + mu * math.log(scale) - math.log(2.0)
    return out


def marginal_density(s: CovarianceStructure, n: int, x):
    """Density of g_ac alone (g_bc has the same law); depends on rho only."""
    n = _check_n(n)
    a = 1.0 - s.rho**2
    xa = np.asarray(x, dtype=float)
    logv = (
        _log_abs_power_bessel(n, xa, a)
        - 0.5 * math.log(math.pi)
        - 0.5 * math.log(a)
        - math.lgamma(0.5 * n)
        + s.rho * xa / a
    )
    with np.errstate(over="ignore", under="ignore"):
        val = np.exp(logv)
    return _out(val, x)


def diff_density(sigma: float, n: int, x):
    """Null density of sum (A_j - B_j) C_j when Cov(A,C) = Cov(B,C).

    Only sigma = Cov(A, B) enters.
    """
    sigma = float(sigma)
    if not 1.0 - sigma * sigma > 0.0:
        raise DomainError(f"diff_density requires 1 - sigma^2 > 0, got sigma={sigma!r}")
    n = _check_n(n)
    v = 2.0 - 2.0 * sigma
    xa = np.asarray(x, dtype=float)
    logv = (
        _log_abs_power_bessel(n, xa, math.sqrt(v))
        - 0.5 * math.log(math.pi)
        - 0.25 * (n + 1) * math.log(v)
        - math.lgamma(0.5 * n)
    )
    with np.errstate(over="ignore", under="ignore"):
        val = np.exp(logv)
    return _out(val, x)


# ---------------------------------------------------------------------------
# characteristic functions


class CfQuery(NamedTuple):
    structure: CovarianceStructure
    n: int
    u: float
    v: float


def cf_radicand(s: CovarianceStructure, u, v):
    k = s.constants
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return 1.0 + k.a * (u * u + v * v) + 2.0 * k.b * u * v - 2j * s.rho * (u + v)


def cf_closed(s: CovarianceStructure, n: int, u, v):
    """E exp(i(u g_ac + v g_bc)) = radicand^(-n/2), principal branch.

    The radicand's real part is at least 1, so the principal log is continuous.
    """
    val = np.exp(-0.5 * n * np.log(cf_radicand(s, u, v)))
    return _out(val, u, v)


def cf_reduced(s: CovarianceStructure, n: int, u, v):
    """The same CF in the rotated constants:
    (sqrt(2) lam kap / sqrt(lam^2 (u+v-i delta)^2 + kap^2 (v-u)^2 + alpha^2))^n.
    """
    k = s.constants
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    d = k.lam**2 * (u + v - 1j * k.delta) ** 2 + k.kappa**2 * (v - u) ** 2 + k.alpha**2
    base = math.sqrt(2.0) * k.lam * k.kappa / np.sqrt(d)
    return _out(base**n, u, v)


def _det3(m):
    """Cofactor expansion of stacked 3x3 matrices (..., 3, 3)."""
    return (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
        - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    )


def _theta(u, v, w):
    """Symmetric matrix with u/2, v/2, w/2 in the (1,2), (1,3), (2,3) slots."""
    u, v, w = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (u, v, w)))
    th = np.zeros(u.shape + (3, 3))
    th[..., 0, 1] = th[..., 1, 0] = 0.5 * u
    th[..., 0, 2] = th[..., 2, 0] = 0.5 * v
    th[..., 1, 2] = th[..., 2, 1] = 0.5 * w
    return th


def wishart_determinant(s: CovarianceStructure, u, v, w):
    """det(I - 2i Sigma Theta) for the AB, AC, BC frequencies (u, v, w)."""
    th = _theta(u, v, w)
    m = np.eye(3) - 2j * (s.matrix @ th)
    return _det3(m)


def cf_determinant(s: CovarianceStructure, n: int, u, v):
    """CF of the pair from the pseudo-Wishart determinant, det^(-n/2)."""
    det = wishart_determinant(s, 0.0, u, v)
    val = np.exp(-0.5 * n * np.log(det))
    return _out(val, u, v)


def cf_triple(s: CovarianceStructure, u, v, w):
    """Joint CF of (AB, AC, BC) for one observation.

    det(I - 2i Sigma Theta) = prod(1 - 2i mu_k) over the eigenvalues mu_k of
    L^T Theta L (Sigma = L L^T); taking the principal root factor by factor
    keeps the CF continuous where the determinant's argument leaves (-pi, pi).
    """
    th = _theta(u, v, w)
    chol = np.linalg.cholesky(s.matrix)
    mu = np.linalg.eigvalsh(chol.T @ th @ chol)
    val = np.prod((1.0 - 2j * mu) ** -0.5, axis=-1)
    return _out(val, u, v, w)


# ---------------------------------------------------------------------------
# large-n limit


def clt_limit_covariance(s: CovarianceStructure) -> np.ndarray:
    """Limit covariance of ((g_ac - n rho) / sqrt(n), (g_bc - n rho) / sqrt(n))."""
    v = s.rho**2 + 1.0
    c = s.rho**2 + s.sigma
    return np.array([[v, c], [c, v]])


def clt_limit_density(s: CovarianceStructure, z1, z2):
    v = s.rho**2 + 1.0
    c = s.rho**2 + s.sigma
    det = v * v - c * c
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    quad = (v * z1 * z1 - 2.0 * c * z1 * z2 + v * z2 * z2) / det
    val = np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))
    return _out(val, z1, z2)
