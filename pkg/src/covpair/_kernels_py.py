"""Pure numpy kernels.

Reference implementation of the hot loops. The Cython module ``_ckernels``
exposes the same functions with the same signatures; ``covpair._backend``
picks one at import time.
"""

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
SERIES_SWITCH = 2.0
ASYMPTOTIC_SWITCH = 30.0
# z below which z**nu * K_nu(z) is replaced by its limit Gamma(nu) 2**(nu-1)
SMALL_ARG = 1e-8
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)

_N_SERIES = 16
_k = np.arange(_N_SERIES, dtype=float)
_fact = np.array([math.factorial(int(k)) for k in _k], dtype=float)
_harm = np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, _N_SERIES))))
# psi(k+1) = H_k - gamma
_psi1 = _harm - EULER_GAMMA
_psi2 = np.concatenate((_harm[1:], [_harm[-1] + 1.0 / _N_SERIES])) - EULER_GAMMA
_C_I0 = 1.0 / (_fact * _fact)
_C_I1 = 1.0 / (_fact * _fact * (_k + 1.0))
_C_K0 = _psi1 / (_fact * _fact)
_C_K1 = (_psi1 + _psi2) / (_fact * _fact * (_k + 1.0))


def _k01_series(x):
    """K_0 and K_1 by the ascending series (x <= 2)."""
    t = 0.25 * x * x
    powers = t[..., None] ** _k
    i0 = powers @ _C_I0
    i1 = 0.5 * x * (powers @ _C_I1)
    lg = np.log(0.5 * x)
    k0 = -lg * i0 + powers @ _C_K0
    k1 = 1.0 / x + lg * i1 - 0.25 * x * (powers @ _C_K1)
    return k0, k1


def _k01_cf2_scaled(x):
    """exp(x) K_0 and exp(x) K_1 by Steed's continued fraction (x > 2)."""
    eps = 1e-16
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    active = np.ones(x.shape, dtype=bool)
    for i in range(2, 20000):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = np.where(active, h + delh, h)
        dels = q * delh
        s = np.where(active, s + dels, s)
        active &= np.abs(dels) >= eps * np.abs(s)
        if not active.any():
            break
    h = a1 * h
    k0 = np.sqrt(np.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def _asymptotic_scaled(nu, x, nterms=24):
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, nterms):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total = total + term
        if mu - (2 * k - 1) ** 2 == 0.0:
            break
    return np.sqrt(np.pi / (2.0 * x)) * total


def _k01_scaled(x):
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    lo = x <= SERIES_SWITCH
    hi = x >= ASYMPTOTIC_SWITCH
    mid = ~lo & ~hi
    if lo.any():
        xs = x[lo]
        a, b = _k01_series(xs)
        e = np.exp(xs)
        k0[lo] = a * e
        k1[lo] = b * e
    if mid.any():
        k0[mid], k1[mid] = _k01_cf2_scaled(x[mid])
    if hi.any():
        xs = x[hi]
        k0[hi] = _asymptotic_scaled(0.0, xs)
        k1[hi] = _asymptotic_scaled(1.0, xs)
    return k0, k1


def log_kv_scaled(twice_nu, x):
    """log(exp(x) K_nu(x)) for nu = twice_nu / 2 and x > 0."""
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = np.atleast_1d(x).ravel()
    m = abs(int(twice_nu))
    if m % 2:
        prev = np.sqrt(np.pi / (2.0 * x))
        if m == 1:
            return np.log(prev).reshape(shape)
        cur = prev * (1.0 + 1.0 / x)
        nu, steps = 1.5, (m - 3) // 2
    else:
        prev, cur = _k01_scaled(x)
        if m == 0:
            return np.log(prev).reshape(shape)
        nu, steps = 1.0, m // 2 - 1
    offset = np.zeros_like(x)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            prev, cur = cur, prev + (2.0 * nu / x) * cur
            nu += 1.0
            big = cur > _RESCALE
            if big.any():
                prev = np.where(big, prev / _RESCALE, prev)
                cur = np.where(big, cur / _RESCALE, cur)
                offset = offset + np.where(big, _LOG_RESCALE, 0.0)
    return (np.log(cur) + offset).reshape(shape)


def bessel_k(twice_nu, x):
    """K_nu(x) for nu = twice_nu / 2 and x > 0, elementwise."""
    x = np.asarray(x, dtype=float)
    with np.errstate(under="ignore", over="ignore"):
        return np.exp(log_kv_scaled(twice_nu, x) - x)


def log_density_coefficient(n, lam, kap, alpha):
    return (
        -math.lgamma(0.5 * n)
        + 0.5 * n * math.log(lam * kap)
        - 0.5 * n * math.log(2.0)
        - math.log(math.pi)
        - 0.5 * (n - 2) * math.log(alpha)
    )


def density(n, lam, kap, delta, alpha, x, y):
    """Joint density of the covariance pair for sample size n.

    Works with the derived constants directly so the kernel carries no
    structure object. Returns +inf at the origin for n <= 2.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    shape = x.shape
    x = x.ravel()
    y = y.ravel()
    w = x + y
    z = x - y
    r = np.sqrt(kap * kap * w * w + lam * lam * z * z)
    c = alpha / (2.0 * lam * kap)
    arg = c * r
    nu2 = n - 2
    nu = 0.5 * nu2
    log_coef = log_density_coefficient(n, lam, kap, alpha)
    out = np.empty_like(x)

    if n >= 4:
        small = arg < SMALL_ARG
    else:
        small = r == 0.0
    regular = ~small
    if regular.any():
        ar = arg[regular]
        logf = (
            log_coef
            + 0.5 * delta * w[regular]
            + nu * np.log(r[regular])
            + log_kv_scaled(nu2, ar)
            - ar
        )
        with np.errstate(under="ignore", over="ignore"):
            out[regular] = np.exp(logf)
    if small.any():
        if n <= 2:
            out[small] = np.inf
        else:
            # r**nu K_nu(c r) -> Gamma(nu) 2**(nu-1) c**-nu
            lim = math.lgamma(nu) + (nu - 1.0) * math.log(2.0) - nu * math.log(c)
            out[small] = np.exp(log_coef + lim + 0.5 * delta * w[small])
    return out.reshape(shape)
