# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: modified Bessel K and the joint density.

Same algorithms and signatures as ``_kernels_py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, exp, fabs, lgamma, INFINITY, M_PI

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double SERIES_SWITCH = 2.0
cdef double ASYMPTOTIC_SWITCH = 30.0
cdef double SMALL_ARG = 1e-8
cdef double RESCALE = 1e250
cdef double LOG_RESCALE = log(1e250)


cdef void _k01_series(double x, double *k0, double *k1) noexcept nogil:
    cdef double t = 0.25 * x * x
    cdef double lg = log(0.5 * x)
    cdef double p = 1.0          # t**k / (k!)**2
    cdef double q = 1.0          # t**k / (k! (k+1)!)
    cdef double h = 0.0          # harmonic number H_k
    cdef double i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0
    cdef double psi1, psi2
    cdef int k
    for k in range(16):
        if k > 0:
            h += 1.0 / k
            p *= t / (<double>k * k)
            q *= t / (<double>k * (k + 1))
        psi1 = h - EULER_GAMMA
        psi2 = h + 1.0 / (k + 1) - EULER_GAMMA
        i0 += p
        i1 += q
        s0 += psi1 * p
        s1 += (psi1 + psi2) * q
    k0[0] = -lg * i0 + s0
    k1[0] = 1.0 / x + lg * 0.5 * x * i1 - 0.25 * x * s1


cdef void _k01_cf2_scaled(double x, double *k0, double *k1) noexcept nogil:
    cdef double b = 2.0 * (1.0 + x)
    cdef double d = 1.0 / b
    cdef double h = d, delh = d
    cdef double q1 = 0.0, q2 = 1.0
    cdef double a1 = 0.25
    cdef double q = a1, c = a1, a = -a1
    cdef double s = 1.0 + q * delh
    cdef double qnew, dels
    cdef int i
    for i in range(2, 20000):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if fabs(dels) < 1e-16 * fabs(s):
            break
    h = a1 * h
    k0[0] = sqrt(M_PI / (2.0 * x)) / s
    k1[0] = k0[0] * (x + 0.5 - h) / x


cdef double _asymptotic_scaled(double nu, double x) noexcept nogil:
    cdef double mu = 4.0 * nu * nu
    cdef double term = 1.0, total = 1.0, f
    cdef int k
    for k in range(1, 24):
        f = mu - (2 * k - 1) * (2 * k - 1)
        term *= f / (k * 8.0 * x)
        total += term
        if f == 0.0:
            break
    return sqrt(M_PI / (2.0 * x)) * total


cdef double c_log_kv_scaled(int twice_nu, double x) noexcept nogil:
    cdef int m = twice_nu if twice_nu >= 0 else -twice_nu
    cdef double prev, cur, nxt, nu, e
    cdef double offset = 0.0
    cdef int steps, j
    if m % 2 == 1:
        prev = sqrt(M_PI / (2.0 * x))
        if m == 1:
            return log(prev)
        cur = prev * (1.0 + 1.0 / x)
        nu = 1.5
        steps = (m - 3) // 2
    else:
        if x <= SERIES_SWITCH:
            _k01_series(x, &prev, &cur)
            e = exp(x)
            prev *= e
            cur *= e
        elif x >= ASYMPTOTIC_SWITCH:
            prev = _asymptotic_scaled(0.0, x)
            cur = _asymptotic_scaled(1.0, x)
        else:
            _k01_cf2_scaled(x, &prev, &cur)
        if m == 0:
            return log(prev)
        nu = 1.0
        steps = m // 2 - 1
    for j in range(steps):
        nxt = prev + (2.0 * nu / x) * cur
        prev = cur
        cur = nxt
        nu += 1.0
        if cur > RESCALE:
            prev /= RESCALE
            cur /= RESCALE
            offset += LOG_RESCALE
    return log(cur) + offset


def log_kv_scaled(twice_nu, x):
    """log(exp(x) K_nu(x)) for nu = twice_nu / 2 and x > 0."""
    cdef cnp.ndarray[double, ndim=1] xs = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef int tn = int(twice_nu)
    with nogil:
        for i in range(n):
            out[i] = c_log_kv_scaled(tn, xs[i])
    return out.reshape(np.shape(x))


def bessel_k(twice_nu, x):
    """K_nu(x) for nu = twice_nu / 2 and x > 0, elementwise."""
    cdef cnp.ndarray[double, ndim=1] xs = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef int tn = int(twice_nu)
    with nogil:
        for i in range(n):
            out[i] = exp(c_log_kv_scaled(tn, xs[i]) - xs[i])
    return out.reshape(np.shape(x))


def log_density_coefficient(n, lam, kap, alpha):
    return (
        -lgamma(0.5 * n)
        + 0.5 * n * log(lam * kap)
        - 0.5 * n * log(2.0)
        - log(M_PI)
        - 0.5 * (n - 2) * log(alpha)
    )


def density(int n, double lam, double kap, double delta, double alpha, x, y):
    """Joint density of the covariance pair for sample size n."""
    bx, by = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    shape = bx.shape
    cdef cnp.ndarray[double, ndim=1] xs = np.ascontiguousarray(bx.ravel())
    cdef cnp.ndarray[double, ndim=1] ys = np.ascontiguousarray(by.ravel())
    cdef Py_ssize_t i, m = xs.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(m)
    cdef double c = alpha / (2.0 * lam * kap)
    cdef double nu = 0.5 * (n - 2)
    cdef int nu2 = n - 2
    cdef double log_coef = log_density_coefficient(n, lam, kap, alpha)
    cdef double lim = 0.0
    cdef double w, z, r, arg
    if n >= 3:
        lim = lgamma(nu) + (nu - 1.0) * log(2.0) - nu * log(c)
    with nogil:
        for i in range(m):
            w = xs[i] + ys[i]
            z = xs[i] - ys[i]
            r = sqrt(kap * kap * w * w + lam * lam * z * z)
            arg = c * r
            if r == 0.0 or (n >= 4 and arg < SMALL_ARG):
                if n <= 2:
                    out[i] = INFINITY
                else:
                    out[i] = exp(log_coef + lim + 0.5 * delta * w)
            else:
                out[i] = exp(log_coef + 0.5 * delta * w + nu * log(r)
                             + c_log_kv_scaled(nu2, arg) - arg)
    return out.reshape(shape)
