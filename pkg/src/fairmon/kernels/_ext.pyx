# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled hot kernels; operation-for-operation twin of ``_pure``."""

from libc.math cimport exp, expm1, log, sqrt


cpdef double azuma_epsilon(long t, double delta, double sigma_sq, double nu):
    cdef double log_term = log(2.0 / delta)
    cdef double gauss = sqrt(2.0 * sigma_sq / t * log_term)
    cdef double heavy = 2.0 * nu / t * log_term
    return gauss if gauss >= heavy else heavy


cpdef tuple estimator_step(long t, double e1_hat, double d, double d_comp,
                           double x, double shift, double delta,
                           double sigma_sq, double nu):
    cdef double e_hat, y, s, eps
    t += 1
    e1_hat = (e1_hat * (t - 1) + (x - d)) / t
    e_hat = e1_hat + d
    y = shift - d_comp
    s = d + y
    d_comp = (s - d) - y
    d = s
    eps = azuma_epsilon(t, delta, sigma_sq, nu)
    return t, e1_hat, d, d_comp, e_hat, eps


cpdef double eta(long y, double lam):
    cdef double term, acc
    cdef long k
    if lam > y:
        term = exp(-lam)
        acc = 0.0
        for k in range(y):
            acc += term * (1.0 - y / <double>(k + 1))
            term *= lam / (k + 1)
        return acc + (y / lam) * -expm1(-lam)
    term = exp(-lam)
    for k in range(1, y + 1):
        term *= lam / k
    acc = 0.0
    k = y
    while term > 1e-20 * acc or k == y:
        acc += term * (1.0 - y / <double>(k + 1))
        term *= lam / (k + 1)
        k += 1
    return 1.0 - acc
