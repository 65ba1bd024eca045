# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Arithmetic mirrors _fallback.py exactly; see that module for
the formulas. Built with -ffp-contract=off for bit parity on the explicit path."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def explicit_interior(double[::1] v, double[::1] sig, Py_ssize_t kl, Py_ssize_t kr,
                      double dt, double dx, double eps):
    cdef Py_ssize_t n = kr - kl + 1
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double dx2 = dx * dx
    cdef double two_dx = 2.0 * dx
    cdef double lap, grad
    cdef Py_ssize_t i, k
    for i in range(n):
        k = kl + i
        lap = (v[k - 1] - 2.0 * v[k] + v[k + 1]) / dx2
        grad = (v[k + 1] - v[k - 1]) / two_dx
        out[i] = v[k] + dt * ((sig[i] + eps) * lap + grad * grad)
    return out_arr


def implicit_interior(double[::1] v, double[::1] sig, Py_ssize_t kl, Py_ssize_t kr,
                      double dt, double dx, double eps):
    cdef Py_ssize_t n = kr - kl + 1
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] w = out_arr
    rhs_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] rhs = rhs_arr
    lam_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] lam = lam_arr
    cp_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] cp = cp_arr
    cdef double dx2 = dx * dx
    cdef double two_dx = 2.0 * dx
    cdef double grad, denom
    cdef Py_ssize_t i, k

    for i in range(n):
        k = kl + i
        lam[i] = dt * sig[i] / dx2
        grad = (v[k + 1] - v[k - 1]) / two_dx
        rhs[i] = v[k] + dt * (eps * ((v[k - 1] - 2.0 * v[k] + v[k + 1]) / dx2)) \
                      + dt * (grad * grad)
    rhs[0] += lam[0] * v[kl - 1]
    rhs[n - 1] += lam[n - 1] * v[kr + 1]

    # Thomas elimination on (-lam_i, 1 + 2 lam_i, -lam_i); strict diagonal dominance
    # keeps the pivots positive.
    denom = 1.0 + 2.0 * lam[0]
    cp[0] = -lam[0] / denom
    w[0] = rhs[0] / denom
    for i in range(1, n):
        denom = (1.0 + 2.0 * lam[i]) + lam[i] * cp[i - 1]
        cp[i] = -lam[i] / denom
        w[i] = (rhs[i] + lam[i] * w[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        w[i] = w[i] - cp[i] * w[i + 1]
    return out_arr


def state_stats(double[::1] v, double dx):
    cdef Py_ssize_t n = v.shape[0]
    cdef double vmin = v[0]
    cdef double vmax = v[0]
    cdef double max_abs_d = 0.0
    cdef double min_lap = 0.0
    cdef double d, lap
    cdef Py_ssize_t k
    cdef bint have_lap = False
    for k in range(1, n):
        if v[k] < vmin:
            vmin = v[k]
        if v[k] > vmax:
            vmax = v[k]
        d = v[k] - v[k - 1]
        if d < 0.0:
            d = -d
        if d > max_abs_d:
            max_abs_d = d
        if k < n - 1:
            lap = (v[k - 1] - 2.0 * v[k] + v[k + 1]) / (dx * dx)
            if not have_lap or lap < min_lap:
                min_lap = lap
                have_lap = True
    return vmin, vmax, max_abs_d / dx, min_lap
