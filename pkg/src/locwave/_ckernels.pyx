# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: real J0/J1, complex sinc and the Fourier sinc series.

Same algorithms and region boundaries as ``_kernels_py``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, fabs, M_PI

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double complex csin(double complex)
    double cabs(double complex)

cnp.import_array()

BACKEND = "cython"

cdef double SERIES_MAX = 4.0
cdef double ASYMPT_MIN = 25.0
DEF N_SERIES = 48
DEF N_ASYMPT = 20

# reciprocal tables keep divisions out of the dependency chains
cdef double INV0[N_SERIES]
cdef double INV1[N_SERIES]
# Hankel coefficients (-1)^j a_{2j}(nu) and (-1)^j a_{2j+1}(nu) for nu = 0, 1
cdef double HP[2][N_ASYMPT]
cdef double HQ[2][N_ASYMPT]


cdef void _init_tables():
    cdef int k, nu, j
    cdef double mu, a
    for k in range(1, N_SERIES):
        INV0[k] = 1.0 / (k * k)
        INV1[k] = 1.0 / (k * (k + 1))
    for nu in range(2):
        mu = 4.0 * nu * nu
        a = 1.0
        HP[nu][0] = 1.0
        for k in range(1, 2 * N_ASYMPT):
            a = a * (mu - (2 * k - 1) * (2 * k - 1)) / (k * 8.0)
            j = k // 2
            if k % 2 == 1:
                HQ[nu][j] = a if j % 2 == 0 else -a
            else:
                HP[nu][j] = a if j % 2 == 0 else -a


_init_tables()


cdef inline double _series(double x, int order) nogil:
    cdef double h = 0.25 * x * x
    cdef double term = 1.0 if order == 0 else 0.5 * x
    cdef double total = term
    cdef double* inv
    cdef int k
    if order == 0:
        inv = &INV0[0]
    else:
        inv = &INV1[0]
    for k in range(1, N_SERIES):
        term = -term * h * inv[k]
        total += term
        if fabs(term) < 1e-17:
            break
    return total


cdef inline void _series01(double x, double* j0, double* j1) nogil:
    # both orders in one loop so the two multiply chains overlap
    cdef double h = 0.25 * x * x
    cdef double t0 = 1.0, t1 = 0.5 * x
    cdef double s0 = t0, s1 = t1
    cdef int k
    for k in range(1, N_SERIES):
        t0 = -t0 * h * INV0[k]
        t1 = -t1 * h * INV1[k]
        s0 += t0
        s1 += t1
        if fabs(t0) < 1e-17 and fabs(t1) < 1e-17:
            break
    j0[0] = s0
    j1[0] = s1


cdef inline void _miller(double x, double* j0, double* j1) nogil:
    cdef int n_start = 2 * ((<int>x + 40 + <int>(2.0 * sqrt(x))) // 2)
    cdef double fkp1 = 0.0, fk = 1e-30, fkm1, norm = 0.0, s1 = 0.0
    cdef double two_over_x = 2.0 / x
    cdef int k
    for k in range(n_start, 0, -1):
        fkm1 = (k * two_over_x) * fk - fkp1
        fkp1 = fk
        fk = fkm1
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * fk
        if k - 1 == 1:
            s1 = fk
    norm += fk
    j0[0] = fk / norm
    j1[0] = s1 / norm


cdef inline double _asympt(double x, int nu) nogil:
    cdef double y = 1.0 / x
    cdef double y2 = y * y
    cdef double p = 0.0, q = 0.0, chi
    cdef int j
    for j in range(N_ASYMPT - 1, -1, -1):
        p = p * y2 + HP[nu][j]
        q = q * y2 + HQ[nu][j]
    q = q * y
    chi = x - (0.5 * nu + 0.25) * M_PI
    return sqrt(2.0 * y / M_PI) * (p * cos(chi) - q * sin(chi))


cdef inline void _j01(double x, double* j0, double* j1) nogil:
    cdef double ax = fabs(x)
    if ax <= SERIES_MAX:
        _series01(ax, j0, j1)
    elif ax >= ASYMPT_MIN:
        j0[0] = _asympt(ax, 0)
        j1[0] = _asympt(ax, 1)
    else:
        _miller(ax, j0, j1)
    if x < 0:
        j1[0] = -j1[0]


def j01_real(x):
    cdef cnp.ndarray[double, ndim=1] xf = np.ascontiguousarray(np.asarray(x, dtype=float).ravel())
    cdef Py_ssize_t n = xf.shape[0], i
    cdef cnp.ndarray[double, ndim=1] o0 = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] o1 = np.empty(n)
    cdef double a, b
    with nogil:
        for i in range(n):
            _j01(xf[i], &a, &b)
            o0[i] = a
            o1[i] = b
    shape = np.shape(x)
    return o0.reshape(shape), o1.reshape(shape)


def j0_real(x):
    return j01_real(x)[0]


def j1_real(x):
    return j01_real(x)[1]


cdef inline double complex _csinc(double complex z) nogil:
    cdef double complex z2
    if cabs(z) < 1e-4:
        z2 = z * z
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0
    return csin(z) / z


def csinc(z):
    cdef cnp.ndarray[double complex, ndim=1] zf = np.ascontiguousarray(
        np.asarray(z, dtype=complex).ravel())
    cdef Py_ssize_t n = zf.shape[0], i
    cdef cnp.ndarray[double complex, ndim=1] out = np.empty(n, dtype=complex)
    with nogil:
        for i in range(n):
            out[i] = _csinc(zf[i])
    return out.reshape(np.shape(z))


def sinc_series(gamma, beta2, coeffs, n_min):
    g, b2 = np.broadcast_arrays(np.asarray(gamma, dtype=float), np.asarray(beta2, dtype=float))
    shape = g.shape
    cdef cnp.ndarray[double, ndim=1] gf = np.ascontiguousarray(g.ravel())
    cdef cnp.ndarray[double, ndim=1] bf = np.ascontiguousarray(b2.ravel())
    cdef cnp.ndarray[double complex, ndim=1] cf = np.ascontiguousarray(
        np.asarray(coeffs, dtype=complex).ravel())
    cdef Py_ssize_t n = gf.shape[0], nc = cf.shape[0], i, j
    cdef int n0 = n_min
    cdef cnp.ndarray[double complex, ndim=1] out = np.zeros(n, dtype=complex)
    cdef double complex acc
    cdef double arg, Z, sz
    with nogil:
        for i in range(n):
            acc = 0.0
            for j in range(nc):
                if cf[j] == 0:
                    continue
                arg = gf[i] + (n0 + j) * M_PI
                Z = sqrt(arg * arg + bf[i])
                if Z < 1e-4:
                    sz = 1.0 - Z * Z / 6.0 + Z * Z * Z * Z / 120.0
                else:
                    sz = sin(Z) / Z
                acc = acc + cf[j] * sz
            out[i] = acc
    return out.reshape(shape)
