# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the Bessel-potential and truncated-exponential kernels.

Same contracts as ``kreinres._kernels_py``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, sqrt, fabs, NAN

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)

cdef double LOG_DROP = 50.0
cdef int MAX_HALVINGS = 14


cdef inline double _logf(double u, double t2, double nu) noexcept nogil:
    return -t2 * exp(-u) - 0.25 * exp(u) + nu * u


cdef inline double _logenv(double u, double t, double nu) noexcept nogil:
    cdef double em = exp(-u)
    return _logf(u, t * t, nu) + log1p(em * (1.0 + t) + t * t * em * em)


cdef inline double _peak(double t, double nu) noexcept nogil:
    cdef double r = sqrt(nu * nu + t * t)
    if nu >= 0:
        return log(2.0 * (r + nu))
    return log(2.0 * t * t / (r - nu))


cdef void _sums(double lo, double h, long start, long stride, long count, double t, double t2,
                double nu, double* s, double* a) noexcept nogil:
    cdef long i
    cdef double u, f, em, w1, w2
    s[0] = 0.0; s[1] = 0.0; s[2] = 0.0
    a[0] = 0.0; a[1] = 0.0; a[2] = 0.0
    for i in range(count):
        u = lo + h * (start + stride * i)
        f = exp(_logf(u, t2, nu))
        em = exp(-u)
        w1 = -2.0 * t * em
        w2 = 4.0 * t2 * em * em - 2.0 * em
        s[0] += f
        s[1] += w1 * f
        s[2] += w2 * f
        a[0] += f
        a[1] += fabs(w1 * f)
        a[2] += fabs(w2 * f)


cdef int _bessel_one(double t, double nu, double rtol, double* S) noexcept nogil:
    cdef double t2 = t * t
    cdef double u0 = _peak(t, nu)
    cdef double top = _logenv(u0, t, nu)
    cdef double F0 = _logf(u0, t2, nu)
    cdef double lo = u0, hi = u0, d, v
    cdef double s[3]
    cdef double a[3]
    cdef double A[3]
    cdef double Snew[3]
    cdef long n = 64
    cdef int it, j, done
    cdef double h
    if t == 0.0:  # callers evaluate G at t != 0 only
        S[0] = NAN; S[1] = NAN; S[2] = NAN
        return 0
    # left cutoff from the weighted envelope's running max, right from the plain integrand
    d = 0.5
    while True:
        v = _logenv(lo, t, nu)
        if v > top:
            top = v
        if v <= top - LOG_DROP:
            break
        if lo < u0 - 1e4:  # integrand not decaying (t = 0)
            S[0] = NAN; S[1] = NAN; S[2] = NAN
            return 0
        lo -= d
        d *= 1.5
    d = 0.5
    while _logf(hi, t2, nu) > F0 - LOG_DROP:
        hi += d
        d *= 1.5
    h = (hi - lo) / n
    _sums(lo, h, 0, 1, n + 1, t, t2, nu, s, a)
    for j in range(3):
        S[j] = s[j] * h
        A[j] = a[j] * h
    for it in range(MAX_HALVINGS):
        h *= 0.5
        _sums(lo, h, 1, 2, n, t, t2, nu, s, a)
        done = 1
        for j in range(3):
            Snew[j] = 0.5 * S[j] + h * s[j]
            A[j] = 0.5 * A[j] + h * a[j]
            if fabs(Snew[j] - S[j]) > rtol * A[j]:
                done = 0
            S[j] = Snew[j]
        n *= 2
        if done:
            return 1
    return 0


def bessel_table(double sigma, t, double rtol=1e-10):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.abs(np.ascontiguousarray(t, dtype=np.float64)).ravel()
    cdef long m = tt.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((3, m))
    cdef double nu = 0.5 * (sigma - 1.0)
    cdef double S[3]
    cdef long i
    cdef int ok = 1
    for i in range(m):
        if not _bessel_one(tt[i], nu, rtol, S):
            ok = 0
        out[0, i] = S[0]
        out[1, i] = S[1]
        out[2, i] = S[2]
    return out, bool(ok)


def truncated_exp(int k, tau):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] tv = np.ascontiguousarray(tau, dtype=np.complex128).ravel()
    cdef long m = tv.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(m, dtype=np.complex128)
    cdef double complex z, term, acc, partial
    cdef double fk = 1.0, thr = k if k > 1 else 1.0
    cdef long i
    cdef int j
    for j in range(2, k + 1):
        fk *= j
    for i in range(m):
        z = 1j * tv[i]
        if cabs(tv[i]) < thr:
            term = 1.0 / fk
            acc = term
            j = 0
            while True:
                j += 1
                term = term * z / (j + k)
                acc = acc + term
                if cabs(term) <= 1e-17 * cabs(acc) or j > 200:
                    break
            out[i] = acc
        else:
            partial = 0.0
            term = 1.0
            for j in range(k):
                partial = partial + term
                term = term * z / (j + 1)
            out[i] = (cexp(z) - partial) / z ** k
    return out.reshape(np.shape(tau))
