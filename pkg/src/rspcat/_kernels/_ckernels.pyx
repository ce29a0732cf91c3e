# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels; see ``_pykernels`` for the contracts."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, lgamma, cosh, tanh, log1p, fabs, INFINITY, M_PI

cnp.import_array()

cdef double _BIG = 1e150


def hermite_functions(int nmax, x):
    cdef cnp.ndarray[double, ndim=1] xa = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    cdef Py_ssize_t nx = xa.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((nmax + 1, nx))
    cdef double[:, ::1] o = out
    cdef double[::1] xv = xa
    cdef Py_ssize_t i
    cdef int k
    cdef double xi, prev, cur, nxt, ls, s
    cdef double lpq = 0.25 * log(M_PI)
    for i in range(nx):
        xi = xv[i]
        ls = -0.5 * xi * xi - lpq
        prev = 0.0
        cur = 1.0
        o[0, i] = exp(ls)
        for k in range(nmax):
            nxt = sqrt(2.0 / (k + 1)) * xi * cur - sqrt(<double>k / (k + 1)) * prev
            if fabs(nxt) > _BIG:
                s = fabs(nxt)
                nxt /= s
                cur /= s
                ls += log(s)
            prev = cur
            cur = nxt
            o[k + 1, i] = cur * exp(ls)
    return out


cdef inline double _xlog(double e, double logbase) nogil:
    if e == 0.0:
        return 0.0
    return e * logbase


cdef struct LogParams:
    double log_a
    double lg
    double leta
    double l1
    double lt


cdef LogParams _log_params(double zeta, double rs, double eta):
    cdef LogParams p
    cdef double ch = cosh(rs)
    p.log_a = log1p(-zeta * zeta) - 2.0 * log(ch)
    p.lg = log(zeta / ch) if zeta > 0 else -INFINITY
    p.leta = log(eta) if eta > 0 else -INFINITY
    p.l1 = log((1.0 - eta) * ch * ch) if eta < 1 else -INFINITY
    p.lt = log(tanh(rs)) if rs > 0 else -INFINITY
    return p


cdef inline double _coeff(int m1, int m2, int n1, int n2, LogParams* p, double[::1] lf) nogil:
    cdef int klo = m2 - m1
    cdef int khi = m2 if m2 < n2 else n2
    cdef int k, d = m1 - m2
    cdef double acc = 0.0, t
    if klo < 0:
        klo = 0
    for k in range(klo, khi + 1):
        t = (p.log_a
             + _xlog(m2 + n2, p.lg)
             + _xlog(0.5 * (m2 + n2) - k, p.leta)
             + _xlog(k, p.l1)
             + _xlog(2 * (d + k), p.lt)
             + 0.5 * (lf[m2] - lf[k] - lf[m2 - k]
                      + lf[n2] - lf[k] - lf[n2 - k]
                      + lf[m1] - lf[m2 - k] - lf[m1 - m2 + k]
                      + lf[n1] - lf[n2 - k] - lf[n1 - n2 + k]))
        acc += exp(t)
    return acc


cdef cnp.ndarray _lfact_table(int n):
    cdef cnp.ndarray[double, ndim=1] lf = np.empty(n)
    cdef int i
    for i in range(n):
        lf[i] = lgamma(i + 1.0)
    return lf


def mixed_block(double zeta, double rs, double eta, kmat, int nb):
    cdef double[:, ::1] kv = np.ascontiguousarray(kmat, dtype=np.float64)
    cdef int na = kv.shape[0]
    cdef double[::1] lf = _lfact_table(na + nb + 2)
    cdef LogParams p = _log_params(zeta, rs, eta)
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((nb + 1, nb + 1))
    cdef double[:, ::1] o = out
    cdef int m2, n2, m1, n1
    cdef double acc, kval
    with nogil:
        for m2 in range(nb + 1):
            for n2 in range(m2, nb + 1):
                acc = 0.0
                for m1 in range(1, na + 1 - (n2 - m2)):
                    n1 = m1 + n2 - m2
                    kval = kv[m1 - 1, n1 - 1]
                    if kval == 0.0:
                        continue
                    acc += _coeff(m1, m2, n1, n2, &p, lf) * sqrt(<double>m1 * n1) * kval
                o[m2, n2] = acc
                o[n2, m2] = acc
    return out


def alice_weights(double zeta, double rs, double eta, int na, int n2max):
    cdef double[::1] lf = _lfact_table(na + n2max + 2)
    cdef LogParams p = _log_params(zeta, rs, eta)
    cdef cnp.ndarray[double, ndim=1] w = np.zeros(na + 1)
    cdef double[::1] wv = w
    cdef int n1, n2
    cdef double acc
    with nogil:
        for n1 in range(na + 1):
            acc = 0.0
            for n2 in range(n2max + 1):
                acc += _coeff(n1, n2, n1, n2, &p, lf)
            wv[n1] = acc
    return w


def wigner_grid(rho, xs, ps):
    cdef cnp.ndarray[complex, ndim=2] r = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef double[::1] rre = np.ascontiguousarray(r.real).ravel()
    cdef double[::1] rim = np.ascontiguousarray(r.imag).ravel()
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(ps, dtype=np.float64)
    cdef int dim = r.shape[0]
    cdef Py_ssize_t nx = xv.shape[0], npp = pv.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((npp, nx))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef int d, n, sgn
    cdef double x, pp, rad2, y, az, cr, ci, rdr, rdi, tr, total
    cdef double hc, hp, hn, ar, ai, logy
    with nogil:
        for j in range(npp):
            for i in range(nx):
                x = xv[i]
                pp = pv[j]
                rad2 = x * x + pp * pp
                y = 2.0 * rad2
                az = sqrt(rad2)
                if az > 0:
                    cr = x / az
                    ci = -pp / az
                    logy = log(y)
                else:
                    cr = 1.0
                    ci = 0.0
                    logy = -INFINITY
                rdr = 1.0
                rdi = 0.0
                total = 0.0
                for d in range(dim):
                    if d == 0:
                        hc = exp(-0.5 * y)
                    elif y > 0:
                        hc = exp(-0.5 * y + 0.5 * d * logy - 0.5 * lgamma(d + 1.0))
                    else:
                        hc = 0.0
                    hp = 0.0
                    ar = 0.0
                    ai = 0.0
                    sgn = 1
                    for n in range(dim - d):
                        ar += sgn * rre[(n + d) * dim + n] * hc
                        ai += sgn * rim[(n + d) * dim + n] * hc
                        hn = ((2 * n + 1 + d - y) * hc - sqrt(<double>n * (n + d)) * hp) / sqrt(
                            (n + 1.0) * (n + 1 + d))
                        hp = hc
                        hc = hn
                        sgn = -sgn
                    if d == 0:
                        total += ar
                    else:
                        total += 2.0 * (rdr * ar - rdi * ai)
                    tr = rdr * cr - rdi * ci
                    rdi = rdr * ci + rdi * cr
                    rdr = tr
                o[j, i] = total / M_PI
    return out
