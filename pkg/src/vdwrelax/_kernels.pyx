# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, fabs, ceil, INFINITY

cnp.import_array()

NAME = "cython"


cdef inline double _pressure(double r, double a, double b, double RT) noexcept nogil:
    return RT * r / (1.0 - b * r) - a * r * r


cdef inline double _dpressure(double r, double a, double b, double RT) noexcept nogil:
    cdef double s = 1.0 - b * r
    return RT / (s * s) - 2.0 * a * r


cdef inline void _cell(double rho, double r1, double r2, double m,
                       double a, double b, double RT, double c_min,
                       double* u, double* pmix, double* c, int* bad) noexcept nogil:
    cdef double al1, al2, rad
    u[0] = m / rho
    if r1 == r2:
        al1 = 1.0
    else:
        al1 = (rho - r2) / (r1 - r2)
    al2 = 1.0 - al1
    pmix[0] = al1 * _pressure(r1, a, b, RT) + al2 * _pressure(r2, a, b, RT)
    rad = (al1 * r1 * _dpressure(r1, a, b, RT) + al2 * r2 * _dpressure(r2, a, b, RT)) / rho
    if rad < 0.0:
        bad[0] = 1
        c[0] = c_min if c_min >= 0.0 else 0.0
    else:
        bad[0] = 0
        c[0] = sqrt(rad)


def wave_speed(double[:, ::1] W, double a, double b, double RT, double c_min):
    cdef Py_ssize_t i, n = W.shape[1]
    cdef double u, pm, c, smax = 0.0, s
    cdef int bad
    cdef Py_ssize_t n_bad = 0, first = -1
    with nogil:
        for i in range(n):
            _cell(W[0, i], W[1, i], W[2, i], W[3, i], a, b, RT, c_min, &u, &pm, &c, &bad)
            if bad:
                n_bad += 1
                if first < 0:
                    first = i
            s = fabs(u) + c
            if s > smax:
                smax = s
    return smax, n_bad, first


def convective_update(double[:, ::1] W, double dt_dx, double a, double b, double RT,
                      bint periodic, double c_min):
    cdef Py_ssize_t n = W.shape[1]
    cdef Py_ssize_t i, k, j, jl, jr
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Wn_arr = np.empty((4, n), dtype=np.float64)
    cdef double[:, ::1] Wn = Wn_arr
    cdef double[:, ::1] F = np.empty((4, n), dtype=np.float64)
    cdef double[::1] s = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] flux = np.empty((4, n + 1), dtype=np.float64)
    cdef double u, pm, c, sm
    cdef int bad
    cdef Py_ssize_t n_bad = 0, first = -1
    with nogil:
        for i in range(n):
            _cell(W[0, i], W[1, i], W[2, i], W[3, i], a, b, RT, c_min, &u, &pm, &c, &bad)
            if bad:
                n_bad += 1
                if first < 0:
                    first = i
            F[0, i] = W[0, i] * u
            F[1, i] = W[1, i] * u
            F[2, i] = W[2, i] * u
            F[3, i] = W[3, i] * u + pm
            s[i] = fabs(u) + c
        # face k separates cells k-1 and k; ghosts at k = 0 and k = n
        for k in range(n + 1):
            jl = k - 1
            jr = k
            if jl < 0:
                jl = n - 1 if periodic else 0
            if jr >= n:
                jr = 0 if periodic else n - 1
            sm = s[jl] if s[jl] > s[jr] else s[jr]
            for j in range(4):
                flux[j, k] = 0.5 * (F[j, jl] + F[j, jr]) - 0.5 * sm * (W[j, jr] - W[j, jl])
        for j in range(4):
            for i in range(n):
                Wn[j, i] = W[j, i] - dt_dx * (flux[j, i + 1] - flux[j, i])
    return Wn_arr, n_bad, first


cdef inline void _rates(double rho, double r1, double r2, double a, double b, double RT,
                        double* d1, double* d2, double* L) noexcept nogil:
    cdef double s1 = 1.0 - b * r1
    cdef double s2 = 1.0 - b * r2
    cdef double p1 = RT * r1 / s1 - a * r1 * r1
    cdef double p2 = RT * r2 / s2 - a * r2 * r2
    cdef double mu1 = RT * log(r1 / s1) + RT * b * r1 / s1 - 2.0 * a * r1
    cdef double mu2 = RT * log(r2 / s2) + RT * b * r2 / s2 - 2.0 * a * r2
    cdef double dp1 = RT / (s1 * s1) - 2.0 * a * r1
    cdef double dp2 = RT / (s2 * s2) - 2.0 * a * r2
    cdef double P = (rho - r1) * (rho - r2)
    cdef double B1 = r2 * (mu2 - mu1) + p1 - p2
    cdef double B2 = r1 * (mu1 - mu2) - p1 + p2
    cdef double j11 = -((r2 - rho) * B1 + P * dp1 * (1.0 - r2 / r1))
    cdef double j12 = -((r1 - rho) * B1 + P * (mu2 - mu1))
    cdef double j21 = (r2 - rho) * B2 + P * (mu1 - mu2)
    cdef double j22 = (r1 - rho) * B2 + P * dp2 * (1.0 - r1 / r2)
    cdef double row1 = fabs(j11) + fabs(j12)
    cdef double row2 = fabs(j21) + fabs(j22)
    d1[0] = -P * B1
    d2[0] = P * B2
    L[0] = row1 if row1 > row2 else row2


def relax_cells(double[:, ::1] W, double dt, double eps, double rate, double stiff,
                double delta, long long max_substeps, double a, double b, double RT):
    cdef Py_ssize_t n = W.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.array(W, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] out = out_arr
    cdef double rho_max = 1.0 / b
    cdef double k_eps = 1.0 / eps
    cdef Py_ssize_t i
    cdef long long count, total = 0, worst = 0
    cdef Py_ssize_t fail = -1
    cdef double rho, r1, r2, remaining, d1, d2, L, rnorm, room, hmax, h, pieces, n1, n2, lo, hi
    cdef bint last
    with nogil:
        for i in range(n):
            rho = out[0, i]
            r1 = out[1, i]
            r2 = out[2, i]
            remaining = dt
            count = 0
            while remaining > 0.0:
                if count >= max_substeps:
                    fail = i
                    break
                _rates(rho, r1, r2, a, b, RT, &d1, &d2, &L)
                rnorm = fabs(d1) if fabs(d1) > fabs(d2) else fabs(d2)
                hmax = INFINITY
                if rnorm > 0.0:
                    room = r1
                    if rho_max - r2 < room:
                        room = rho_max - r2
                    if r2 - r1 < room:
                        room = r2 - r1
                    hmax = rate * room * eps / rnorm
                if L > 0.0:
                    if stiff * eps / L < hmax:
                        hmax = stiff * eps / L
                if hmax >= remaining:
                    h = remaining
                    last = True
                else:
                    if not (hmax > 0.0):
                        fail = i
                        break
                    pieces = ceil(remaining / hmax)
                    h = remaining / pieces
                    last = pieces == 1.0
                n1 = r1 + h * k_eps * d1
                n2 = r2 + h * k_eps * d2
                lo = n1 if n1 < n2 else n2
                hi = n2 if n1 < n2 else n1
                lo = lo if lo > delta else delta
                lo = lo if lo < rho_max - delta else rho_max - delta
                hi = hi if hi > delta else delta
                hi = hi if hi < rho_max - delta else rho_max - delta
                if rho < lo:
                    lo = rho
                if rho > hi:
                    hi = rho
                r1 = lo
                r2 = hi
                remaining = 0.0 if last else remaining - h
                count += 1
            out[1, i] = r1
            out[2, i] = r2
            total += count
            if count > worst:
                worst = count
            if fail >= 0:
                break
    return out_arr, total, worst, fail
