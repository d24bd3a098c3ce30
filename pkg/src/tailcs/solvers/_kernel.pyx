# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loop of the weighted-l1 splitting solver.

Mirrors ``tailcs.solvers._pykernel.admm_steps`` exactly; see that module for
the meaning of every argument.
"""
import numpy as np

from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport dgemv, zgemv

ctypedef fused scalar:
    double
    double complex


cdef inline double _abs2(scalar v) nogil:
    if scalar is double:
        return v * v
    else:
        return v.real * v.real + v.imag * v.imag


def admm_steps(scalar[:, ::1] L, scalar[::1] g, const double[::1] w,
               scalar[::1] z, scalar[::1] u, scalar[::1] y,
               unsigned char[::1] support, const unsigned char[::1] tried,
               int check_tried, double rho, double alpha,
               double abs_tol, double rel_tol, int max_steps, int window,
               int stable):
    cdef int n = L.shape[0]
    cdef int inc = 1
    cdef char trans = b'T'
    cdef scalar[::1] c
    if scalar is double:
        c = np.empty(n, dtype=np.float64)
    else:
        c = np.empty(n, dtype=np.complex128)
    cdef double one_d = 1.0
    cdef double complex one_z = 1.0
    cdef int i, step = 0, status = 0
    cdef double r = 0.0, s = 0.0, eps_pri = 0.0, eps_dual = 0.0
    cdef double r2, s2, ny2, nz2, nu2, mag, kappa, shrink
    cdef double sqn = sqrt(<double> n)
    cdef scalar yh, v, zn, dz
    cdef unsigned char nz_flag
    cdef bint changed, same_tried

    with nogil:
        while step < max_steps:
            step += 1
            for i in range(n):
                c[i] = z[i] - u[i]
                y[i] = g[i]
            if scalar is double:
                dgemv(&trans, &n, &n, &one_d, &L[0, 0], &n, &c[0], &inc,
                      &one_d, &y[0], &inc)
            else:
                zgemv(&trans, &n, &n, &one_z, &L[0, 0], &n, &c[0], &inc,
                      &one_z, &y[0], &inc)
            r2 = 0.0
            s2 = 0.0
            ny2 = 0.0
            nz2 = 0.0
            nu2 = 0.0
            changed = False
            same_tried = True
            for i in range(n):
                yh = alpha * y[i] + (1.0 - alpha) * z[i]
                v = yh + u[i]
                mag = sqrt(_abs2(v))
                kappa = w[i] / rho
                if mag > kappa:
                    shrink = 1.0 - kappa / mag
                    zn = v * shrink
                    nz_flag = 1
                else:
                    zn = 0.0
                    nz_flag = 0
                dz = zn - z[i]
                s2 += _abs2(dz)
                u[i] = v - zn
                r2 += _abs2(y[i] - zn)
                ny2 += _abs2(y[i])
                nz2 += _abs2(zn)
                nu2 += _abs2(u[i])
                z[i] = zn
                if nz_flag != support[i]:
                    changed = True
                    support[i] = nz_flag
                if nz_flag != tried[i]:
                    same_tried = False
            r = sqrt(r2)
            s = rho * sqrt(s2)
            eps_pri = abs_tol * sqn + rel_tol * sqrt(ny2 if ny2 > nz2 else nz2)
            eps_dual = abs_tol * sqn + rel_tol * rho * sqrt(nu2)
            if r < eps_pri and s < eps_dual:
                status = 1
                break
            if changed:
                stable = 0
            else:
                stable += 1
            if stable >= window and not (check_tried and same_tried):
                status = 2
                break
    return status, step, stable, r, s, eps_pri, eps_dual
