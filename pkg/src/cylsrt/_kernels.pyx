# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backprojection kernels.

Call signatures and interpolation semantics match ``_kernels_py`` exactly;
see that module for the documentation.  Parallel loops are partitioned
statically over independent output elements and every per-element sum runs in
index order, so results are bit-identical for any thread count.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sqrt

BACKEND_NAME = "cython"


def mys_all(double[:, :, ::1] data, cnp.int32_t[:, ::1] lo,
            double[:, ::1] w0, double[:, ::1] w1, double[::1] wm, int threads=1):
    cdef Py_ssize_t K = data.shape[0]
    cdef Py_ssize_t nm = data.shape[1]
    cdef Py_ssize_t ns = lo.shape[1]
    out_np = np.zeros((K, nm, ns))
    cdef double[:, :, ::1] out = out_np
    cdef Py_ssize_t k, iy, m, j, dd
    cdef cnp.int32_t l
    cdef double wmm, acc
    cdef int nt = threads if threads > 0 else 1
    for k in prange(K, nogil=True, schedule='static', num_threads=nt):
        for iy in range(nm):
            for m in range(nm):
                dd = iy - m if iy >= m else m - iy
                wmm = wm[m]
                for j in range(ns):
                    l = lo[dd, j]
                    out[k, iy, j] += wmm * (data[k, m, l] * w0[dd, j]
                                            + data[k, m, l + 1] * w1[dd, j])
    return out_np


def mx_accumulate(double[:, :, ::1] planes_t, double[:, ::1] xs, double[:, ::1] det,
                  cnp.int32_t[::1] iy_map, double ds, int mode, double w_uniform,
                  double[::1] u1, double[::1] u2, int threads=1):
    cdef Py_ssize_t K = planes_t.shape[0]
    cdef Py_ssize_t ns = planes_t.shape[1]
    cdef Py_ssize_t P = xs.shape[0]
    cdef Py_ssize_t nz = iy_map.shape[0]
    out_np = np.zeros((P, nz))
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t p, k, j, l
    cdef double x1, x2, d1, d2, t, frac, wt, a, b
    cdef int nt = threads if threads > 0 else 1
    for p in prange(P, nogil=True, schedule='static', num_threads=nt):
        x1 = xs[p, 0]
        x2 = xs[p, 1]
        for k in range(K):
            d1 = x1 - det[k, 0]
            d2 = x2 - det[k, 1]
            t = sqrt(d1 * d1 + d2 * d2) / ds
            l = <Py_ssize_t>t
            if l + 1 > ns - 1:
                continue
            frac = t - <double>l
            if mode == 0:
                wt = w_uniform
            else:
                wt = u1[k] * d1 + u2[k] * d2
            a = wt * (1.0 - frac)
            b = wt * frac
            for j in range(nz):
                out[p, j] += a * planes_t[k, l, iy_map[j]] + b * planes_t[k, l + 1, iy_map[j]]
    return out_np
