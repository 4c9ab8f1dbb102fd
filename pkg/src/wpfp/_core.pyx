# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled brute-force Green's function sum (see ``_core_py`` for the contract)."""

import numpy as np
from libc.math cimport exp


def green_sum(double[:, ::1] w0, double[::1] x, double[::1] v, double cell,
              double period, coef, double growth, double shear,
              double prefactor, int images, double cutoff):
    cdef double cnu = coef[0], clam = coef[1], cmu = coef[2]
    cdef Py_ssize_t nx = x.shape[0], nv = v.shape[0]
    cdef Py_ssize_t i, j, p, q
    cdef int m
    cdef double acc, yx0, yx, yv, quad, src
    out = np.empty((nx, nv))
    cdef double[:, ::1] res = out
    with nogil:
        for i in range(nx):
            for j in range(nv):
                acc = 0.0
                for p in range(nx):
                    yx0 = x[i] - shear * v[j] - x[p]
                    for q in range(nv):
                        src = w0[p, q]
                        if src == 0.0:
                            continue
                        yv = growth * v[j] - v[q]
                        for m in range(-images, images + 1):
                            yx = yx0 + m * period
                            quad = cnu * yx * yx + clam * yv * yv + cmu * yx * yv
                            if quad < cutoff:
                                acc = acc + src * exp(-quad)
                res[i, j] = acc * prefactor * cell
    return out
