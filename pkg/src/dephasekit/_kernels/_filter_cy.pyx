# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled evaluation of the pulse-sequence filter function.

Same contract as ``_filter_py.filter_grid``.  Two inner loops:

* arithmetic pulse grids (CPMG, PDD and other equally spaced schedules)
  use a complex rotation recurrence, costing two sincos calls per x
  regardless of pulse count;
* arbitrary schedules fall back to one sincos per pulse per x.

The recurrence is an algebraically exact regrouping of the same sum, so
both paths agree to roundoff (covered by tests against the numpy
backend).
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, fabs

cnp.import_array()

BACKEND = "cython"


def filter_grid(fractions, x):
    """Evaluate F(x) for scalar or array x >= 0; see the numpy backend docstring."""
    shape = np.shape(x)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(
        np.atleast_1d(x), dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fr = np.ascontiguousarray(
        fractions, dtype=np.float64)
    res = np.empty(xa.shape[0], dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ra = res

    cdef Py_ssize_t m = xa.shape[0]
    cdef Py_ssize_t n = fr.shape[0]
    cdef Py_ssize_t i, j
    cdef double end_sign = -1.0 if n % 2 else 1.0
    cdef double xv, re, im, sgn, xs
    cdef double s0, step, zr, zi, ur, ui, tr
    cdef bint uniform

    if n == 0:
        for i in range(m):
            tr = sin(0.5 * xa[i])
            ra[i] = 2.0 * tr * tr
        return res.reshape(shape)

    # detect an arithmetic progression of pulse times
    uniform = n >= 3
    if uniform:
        step = fr[1] - fr[0]
        for j in range(2, n):
            if fabs((fr[j] - fr[j - 1]) - step) > 1e-13:
                uniform = False
                break
    s0 = fr[0]

    if uniform:
        for i in range(m):
            xv = xa[i]
            re = end_sign * cos(xv) - 1.0
            im = end_sign * sin(xv)
            zr = cos(xv * s0)
            zi = sin(xv * s0)
            ur = cos(xv * step)
            ui = sin(xv * step)
            sgn = 2.0
            for j in range(n):
                re += sgn * zr
                im += sgn * zi
                sgn = -sgn
                tr = zr * ur - zi * ui
                zi = zr * ui + zi * ur
                zr = tr
            ra[i] = 0.5 * (re * re + im * im)
    else:
        for i in range(m):
            xv = xa[i]
            re = end_sign * cos(xv) - 1.0
            im = end_sign * sin(xv)
            sgn = 2.0
            for j in range(n):
                xs = xv * fr[j]
                re += sgn * cos(xs)
                im += sgn * sin(xs)
                sgn = -sgn
            ra[i] = 0.5 * (re * re + im * im)
    return res.reshape(shape)
