# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled rotation-chain kernels; see ``_kernels_py`` for the layout."""
import numpy as np
from libc.math cimport cos, sin


cdef inline void _rotate(double[::1] x, Py_ssize_t j, double angle,
                         const long[::1] ptr, const long[::1] pa,
                         const long[::1] pb, const double[::1] ps) noexcept nogil:
    cdef Py_ssize_t p, a, b
    cdef double c = cos(2.0 * angle), sn = sin(2.0 * angle), xa, xb, s
    for p in range(ptr[j], ptr[j + 1]):
        a = pa[p]
        b = pb[p]
        s = ps[p] * sn
        xa = x[a]
        xb = x[b]
        x[a] = c * xa - s * xb
        x[b] = c * xb + s * xa


def apply_chain(x, angles, order, const long[::1] ptr, const long[::1] pa,
                const long[::1] pb, const double[::1] ps, double sign=1.0):
    cdef double[::1] xv = x
    cdef const double[::1] av = np.ascontiguousarray(angles, dtype=np.float64)
    cdef const long[::1] ov = np.ascontiguousarray(order, dtype=np.int_)
    cdef Py_ssize_t i
    with nogil:
        for i in range(ov.shape[0]):
            _rotate(xv, ov[i], sign * av[ov[i]], ptr, pa, pb, ps)
    return x


def cost_grad(angles, v, h, const long[::1] ptr, const long[::1] pa,
              const long[::1] pb, const double[::1] ps):
    cdef const double[::1] av = np.ascontiguousarray(angles, dtype=np.float64)
    cdef Py_ssize_t nk = av.shape[0], j, p, a, b
    x_arr = np.array(v, dtype=np.float64)
    y_arr = np.array(h, dtype=np.float64)
    grad_arr = np.zeros(nk)
    cdef double[::1] x = x_arr, y = y_arr, grad = grad_arr
    cdef double f = 0.0, g
    with nogil:
        for j in range(nk - 1, -1, -1):
            _rotate(x, j, av[j], ptr, pa, pb, ps)
        for p in range(x.shape[0]):
            f += x[p] * y[p]
        for j in range(nk):
            g = 0.0
            for p in range(ptr[j], ptr[j + 1]):
                a = pa[p]
                b = pb[p]
                g += ps[p] * (x[a] * y[b] - x[b] * y[a])
            grad[j] = 2.0 * g
            _rotate(x, j, -av[j], ptr, pa, pb, ps)
            _rotate(y, j, -av[j], ptr, pa, pb, ps)
    return f, grad_arr


def residual_jacobian(angles, h, const long[::1] ptr, const long[::1] pa,
                      const long[::1] pb, const double[::1] ps):
    cdef const double[::1] av = np.ascontiguousarray(angles, dtype=np.float64)
    cdef Py_ssize_t nk = av.shape[0], j, p, a, b, col
    y_arr = np.array(h, dtype=np.float64)
    J_arr = np.zeros((y_arr.shape[0], nk))
    cdef double[::1] y = y_arr
    cdef double[:, ::1] J = J_arr
    cdef double c, sn, s, ya, yb
    with nogil:
        for j in range(nk):
            c = cos(2.0 * av[j])
            sn = sin(2.0 * av[j])
            for p in range(ptr[j], ptr[j + 1]):
                a = pa[p]
                b = pb[p]
                s = ps[p] * sn
                ya = y[a]
                yb = y[b]
                y[a] = c * ya + s * yb
                y[b] = c * yb - s * ya
                for col in range(j):
                    ya = J[a, col]
                    yb = J[b, col]
                    J[a, col] = c * ya + s * yb
                    J[b, col] = c * yb - s * ya
                J[a, j] = 2.0 * ps[p] * y[b]
                J[b, j] = -2.0 * ps[p] * y[a]
    return y_arr, J_arr
