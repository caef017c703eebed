"""Pure-numpy versions of the rotation-chain kernels.

Layout shared with the compiled module: generator ``j`` owns the pairs
``ptr[j]:ptr[j+1]`` of the flat arrays ``pa``, ``pb``, ``ps``.  A pair
``(a, b, s)`` means ``i k_j m_a = s m_b``, so conjugation by
``exp(i t k_j)`` mixes coordinates a and b through a plane rotation by 2t.
Pairs of one generator are disjoint, so each generator is a single
vectorized update.
"""
from __future__ import annotations

import numpy as np


def _rotate(x, j, angle, ptr, pa, pb, ps):
    lo, hi = ptr[j], ptr[j + 1]
    if lo == hi:
        return
    a, b, s = pa[lo:hi], pb[lo:hi], ps[lo:hi]
    c, sn = np.cos(2.0 * angle), np.sin(2.0 * angle)
    xa, xb = x[a], x[b]
    x[a] = c * xa - sn * s * xb
    x[b] = c * xb + sn * s * xa


def apply_chain(x, angles, order, ptr, pa, pb, ps, sign=1.0):
    """In place: for j in ``order`` replace x by exp(i sign angle_j k_j) x exp(-i ...)."""
    for j in order:
        _rotate(x, j, sign * angles[j], ptr, pa, pb, ps)
    return x


def cost_grad(angles, v, h, ptr, pa, pb, ps):
    """Return ``(f, grad)`` for f = <K v K^dag, h> with K = prod_j exp(i angle_j k_j)."""
    nk = len(angles)
    x = np.array(v, dtype=np.float64)
    for j in range(nk - 1, -1, -1):
        _rotate(x, j, angles[j], ptr, pa, pb, ps)
    f = float(x @ h)
    y = np.array(h, dtype=np.float64)
    grad = np.zeros(nk)
    for j in range(nk):
        lo, hi = ptr[j], ptr[j + 1]
        if lo == hi:
            continue
        a, b, s = pa[lo:hi], pb[lo:hi], ps[lo:hi]
        grad[j] = 2.0 * float(np.sum(s * (x[a] * y[b] - x[b] * y[a])))
        _rotate(x, j, -angles[j], ptr, pa, pb, ps)
        _rotate(y, j, -angles[j], ptr, pa, pb, ps)
    return f, grad


def residual_jacobian(angles, h, ptr, pa, pb, ps):
    """Return ``(y, J)`` with y = K^dag h K and J[:, j] = dy/dangle_j."""
    nk = len(angles)
    y = np.array(h, dtype=np.float64)
    J = np.zeros((len(y), nk))
    for j in range(nk):
        lo, hi = ptr[j], ptr[j + 1]
        if lo == hi:
            continue
        a, b, s = pa[lo:hi], pb[lo:hi], ps[lo:hi]
        c, sn = np.cos(2.0 * angles[j]), np.sin(2.0 * angles[j])
        ya, yb = y[a], y[b]
        y[a] = c * ya + sn * s * yb
        y[b] = c * yb - sn * s * ya
        Ja, Jb = J[a, :j], J[b, :j]
        sc = (sn * s)[:, None]
        J[a, :j], J[b, :j] = c * Ja + sc * Jb, c * Jb - sc * Ja
        # d/dt of exp(-i t k) y exp(i t k) is -i[k, y]
        J[a, j] = 2.0 * s * y[b]
        J[b, j] = -2.0 * s * y[a]
    return y, J
