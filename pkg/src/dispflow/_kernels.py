"""Compiled inner loops for long trajectories.

The third-order dispersion forces dt ~ dx^3 on explicit RK4, so production
runs take millions of steps; a plain numpy step is ~10x too slow.  The
kernels here advance the curve in place between diagnostic samples.  They
implement exactly the same update as flow.step_rk4 (same derivative
matrix, same projections, same renormalization), differing only in
floating-point association, and the test suite pins the two paths against
each other.

If numba is unavailable the module still imports; HAVE_NUMBA tells the
caller to fall back to the numpy loop.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap

OK = 0
NONFINITE = 1


@njit(cache=True, fastmath=True)
def _rhs_into(u, d, a, b, inv_r2, inv_r, out):
    # out <- a * P(D P(D D u)) + (u/r) x P(D D u) + b * |Du|^2 Du
    n = u.shape[0]
    ux = np.dot(d, u)
    w = np.dot(d, ux)
    z = np.empty((n, 3))
    for i in range(n):
        c = (w[i, 0] * u[i, 0] + w[i, 1] * u[i, 1] + w[i, 2] * u[i, 2]) * inv_r2
        z[i, 0] = w[i, 0] - c * u[i, 0]
        z[i, 1] = w[i, 1] - c * u[i, 1]
        z[i, 2] = w[i, 2] - c * u[i, 2]
    w2 = np.dot(d, z)
    for i in range(n):
        c = (w2[i, 0] * u[i, 0] + w2[i, 1] * u[i, 1] + w2[i, 2] * u[i, 2]) * inv_r2
        px = w2[i, 0] - c * u[i, 0]
        py = w2[i, 1] - c * u[i, 1]
        pz = w2[i, 2] - c * u[i, 2]
        jx = (u[i, 1] * z[i, 2] - u[i, 2] * z[i, 1]) * inv_r
        jy = (u[i, 2] * z[i, 0] - u[i, 0] * z[i, 2]) * inv_r
        jz = (u[i, 0] * z[i, 1] - u[i, 1] * z[i, 0]) * inv_r
        g = ux[i, 0] * ux[i, 0] + ux[i, 1] * ux[i, 1] + ux[i, 2] * ux[i, 2]
        out[i, 0] = a * px + jx + b * g * ux[i, 0]
        out[i, 1] = a * py + jy + b * g * ux[i, 1]
        out[i, 2] = a * pz + jz + b * g * ux[i, 2]


@njit(cache=True, fastmath=True)
def evolve(u, d, a, b, r, dt, nsteps, renorm):
    """Advance u in place by nsteps classical RK4 steps.

    Returns (status, steps_done, max_renorm_disp).  status != OK means a
    non-finite value appeared; u then holds the last finite state and
    steps_done the number of completed steps.
    """
    n = u.shape[0]
    inv_r = 1.0 / r
    inv_r2 = inv_r * inv_r
    k1 = np.empty((n, 3))
    k2 = np.empty((n, 3))
    k3 = np.empty((n, 3))
    k4 = np.empty((n, 3))
    tmp = np.empty((n, 3))
    unew = np.empty((n, 3))
    max_disp = 0.0
    for s in range(nsteps):
        _rhs_into(u, d, a, b, inv_r2, inv_r, k1)
        h = 0.5 * dt
        for i in range(n):
            tmp[i, 0] = u[i, 0] + h * k1[i, 0]
            tmp[i, 1] = u[i, 1] + h * k1[i, 1]
            tmp[i, 2] = u[i, 2] + h * k1[i, 2]
        _rhs_into(tmp, d, a, b, inv_r2, inv_r, k2)
        for i in range(n):
            tmp[i, 0] = u[i, 0] + h * k2[i, 0]
            tmp[i, 1] = u[i, 1] + h * k2[i, 1]
            tmp[i, 2] = u[i, 2] + h * k2[i, 2]
        _rhs_into(tmp, d, a, b, inv_r2, inv_r, k3)
        for i in range(n):
            tmp[i, 0] = u[i, 0] + dt * k3[i, 0]
            tmp[i, 1] = u[i, 1] + dt * k3[i, 1]
            tmp[i, 2] = u[i, 2] + dt * k3[i, 2]
        _rhs_into(tmp, d, a, b, inv_r2, inv_r, k4)
        w = dt / 6.0
        bad = False
        for i in range(n):
            v0 = u[i, 0] + w * (k1[i, 0] + 2.0 * (k2[i, 0] + k3[i, 0]) + k4[i, 0])
            v1 = u[i, 1] + w * (k1[i, 1] + 2.0 * (k2[i, 1] + k3[i, 1]) + k4[i, 1])
            v2 = u[i, 2] + w * (k1[i, 2] + 2.0 * (k2[i, 2] + k3[i, 2]) + k4[i, 2])
            if not (np.isfinite(v0) and np.isfinite(v1) and np.isfinite(v2)):
                bad = True
                break
            unew[i, 0] = v0
            unew[i, 1] = v1
            unew[i, 2] = v2
        if bad:
            return NONFINITE, s, max_disp
        if renorm:
            for i in range(n):
                v0 = unew[i, 0]
                v1 = unew[i, 1]
                v2 = unew[i, 2]
                nrm = np.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
                c = r / nrm - 1.0
                disp = np.abs(c) * nrm
                if disp > max_disp:
                    max_disp = disp
                u[i, 0] = v0 + c * v0
                u[i, 1] = v1 + c * v1
                u[i, 2] = v2 + c * v2
        else:
            for i in range(n):
                u[i, 0] = unew[i, 0]
                u[i, 1] = unew[i, 1]
                u[i, 2] = unew[i, 2]
    return OK, nsteps, max_disp
