# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernel for the lattice chain; see _pytoda for the
reference semantics."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, isfinite

from .errors import OverflowAbortError

cnp.import_array()

DEF DIFF_LIMIT = 500.0


cdef int _accel(double[::1] u, double ell, double[::1] out,
                double* worst, Py_ssize_t* site) nogil:
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t k, nxt
    cdef double du, e_here, e_prev, inv2 = 1.0 / (ell * ell)
    worst[0] = 0.0
    site[0] = 0
    for k in range(m):
        nxt = k + 1 if k + 1 < m else 0
        du = u[k] - u[nxt]
        if fabs(du) > worst[0]:
            worst[0] = fabs(du)
            site[0] = k
        if fabs(du) > DIFF_LIMIT:
            return -1
    e_prev = exp(u[m - 1] - u[0])
    for k in range(m):
        nxt = k + 1 if k + 1 < m else 0
        e_here = exp(u[k] - u[nxt])
        out[k] = -(e_here - e_prev) * inv2
        e_prev = e_here
    return 0


cdef double _energy(double[::1] u, double[::1] v, double ell) nogil:
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t k, nxt
    cdef double h = 0.0, inv2 = 1.0 / (ell * ell)
    for k in range(m):
        nxt = k + 1 if k + 1 < m else 0
        h += 0.5 * v[k] * v[k] + exp(u[k] - u[nxt]) * inv2
    return h


def rk4_run(object u0, object v0, double ell, double dt, long n_steps, long stride):
    """Drop-in twin of the reference kernel's rk4_run."""
    cdef cnp.ndarray[double, ndim=1] u = np.array(u0, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] v = np.array(v0, dtype=np.float64)
    cdef Py_ssize_t m = u.shape[0]
    cdef long n_samp = n_steps // stride + 1
    cdef cnp.ndarray[double, ndim=2] us = np.empty((n_samp, m))
    cdef cnp.ndarray[double, ndim=2] vs = np.empty((n_samp, m))
    cdef cnp.ndarray[double, ndim=1] hs = np.empty(n_samp)
    cdef cnp.ndarray[double, ndim=1] ps = np.empty(n_samp)
    cdef cnp.ndarray[double, ndim=1] ts = np.empty(n_samp)
    cdef cnp.ndarray[double, ndim=1] a1 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] a2 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] a3 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] a4 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] u2 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] v2 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] u3 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] v3 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] u4 = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] v4 = np.empty(m)
    cdef double[::1] uv = u, vv = v
    cdef double[::1] a1v = a1, a2v = a2, a3v = a3, a4v = a4
    cdef double[::1] u2v = u2, v2v = v2, u3v = u3, v3v = v3, u4v = u4, v4v = v4
    cdef double worst = 0.0, p, h6 = dt / 6.0
    cdef Py_ssize_t site = 0, k
    cdef long step, isamp = 1
    cdef int bad = 0
    cdef double t

    us[0, :] = u
    vs[0, :] = v
    hs[0] = _energy(uv, vv, ell)
    p = 0.0
    for k in range(m):
        p += vv[k]
    ps[0] = p
    ts[0] = 0.0

    for step in range(1, n_steps + 1):
        t = (step - 1) * dt
        with nogil:
            bad = _accel(uv, ell, a1v, &worst, &site)
            if bad == 0:
                for k in range(m):
                    u2v[k] = uv[k] + 0.5 * dt * vv[k]
                    v2v[k] = vv[k] + 0.5 * dt * a1v[k]
                bad = _accel(u2v, ell, a2v, &worst, &site)
            if bad == 0:
                for k in range(m):
                    u3v[k] = uv[k] + 0.5 * dt * v2v[k]
                    v3v[k] = vv[k] + 0.5 * dt * a2v[k]
                bad = _accel(u3v, ell, a3v, &worst, &site)
            if bad == 0:
                for k in range(m):
                    u4v[k] = uv[k] + dt * v3v[k]
                    v4v[k] = vv[k] + dt * a3v[k]
                bad = _accel(u4v, ell, a4v, &worst, &site)
            if bad == 0:
                for k in range(m):
                    uv[k] = uv[k] + h6 * (vv[k] + 2.0 * v2v[k] + 2.0 * v3v[k] + v4v[k])
                    vv[k] = vv[k] + h6 * (a1v[k] + 2.0 * a2v[k] + 2.0 * a3v[k] + a4v[k])
        if bad != 0:
            raise OverflowAbortError(
                f"site difference |u_{site} - u_{site + 1}| = {worst:.3e} "
                f"exceeds {DIFF_LIMIT:g} at t = {t:.6g}")
        if step % stride == 0:
            for k in range(m):
                if not (isfinite(uv[k]) and isfinite(vv[k])):
                    raise OverflowAbortError(f"non-finite state at t = {step * dt:.6g}")
            us[isamp, :] = u
            vs[isamp, :] = v
            hs[isamp] = _energy(uv, vv, ell)
            p = 0.0
            for k in range(m):
                p += vv[k]
            ps[isamp] = p
            ts[isamp] = step * dt
            isamp += 1
    return ts, us, vs, hs, ps
