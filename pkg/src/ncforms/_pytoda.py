"""Pure-python reference kernel for the lattice chain integrator.

Mirrors the compiled extension step for step; the selector in ``kernels``
picks whichever is available.  Operation order matches the compiled kernel
so the two backends agree to roundoff.
"""

import numpy as np

from .errors import OverflowAbortError

# Exponent differences beyond this overflow double precision long before
# they stop being numerically meaningful.
DIFF_LIMIT = 500.0


def _accel(u, ell, t):
    du = u - np.roll(u, -1)
    worst = float(np.abs(du).max())
    if worst > DIFF_LIMIT:
        k = int(np.abs(du).argmax())
        raise OverflowAbortError(
            f"site difference |u_{k} - u_{k + 1}| = {worst:.3e} exceeds "
            f"{DIFF_LIMIT:g} at t = {t:.6g}")
    e = np.exp(du)
    return -(e - np.roll(e, 1)) / (ell * ell)


def energy(u, v, ell):
    return float(0.5 * (v * v).sum() + np.exp(u - np.roll(u, -1)).sum() / (ell * ell))


def momentum(v):
    return float(v.sum())


def rk4_run(u, v, ell, dt, n_steps, stride):
    """Classic fixed-step RK4 for (u', v') = (v, accel(u)).

    Samples every ``stride`` steps (including the initial state); returns
    (t, us, vs, H, P) arrays.
    """
    u = np.array(u, dtype=float)
    v = np.array(v, dtype=float)
    n_samp = n_steps // stride + 1
    m = u.size
    us = np.empty((n_samp, m))
    vs = np.empty((n_samp, m))
    hs = np.empty(n_samp)
    ps = np.empty(n_samp)
    ts = np.empty(n_samp)
    us[0], vs[0], hs[0], ps[0], ts[0] = u, v, energy(u, v, ell), momentum(v), 0.0
    k = 1
    for step in range(1, n_steps + 1):
        t = (step - 1) * dt
        a1 = _accel(u, ell, t)
        u2 = u + 0.5 * dt * v
        v2 = v + 0.5 * dt * a1
        a2 = _accel(u2, ell, t)
        u3 = u + 0.5 * dt * v2
        v3 = v + 0.5 * dt * a2
        a3 = _accel(u3, ell, t)
        u4 = u + dt * v3
        v4 = v + dt * a3
        a4 = _accel(u4, ell, t)
        u = u + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if step % stride == 0:
            if not (np.isfinite(u).all() and np.isfinite(v).all()):
                raise OverflowAbortError(f"non-finite state at t = {step * dt:.6g}")
            us[k], vs[k] = u, v
            hs[k], ps[k] = energy(u, v, ell), momentum(v)
            ts[k] = step * dt
            k += 1
    return ts, us, vs, hs, ps
