"""Compiled integrator core against the pure-Python reference."""

import numpy as np

from ncforms import kernels
from ncforms._pytoda import rk4_run as py_rk4_run


def test_compiled_backend_present():
    assert kernels.HAVE_COMPILED
    assert kernels.backend_name() == "compiled"


def test_parity_with_reference(rng):
    u = rng.standard_normal(12)
    v = rng.standard_normal(12)
    args = (0.75, 5e-3, 400, 40)
    tc, uc, vc, hc, pc = kernels.rk4_run(u, v, *args)
    tp, up, vp, hp, pp = py_rk4_run(u, v, *args)
    assert np.array_equal(tc, tp)
    for a, b in ((uc, up), (vc, vp), (hc, hp), (pc, pp)):
        assert np.abs(np.asarray(a) - np.asarray(b)).max() <= 1e-13


def test_force_python_flag(rng):
    u = rng.standard_normal(6)
    v = rng.standard_normal(6)
    tc, uc, *_ = kernels.rk4_run(u, v, 1.0, 1e-2, 50, 10)
    tp, up, *_ = kernels.rk4_run(u, v, 1.0, 1e-2, 50, 10, force_python=True)
    assert np.array_equal(tc, tp)
    assert np.abs(uc - up).max() <= 1e-13


def test_sampling_includes_initial_state(rng):
    u = rng.standard_normal(6)
    v = rng.standard_normal(6)
    ts, us, vs, hs, ps = kernels.rk4_run(u, v, 1.0, 1e-2, 30, 10)
    assert ts[0] == 0.0
    assert np.array_equal(us[0], u)
    assert ts.size == us.shape[0] == hs.size == ps.size == 4
