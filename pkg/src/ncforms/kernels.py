"""Backend selection for the chain-integration kernel.

The compiled extension is optional; the pure-python twin is always present.
Set NCFORMS_FORCE_PY=1 to ignore the extension (useful for parity tests and
benchmarks).
"""

import os

from . import _pytoda

if os.environ.get("NCFORMS_FORCE_PY"):
    _ctoda = None
else:
    try:
        from . import _ctoda
    except ImportError:
        _ctoda = None

HAVE_COMPILED = _ctoda is not None


def backend_name():
    return "compiled" if HAVE_COMPILED else "python"


def rk4_run(u, v, ell, dt, n_steps, stride=1, force_python=False):
    impl = _pytoda if (force_python or not HAVE_COMPILED) else _ctoda
    return impl.rk4_run(u, v, ell, dt, n_steps, stride)
