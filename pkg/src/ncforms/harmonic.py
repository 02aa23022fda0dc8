"""Generalized harmonic maps on two-dimensional calculi.

The model: a pointwise invertible matrix of functions ``a`` defines the
gauge current A = a^{-1} da, which is flat by construction (F = dA + AA = 0)
and solves the model when d(star A) = 0.  Around a solution, a ladder of
conserved currents is produced by alternately applying the covariant
derivative D = d + A and inverting d on closed forms.

All forms here are matrices of ``calculus.Form``; entries share the grade
and the calculus.  Matrix multiplication composes the bimodule wedge with
the usual row/column sums.
"""

import numpy as np

from . import coeff as cf
from .calculus import Form, d, star, star_inv, wedge
from .errors import (
    CoefficientKindError,
    GradeError,
    NewtonDivergenceError,
    ObstructionError,
    SingularityError,
    WindowMismatchError,
)


class MatrixForm:
    """N x N matrix with Form entries of equal grade and calculus."""

    __slots__ = ("N", "entries", "calculus", "grade")

    def __init__(self, entries):
        entries = [list(row) for row in entries]
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise GradeError("matrix of forms must be square")
        first = entries[0][0]
        for row in entries:
            for e in row:
                if e.grade != first.grade:
                    raise GradeError("matrix entries must share one grade")
                if e.calculus.key() != first.calculus.key():
                    raise GradeError("matrix entries must share one calculus")
        self.N = n
        self.entries = entries
        self.calculus = first.calculus
        self.grade = first.grade

    @classmethod
    def from_scalar(cls, form):
        return cls([[form]])

    @classmethod
    def zero(cls, calculus, n, grade=0):
        return cls([[Form.zero(calculus, grade) for _ in range(n)] for _ in range(n)])

    def map(self, fn):
        return MatrixForm([[fn(e) for e in row] for row in self.entries])

    def __add__(self, other):
        return MatrixForm([[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return MatrixForm([[a - b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self):
        return self.map(lambda e: -e)

    def scale(self, s):
        return self.map(lambda e: e.scale(s))

    def __matmul__(self, other):
        if self.N != other.N:
            raise GradeError("matrix sizes differ")
        grade = self.grade + other.grade
        out = []
        for i in range(self.N):
            row = []
            for j in range(other.N):
                acc = Form.zero(self.calculus, min(grade, self.calculus.n))
                for k in range(self.N):
                    acc = acc + wedge(self.entries[i][k], other.entries[k][j])
                row.append(acc)
            out.append(row)
        return MatrixForm(out)

    def d(self):
        return self.map(d)

    def star(self):
        return self.map(star)

    def star_inv(self):
        return self.map(star_inv)

    def norm(self):
        return max(e.norm() for row in self.entries for e in row)

    def __repr__(self):
        return f"MatrixForm(N={self.N}, grade={self.grade})"


def _as_matrix(a):
    return a if isinstance(a, MatrixForm) else MatrixForm.from_scalar(a)


# ---------------------------------------------------------------------------
# Gauge current, flatness, field equation
# ---------------------------------------------------------------------------

def gauge_current(a, with_info=False):
    """A = a^{-1} . da for a pointwise invertible grade-0 matrix.

    The inverse is the pointwise matrix inverse (the antipode specialized to
    invertible matrices of functions); the worst condition number across
    sites is reported with ``with_info=True``.
    """
    a = _as_matrix(a)
    if a.grade != 0:
        raise GradeError("gauge current needs a grade-0 matrix")
    ainv, cond = _pointwise_inverse(a)
    A = ainv @ a.d()
    if with_info:
        return A, {"condition_number": cond}
    return A


def _pointwise_inverse(a):
    grids = [e.coefficient(()) for row in a.entries for e in row]
    present = [g for g in grids if g is not None]
    if not present:
        raise SingularityError("cannot invert the zero matrix")
    if any(isinstance(g, cf.ExpSum) for g in present):
        if a.N != 1:
            raise CoefficientKindError(
                "pointwise inverse of symbolic matrices is only available for N=1")
        return MatrixForm.from_scalar(Form.function(a.calculus, present[0].inverse())), None
    win = present[0]
    for g in present[1:]:
        vals, _, origin = cf._align(win, g)
        win = cf.GridFunction(vals, origin, win.boundary)
    mats = np.zeros(win.shape + (a.N, a.N), dtype=complex)
    for k, c in enumerate(grids):
        if c is not None:
            av, _, _ = cf._align(c, win)
            mats[..., k // a.N, k % a.N] = av
    dets = np.linalg.det(mats)
    scale = max(float(np.abs(mats).max()), 1e-300)
    if np.abs(dets).min() <= 1e-13 * scale ** a.N:
        idx = np.unravel_index(int(np.abs(dets).argmin()), dets.shape)
        site = tuple(o + i for o, i in zip(win.origin, idx))
        raise SingularityError(f"matrix not invertible near site {site}")
    cond = float(np.linalg.cond(mats).max())
    inv = np.linalg.inv(mats)
    if not np.iscomplexobj(np.zeros(0, dtype=np.result_type(*[g.values for g in present]))):
        inv = inv.real
    out = []
    for i in range(a.N):
        row = []
        for j in range(a.N):
            vals = np.ascontiguousarray(inv[..., i, j])
            row.append(Form.function(a.calculus, win._like(vals)))
        out.append(row)
    return MatrixForm(out), cond


def curvature(A):
    """F = dA + A.A; vanishes identically for gauge currents."""
    A = _as_matrix(A)
    if A.grade != 1:
        raise GradeError("curvature needs a grade-1 matrix")
    return A.d() + (A @ A)


def field_residual(A):
    """d(star A); the matrix of 2-forms whose vanishing defines the model."""
    A = _as_matrix(A)
    if A.grade != 1:
        raise GradeError("field residual needs a grade-1 matrix")
    return A.star().d()


# ---------------------------------------------------------------------------
# Slice-by-slice solver for the N=1 lattice model
# ---------------------------------------------------------------------------

def solve_field_equation(u0, u1, steps, newton_tol=1e-12, newton_max=50):
    """March the scalar lattice model a = e^{-u} forward in time.

    Two initial slices (periodic in x) determine the evolution: the top-slice
    value v at each site solves  e^{u_t - v} = C(x)  with
    C = e^{u_{t-1} - u_t} + e^{u_t - u_{t+x}} - e^{u_{t-x} - u_t},
    which is independent of the spacings.  The update is the explicit
    logarithm wherever C > 0 (then polished by Newton); C <= 0 means the
    slice equation has no real solution and aborts with the site.

    Returns (history, info): history is a GridFunction on an open time axis
    and periodic space axis; info carries per-slice residuals and Newton
    iteration counts.
    """
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if u0.shape != u1.shape or u0.ndim != 1:
        raise WindowMismatchError("initial slices must be 1-d arrays of equal length")
    m = u0.size
    hist = np.zeros((steps + 2, m))
    hist[0], hist[1] = u0, u1
    slice_residuals, iters = [], []
    for t in range(1, steps + 1):
        prev, cur = hist[t - 1], hist[t]
        c = (np.exp(prev - cur) + np.exp(cur - np.roll(cur, -1))
             - np.exp(np.roll(cur, 1) - cur))
        if (c <= 0).any():
            k = int(np.argmin(c))
            raise NewtonDivergenceError(
                f"slice {t + 1}: no real update at site {k} (C = {c[k]:.3e})")
        v = cur - np.log(c)
        it = 0
        for it in range(1, newton_max + 1):
            phi = np.exp(cur - v) - c
            v = v + phi / np.exp(cur - v)
            if np.abs(phi).max() <= newton_tol * max(1.0, float(np.abs(c).max())):
                break
        hist[t + 1] = v
        slice_residuals.append(float(np.abs(np.exp(cur - v) - c).max()))
        iters.append(it)
    grid = cf.GridFunction(hist, origin=(0, 0), boundary=("open", "periodic"))
    info = {"slice_residuals": slice_residuals, "newton_iterations": iters}
    return grid, info


# ---------------------------------------------------------------------------
# Discrete integration of closed 1-forms
# ---------------------------------------------------------------------------

def integrate_closed(omega, period_tol=1e-9, subtract_periods=False,
                     closure_tol=None, full_output=False):
    """Reconstruct chi with d(chi) = omega for a closed 1-form.

    The path runs first along t from the base site (the window origin),
    then along x within each slice; chi(base) = 0.  Closedness makes the
    result path-independent up to the reported residual.

    On the periodic x axis the loop sums of omega are cohomological
    obstructions: if any exceeds ``period_tol`` relative to the scale of
    omega they are raised as ObstructionError, unless ``subtract_periods``
    is set, in which case the per-slice mean (the harmonic part) is removed
    and recorded in the report.  ``closure_tol`` bounds the acceptable
    closure defect |d omega| / scale (defaults to ``period_tol``).
    """
    calc = omega.calculus
    if omega.grade != 1 or calc.n != 2:
        raise GradeError("closed-form integration is for 1-forms on 2 axes")
    scale = max(omega.norm(), 1e-300)
    domega = d(omega)
    closure = domega.norm() / scale
    if closure > (period_tol if closure_tol is None else closure_tol):
        raise ObstructionError(f"input is not closed: |d omega| = {closure:.3e} x scale")
    rho_t, rho_x = omega.coefficient((0,)), omega.coefficient((1,))
    if rho_t is None and rho_x is None:
        raise WindowMismatchError("cannot integrate a form with no components")
    if rho_t is None:
        rho_t = rho_x._like(np.zeros_like(rho_x.values))
    if rho_x is None:
        rho_x = rho_t._like(np.zeros_like(rho_t.values))
    if not isinstance(rho_t, cf.GridFunction) or not isinstance(rho_x, cf.GridFunction):
        raise CoefficientKindError("path integration needs grid coefficients")
    if rho_t.boundary != ("open", "periodic") or rho_x.boundary != ("open", "periodic"):
        raise WindowMismatchError("need an open time axis and a periodic space axis")
    lt, lx = calc.spacings
    m = rho_x.shape[1]

    t_lo = max(rho_t.origin[0], rho_x.origin[0])
    n_t = int(min(rho_t.window[0][1] + 1, rho_x.window[0][1]) - t_lo)
    rt = rho_t.values[t_lo - rho_t.origin[0]:, :]
    rx = rho_x.values[t_lo - rho_x.origin[0]:t_lo - rho_x.origin[0] + n_t, :]

    periods = lx * rx.sum(axis=1)
    period_rel = float(np.abs(periods).max()) / max(scale * m * lx, 1e-300)
    if period_rel > period_tol:
        if not subtract_periods:
            raise ObstructionError(
                "nonzero periods obstruct integration",
                periods=[complex(p) for p in periods])
        rx = rx - (periods / (m * lx))[:, None]
    chi = np.zeros((n_t, m), dtype=np.result_type(rt, rx))
    chi[1:, 0] = lt * np.cumsum(rt[:n_t - 1, 0])
    chi[:, 1:] = chi[:, :1] + lx * np.cumsum(rx[:, :-1], axis=1)
    chi_grid = cf.GridFunction(chi, origin=(t_lo, 0), boundary=("open", "periodic"))
    chi_form = Form.function(calc, chi_grid)
    recon = d(chi_form) - Form(calc, 1, {(0,): rho_t, (1,): cf.GridFunction(
        rx, origin=(t_lo, 0), boundary=("open", "periodic"))})
    report = {
        "closure_residual_rel": closure,
        "periods": [float(abs(p)) for p in periods],
        "period_rel": period_rel,
        "periods_subtracted": bool(period_rel > period_tol),
        "reconstruction_residual_rel": recon.norm() / scale,
        "base_site": (int(t_lo), 0),
    }
    if full_output:
        return chi_form, report
    return chi_form


# ---------------------------------------------------------------------------
# Conserved currents
# ---------------------------------------------------------------------------

def charges(J):
    """Time series Q(t) = sum_x (star J)_{dx-component}(t, x).

    Conservation telescopes the dx row of d(star J) = 0 over the periodic
    axis, so Q is constant in t up to the field-equation residual.
    Returns {"t": slice labels, "Q": (T, N, N) array, "mass": scale}.
    """
    J = _as_matrix(J)
    if J.grade != 1 or J.calculus.n != 2:
        raise GradeError("charges need matrix 1-forms on 2 axes")
    sJ = J.star()
    comps = []
    t_lo, t_hi = None, None
    for row in sJ.entries:
        for e in row:
            c = e.coefficient((1,))
            if c is None:
                comps.append(None)
                continue
            if not isinstance(c, cf.GridFunction):
                raise CoefficientKindError("charges need grid coefficients")
            if c.boundary[1] != "periodic":
                raise WindowMismatchError("charge is not defined on an open spatial axis")
            lo, hi = c.window[0]
            t_lo = lo if t_lo is None else max(t_lo, lo)
            t_hi = hi if t_hi is None else min(t_hi, hi)
            comps.append(c)
    if t_lo is None or t_hi <= t_lo:
        raise WindowMismatchError("no common time window for the charge series")
    n = sJ.N
    q = np.zeros((t_hi - t_lo, n, n), dtype=complex)
    mass = 0.0
    k = 0
    for i in range(n):
        for j in range(n):
            c = comps[k]
            k += 1
            if c is None:
                continue
            block = c.values[t_lo - c.origin[0]:t_hi - c.origin[0], :]
            q[:, i, j] = block.sum(axis=1)
            mass = max(mass, float(np.abs(block).sum(axis=1).max()))
    return {"t": list(range(t_lo, t_hi)), "Q": q, "mass": mass}


def charge_drift(series):
    """Max |Q(t) - Q(0)| relative to max(|Q(0)|, mass).

    The mass floor matters because towers built from symmetric data have
    charges that vanish identically; drift against zero is meaningless.
    """
    q = series["Q"]
    dq = np.abs(q - q[0]).max()
    return float(dq / max(float(np.abs(q[0]).max()), series["mass"], 1e-300))


class TowerReport:
    """Per-level conservation data for a current ladder."""

    __slots__ = ("depth", "levels", "identity_residual", "epsilon1", "correlations")

    def __init__(self, depth, levels, identity_residual, epsilon1, correlations):
        self.depth = depth
        self.levels = levels
        self.identity_residual = identity_residual
        self.epsilon1 = epsilon1
        self.correlations = correlations

    def to_dict(self):
        return {
            "depth": self.depth,
            "levels": self.levels,
            "identity_residual": self.identity_residual,
            "epsilon1": self.epsilon1,
            "charge_correlations": self.correlations,
        }


def conserved_tower(a, depth, period_tol=1e-9, subtract_periods=True,
                    closure_tol=1e-8, rng=None):
    """Build currents J(1) = A, J(k+1) = D chi(k), with star(d chi(k)) = J(k).

    ``a`` must solve the field equation to tolerance; every level reports
    its conservation residual, obstruction periods (subtracted and recorded
    when ``subtract_periods``), and the charge series.  The report also
    carries a direct randomized check of the swap identity between d-star
    and the covariant derivative that makes the recursion conserve.
    """
    a = _as_matrix(a)
    A = gauge_current(a)
    eps = _measured_eps1(a.calculus)
    levels = []
    all_q = []
    J = A
    for k in range(1, depth + 1):
        scale = max(J.norm(), 1e-300)
        res = field_residual(J).norm()
        series = charges(J)
        drift = charge_drift(series)
        level = {
            "level": k,
            "scale": scale,
            "residual_abs": res,
            "residual_rel": res / scale,
            "charge_drift_rel": drift,
            "charge_mass": series["mass"],
            "charges_t": series["t"],
            "charges": [float(np.trace(qt).real) for qt in series["Q"]],
        }
        all_q.append(np.asarray(level["charges"]))
        if k < depth:
            chi_entries, prep = [], []
            for row in J.entries:
                out_row = []
                for e in row:
                    chi_e, rep = integrate_closed(star_inv(e), period_tol=period_tol,
                                                  subtract_periods=subtract_periods,
                                                  closure_tol=closure_tol,
                                                  full_output=True)
                    out_row.append(chi_e)
                    prep.append(rep)
                chi_entries.append(out_row)
            chi = MatrixForm(chi_entries)
            level["period_rel"] = max(r["period_rel"] for r in prep)
            level["periods_subtracted"] = any(r["periods_subtracted"] for r in prep)
            level["reconstruction_residual_rel"] = max(
                r["reconstruction_residual_rel"] for r in prep)
            J = chi.d() + (A @ chi)
        levels.append(level)
    ident = _swap_identity_residual(A, rng=rng)
    corr = _charge_correlations(all_q)
    return TowerReport(depth, levels, ident, eps, corr)


def _measured_eps1(calc):
    fac1, mid = calc.star_basis((0,))
    fac2, back = calc.star_basis(mid)
    return fac1 * fac2 if back == (0,) else None


def _swap_identity_residual(A, rng=None, draws=3):
    """Check d star(D chi) = D star(d chi) on random grade-0 matrices."""
    rng = np.random.default_rng(rng)
    window = None
    for row in A.entries:
        for e in row:
            for c in e.components.values():
                window = c
                break
    if window is None:
        return 0.0
    worst = 0.0
    for _ in range(draws):
        entries = []
        for i in range(A.N):
            row = []
            for j in range(A.N):
                vals = rng.standard_normal(window.shape)
                row.append(Form.function(A.calculus, window._like(vals)))
            entries.append(row)
        chi = MatrixForm(entries)
        dchi = chi.d()
        lhs = (dchi + (A @ chi)).star().d()
        rhs = dchi.star().d() + (A @ dchi.star())
        den = max(lhs.norm(), rhs.norm(), 1e-300)
        worst = max(worst, (lhs - rhs).norm() / den)
    return worst


def _charge_correlations(all_q):
    """Pairwise correlation of charge series; diagnostic only (no
    independence claim).  Near-constant series correlate with noise, so
    they are reported as None."""
    k = len(all_q)
    out = {}
    for i in range(k):
        for j in range(i + 1, k):
            n = min(all_q[i].size, all_q[j].size)
            qi, qj = all_q[i][:n], all_q[j][:n]
            si, sj = qi.std(), qj.std()
            floor = 1e-12 * max(np.abs(qi).max(), np.abs(qj).max(), 1e-300)
            if si <= floor or sj <= floor:
                out[f"{i + 1},{j + 1}"] = None
            else:
                out[f"{i + 1},{j + 1}"] = float(np.corrcoef(qi, qj)[0, 1])
    return out
