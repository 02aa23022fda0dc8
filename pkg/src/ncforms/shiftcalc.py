"""Two-parameter deformed calculus with imaginary-shift operators.

The commutation relations couple both differentials to both coordinates:

    [dt, t] = b dt      [dt, x] = b dx
    [dx, t] = b dx      [dx, x] = -(a^2/b) dt

Moving a function through a differential therefore mixes dt and dx and
involves the operators C_x f = (f(x+ia) + f(x-ia))/2 and
S_x f = (f(x+ia) - f(x-ia))/(2i) together with a t-shift by +-b.  These
are exact on exponential sums (and on affine functions of (t, x), which is
enough for the complex-coordinate check), so the whole module works in
closed form.

The Hodge operator is a one-parameter family: star dt = sigma dt +
(b/a) kappa dx, star dx = (a/b) kappa dt - sigma dx with sigma = sin(theta),
kappa = cos(theta), applied to right coefficients; kappa^2 + sigma^2 = 1
makes it an involution on 1-forms.
"""

import numpy as np

from .coeff import ExpSum
from .calculus import Form
from .errors import CalculusMismatchError, ConfigError, GradeError, SingularityError

_DT, _DX = (0,), (1,)


class ShiftCalculusSpec:
    """Deformation parameters (a, b) plus the Hodge angle theta."""

    __slots__ = ("a", "b", "theta")
    n = 2
    slots = ("t", "x")
    kinds = ("shift", "shift")
    name = "shift"

    def __init__(self, a, b, theta=0.0):
        if a == 0 or b == 0:
            raise ConfigError("shift calculus needs a != 0 and b != 0")
        self.a = float(a)
        self.b = float(b)
        self.theta = float(theta)

    @property
    def sigma(self):
        return np.sin(self.theta)

    @property
    def kappa(self):
        return np.cos(self.theta)

    def key(self):
        return ("shift", self.a, self.b, self.theta)

    # The word-local lattice machinery does not apply here; trap any
    # accidental use of the generic d/wedge/star free functions.
    def _reject(self, *_, **__):
        raise CalculusMismatchError(
            "this calculus mixes differentials; use the shift-calculus ops")

    dhat = shift_coeff = shift_word = star_basis = star_basis_inv = _reject


class RightForm(Form):
    """Marker subclass: components are right coefficients (dt.alpha etc.)."""


class Affine(object):
    """c0 + ct*t + cx*x; closed under the shifts used by C_x and S_x."""

    __slots__ = ("c0", "ct", "cx")

    def __init__(self, c0=0.0, ct=0.0, cx=0.0):
        self.c0, self.ct, self.cx = complex(c0), complex(ct), complex(cx)

    def shift(self, axis, amount):
        if axis == "t":
            return Affine(self.c0 + self.ct * amount, self.ct, self.cx)
        return Affine(self.c0 + self.cx * amount, self.ct, self.cx)

    def _coerce(self, other):
        if isinstance(other, Affine):
            return other
        if isinstance(other, (int, float, complex)):
            return Affine(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Affine(self.c0 + o.c0, self.ct + o.ct, self.cx + o.cx)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Affine(self.c0 - o.c0, self.ct - o.ct, self.cx - o.cx)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Affine(-self.c0, -self.ct, -self.cx)

    def __mul__(self, s):
        if isinstance(s, (int, float, complex)):
            return Affine(self.c0 * s, self.ct * s, self.cx * s)
        if isinstance(s, Affine):
            # products are only needed with a constant on one side
            if self.ct == self.cx == 0:
                return s * self.c0
            if s.ct == s.cx == 0:
                return self * s.c0
        return NotImplemented

    __rmul__ = __mul__

    def norm(self):
        return abs(self.c0) + abs(self.ct) + abs(self.cx)

    def is_zero(self, tol=1e-14):
        return self.norm() <= tol

    def __repr__(self):
        return f"Affine({self.c0}, {self.ct}, {self.cx})"


def _lift(f):
    if isinstance(f, (int, float, complex)):
        return ExpSum.constant(f)
    return f


def cx(spec, f):
    """Average of the two imaginary x-shifts; cos(lambda a) on e^{lambda x}."""
    f = _lift(f)
    return (f.shift("x", 1j * spec.a) + f.shift("x", -1j * spec.a)) * 0.5


def sx(spec, f):
    f = _lift(f)
    return (f.shift("x", 1j * spec.a) - f.shift("x", -1j * spec.a)) * (-0.5j)


def _tplus(spec, f):
    return _lift(f).shift("t", spec.b)


def _tminus(spec, f):
    return _lift(f).shift("t", -spec.b)



def _comp(w, word):
    c = w.coefficient(word)
    return ExpSum.zero() if c is None else c

def d_ab(spec, w):
    """Exterior derivative.  Functions give 1-forms; left 1-forms give the
    single dt dx component; 2-forms give zero."""
    if not isinstance(w, Form):
        f = _lift(w)
        fp = _tplus(spec, f)
        return Form(spec, 1, {_DT: (cx(spec, fp) - f) * (1.0 / spec.b),
                              _DX: sx(spec, fp) * (1.0 / spec.a)})
    if isinstance(w, RightForm):
        w = to_left(spec, w)
    if w.grade == 0:
        return d_ab(spec, w.coefficient(()))
    if w.grade == 1:
        p, q = _comp(w, _DT), _comp(w, _DX)
        c = (cx(spec, _tplus(spec, q)) - q) * (1.0 / spec.b) \
            - sx(spec, _tplus(spec, p)) * (1.0 / spec.a)
        return Form(spec, 2, {(0, 1): c})
    return Form.zero(spec, 2)


def bimodule_move(spec, side, basis, f):
    """Normal-ordering of a single basis-function product.

    side is where the function sits in the input: 'right' rewrites
    dt.f / dx.f into left form, 'left' rewrites f.dt / f.dx into right form.
    """
    f = _lift(f)
    ratio = spec.b / spec.a
    if side == "right":
        fp = _tplus(spec, f)
        if basis == "dt":
            return Form(spec, 1, {_DT: cx(spec, fp), _DX: sx(spec, fp) * ratio})
        if basis == "dx":
            return Form(spec, 1, {_DT: sx(spec, fp) * (-1.0 / ratio),
                                  _DX: cx(spec, fp)})
    elif side == "left":
        fm = _tminus(spec, f)
        if basis == "dt":
            return RightForm(spec, 1, {_DT: cx(spec, fm),
                                       _DX: sx(spec, fm) * (-ratio)})
        if basis == "dx":
            return RightForm(spec, 1, {_DT: sx(spec, fm) * (1.0 / ratio),
                                       _DX: cx(spec, fm)})
    raise GradeError(f"unknown move {side!r} {basis!r}")


def to_left(spec, w):
    """Right 1-form dt.alpha + dx.beta -> left normal form."""
    a, b = _comp(w, _DT), _comp(w, _DX)
    return bimodule_move(spec, "right", "dt", a) + bimodule_move(spec, "right", "dx", b)


def to_right(spec, w):
    """Left 1-form p dt + q dx -> right normal form."""
    p, q = _comp(w, _DT), _comp(w, _DX)
    mp = bimodule_move(spec, "left", "dt", p)
    mq = bimodule_move(spec, "left", "dx", q)
    return RightForm(spec, 1, {_DT: _comp(mp, _DT) + _comp(mq, _DT),
                               _DX: _comp(mp, _DX) + _comp(mq, _DX)})


def mul_left(spec, f, w):
    """f . w for a left-normal form w: plain coefficient multiplication."""
    f = _lift(f)
    return w.map_coefficients(lambda c: f * c)


def mul_right(spec, w, f):
    """w . f for a left-normal 1-form w, rewritten back to left form."""
    p, q = _comp(w, _DT), _comp(w, _DX)
    mt = bimodule_move(spec, "right", "dt", f)
    mx = bimodule_move(spec, "right", "dx", f)
    return Form(spec, 1, {
        _DT: p * _comp(mt, _DT) + q * _comp(mx, _DT),
        _DX: p * _comp(mt, _DX) + q * _comp(mx, _DX)})


def wedge_ab(spec, w1, w2):
    """Product of two left-normal forms (grades summing to at most 2)."""
    if w1.grade == 0:
        return mul_left(spec, w1.coefficient(()), w2)
    if w2.grade == 0:
        if w1.grade == 1:
            return mul_right(spec, w1, w2.coefficient(()))
        raise GradeError("right multiplication only implemented for 1-forms")
    if w1.grade + w2.grade > 2:
        return Form.zero(spec, 2)
    p, q = _comp(w1, _DT), _comp(w1, _DX)
    r, s = _comp(w2, _DT), _comp(w2, _DX)
    rp, sp = _tplus(spec, r), _tplus(spec, s)
    ratio = spec.b / spec.a
    c = p * cx(spec, sp) - q * cx(spec, rp) \
        - p * sx(spec, rp) * ratio - q * sx(spec, sp) * (1.0 / ratio)
    return Form(spec, 2, {(0, 1): c})


def star_theta(spec, w):
    """Hodge family on 1-forms, acting on right coefficients."""
    if w.grade != 1:
        raise GradeError("the theta-star acts on 1-forms")
    r = w if isinstance(w, RightForm) else to_right(spec, w)
    al, be = _comp(r, _DT), _comp(r, _DX)
    sg, kp = spec.sigma, spec.kappa
    ratio = spec.b / spec.a
    return Form(spec, 1, {_DT: al * sg + be * (kp / ratio),
                          _DX: al * (kp * ratio) - be * sg})


def _cosop(spec, f):
    """cos(a d_x - theta) = kappa C_x + sigma S_x."""
    return cx(spec, f) * spec.kappa + sx(spec, f) * spec.sigma


def field_residual_ab(spec, p, r, full_output=False):
    """Residual of the closed-form field equation on the linear family
    u = p x + r t:

        e^{u_t} cos(a d_x - theta) e^{-u_{t+b}}
          - e^{-u_t} cos(a d_x - theta) e^{u_{t-b}}

    built alongside the machinery objects A = e^{u} d e^{-u}, star A and
    d star A.  On this family the machinery 2-form vanishes for every
    theta (its coefficients are constants), while the displayed equation
    keeps the shifted factors apart and is the nonzero obstruction; both
    are reported.
    """
    g = ExpSum.exponential(1.0, lx=p, mt=r)     # e^{u}
    f = g.inverse()                             # e^{-u}
    A = mul_left(spec, g, d_ab(spec, f))
    sA = star_theta(spec, A)
    dsA = d_ab(spec, sA)
    residual = g * _cosop(spec, _tplus(spec, f)) - f * _cosop(spec, _tminus(spec, g))
    if full_output:
        return residual, {"machinery_residual": dsA.norm(),
                          "A": A, "star_A": sA, "d_star_A": dsA}
    return residual


def derivation_check_A(spec, f, g):
    """Confirm the two displayed normal forms of A = g df and the displayed
    star A against the machinery, for reciprocal exponentials f g = 1."""
    f, g = _lift(f), _lift(g)
    prod = f * g
    if not (prod - ExpSum.one()).is_zero(1e-12):
        raise SingularityError("derivation check needs f g = 1")
    checks = []

    def record(name, residual):
        checks.append({"check": name, "residual": float(residual)})

    A = mul_left(spec, g, d_ab(spec, f))
    # left-coefficient display: (1/b)(g C_x f_+ - 1) dt + (1/a)(g S_x f_+) dx
    fp = _tplus(spec, f)
    left = Form(spec, 1, {
        _DT: (g * cx(spec, fp) - ExpSum.one()) * (1.0 / spec.b),
        _DX: g * sx(spec, fp) * (1.0 / spec.a)})
    record("left_display", (A - left).norm())

    # right-coefficient display: dt (1/b)(f C_x g_- - 1) - dx (1/a)(f S_x g_-)
    gm = _tminus(spec, g)
    right = RightForm(spec, 1, {
        _DT: (f * cx(spec, gm) - ExpSum.one()) * (1.0 / spec.b),
        _DX: f * sx(spec, gm) * (-1.0 / spec.a)})
    record("right_display", (to_right(spec, A) - right).norm())
    record("right_roundtrip", (to_left(spec, right) - A).norm())

    # displayed star A:
    #   -(1/b)[sigma + f(kappa S_x - sigma C_x) g_-] dt
    #   +(1/a)[f(kappa C_x + sigma S_x) g_- - kappa] dx
    sg, kp = spec.sigma, spec.kappa
    shown = Form(spec, 1, {
        _DT: (f * (sx(spec, gm) * kp - cx(spec, gm) * sg)
              + ExpSum.constant(sg)) * (-1.0 / spec.b),
        _DX: (f * (cx(spec, gm) * kp + sx(spec, gm) * sg)
              - ExpSum.constant(kp)) * (1.0 / spec.a)})
    record("star_display", (star_theta(spec, A) - shown).norm())

    # complex coordinate z = t/b + i x/a: [dz, z] = 2 dz and [dz, z-bar] = 0
    z = Affine(0.0, 1.0 / spec.b, 1j / spec.a)
    zbar = Affine(0.0, 1.0 / spec.b, -1j / spec.a)
    dz = d_ab(spec, z)
    for name, y, expect in (("dz_z", z, dz * 2.0), ("dz_zbar", zbar, None)):
        comm = mul_right(spec, dz, y) - mul_left(spec, y, dz)
        target = comm if expect is None else comm - expect
        record(name, target.norm())

    passed = all(c["residual"] <= 1e-12 for c in checks)
    return {"a": spec.a, "b": spec.b, "theta": spec.theta,
            "checks": checks, "pass": passed}


def _random_expsum(rng, nterms=3):
    terms = [(rng.integers(-2, 3) / 2.0 + 1j * rng.integers(-2, 3) / 4.0,
              rng.integers(-2, 3) / 2.0,
              rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
             for _ in range(nterms)]
    return ExpSum(terms)


def shift_suite(spec, samples=60, seed=0, tolerance=1e-12):
    """Operator identities, exterior-algebra axioms and star properties,
    checked exactly on random exponential sums."""
    rng = np.random.default_rng(seed)
    worst = {}

    def record(name, value):
        worst[name] = max(worst.get(name, 0.0), float(value))

    for _ in range(samples):
        f, h = _random_expsum(rng), _random_expsum(rng)
        scale = max(f.norm() * h.norm(), f.norm(), 1.0)
        # eigen-operator identities
        record("c2_plus_s2", (cx(spec, cx(spec, f)) + sx(spec, sx(spec, f))
                              - f).norm() / scale)
        record("cx_product", (cx(spec, f * h) - cx(spec, f) * cx(spec, h)
                              + sx(spec, f) * sx(spec, h)).norm() / scale)
        record("sx_product", (sx(spec, f * h) - sx(spec, f) * cx(spec, h)
                              - cx(spec, f) * sx(spec, h)).norm() / scale)
        # exterior algebra
        record("d_squared", d_ab(spec, d_ab(spec, f)).norm() / scale)
        record("leibniz", (d_ab(spec, f * h) - mul_right(spec, d_ab(spec, f), h)
                           - mul_left(spec, f, d_ab(spec, h))).norm() / scale)
        df = d_ab(spec, f)
        record("move_roundtrip", (to_left(spec, to_right(spec, df)) - df).norm()
               / max(df.norm(), 1.0))
        # star family: on t-independent coefficients the star is an
        # involution; in general the double star is the t-shift by -2b
        record("star_involution_shifted",
               (star_theta(spec, star_theta(spec, df))
                - df.map_coefficients(lambda c: c.shift("t", -2 * spec.b))).norm()
               / max(df.norm(), 1.0))
        fx = ExpSum([(lx, 0.0, c) for lx, _, c in
                     (t for t in f.terms.values())])
        wx = Form(spec, 1, {_DT: fx, _DX: cx(spec, fx)})
        record("star_involution",
               (star_theta(spec, star_theta(spec, wx)) - wx).norm()
               / max(wx.norm(), 1.0))
        alpha, beta = df, d_ab(spec, h)
        sym = wedge_ab(spec, alpha, star_theta(spec, beta)) \
            - wedge_ab(spec, beta, star_theta(spec, alpha))
        record("star_symmetry", sym.norm()
               / max(alpha.norm() * beta.norm(), 1.0))
    record("d_unit", d_ab(spec, ExpSum.one()).norm())
    one = ExpSum.one()
    for name, w in (("dt", Form(spec, 1, {_DT: one})),
                    ("dx", Form(spec, 1, {_DX: one}))):
        record(f"star_basis_{name}",
               (star_theta(spec, star_theta(spec, w)) - w).norm())
    passed = all(v <= tolerance for v in worst.values())
    return {"calculus": "shift", "a": spec.a, "b": spec.b, "theta": spec.theta,
            "samples": samples, "residuals": worst, "tolerance": tolerance,
            "pass": passed}
