"""Exact Weyl algebra [q, p] = i hbar with its simplest differential calculus.

Elements are normal-ordered polynomials (all q's left of all p's) with the
product computed by the exact reordering

    p^n q^m = sum_k C(n,k) C(m,k) k! (-i hbar)^k q^{m-k} p^{n-k}.

The differentials dq, dp are central; the generalized partials are the
commutator scalings dhat_q f = -(1/i hbar)[p, f] and
dhat_p f = (1/i hbar)[q, f], which act as formal partial derivatives on
normal-ordered monomials.  The Hodge operator moves right coefficients to
the left through a hermitean conjugation: star(w f) = f-dagger star(w); its
square is the grade constant table (1, -1, 1).
"""

import math

import numpy as np

from .calculus import Form
from .errors import CalculusMismatchError, ConfigError, GradeError

_DQ, _DP = (0,), (1,)
_PRUNE = 1e-14
# basis-word daggers forced by (star w)^dagger = star_inv(w^dagger)
_WORD_DAGGER_SIGN = {(): 1.0, (0,): 1.0, (1,): -1.0, (0, 1): 1.0}
_STAR_TABLE = {(): (1.0, (0, 1)), (0,): (1.0, (1,)),
               (1,): (-1.0, (0,)), (0, 1): (1.0, ())}
_STAR_INV_TABLE = {(0, 1): (1.0, ()), (1,): (1.0, (0,)),
                   (0,): (-1.0, (1,)), (): (1.0, (0, 1))}


class WeylElement:
    """Normal-ordered polynomial: mapping (m, n) -> coefficient of q^m p^n."""

    __slots__ = ("hbar", "coeffs")

    def __init__(self, hbar, coeffs=None):
        if hbar <= 0:
            raise ConfigError("hbar must be positive")
        self.hbar = float(hbar)
        clean = {}
        for (m, n), c in (coeffs or {}).items():
            c = complex(c)
            if abs(c) > _PRUNE:
                clean[(int(m), int(n))] = c
        self.coeffs = clean

    @classmethod
    def zero(cls, hbar):
        return cls(hbar, {})

    @classmethod
    def unit(cls, hbar, c=1.0):
        return cls(hbar, {(0, 0): c})

    @classmethod
    def q(cls, hbar):
        return cls(hbar, {(1, 0): 1.0})

    @classmethod
    def p(cls, hbar):
        return cls(hbar, {(0, 1): 1.0})

    @classmethod
    def monomial(cls, hbar, m, n, c=1.0):
        return cls(hbar, {(m, n): c})

    def _check_mate(self, other):
        if self.hbar != other.hbar:
            raise CalculusMismatchError("mixed hbar values")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = WeylElement.unit(self.hbar, other)
        if not isinstance(other, WeylElement):
            return NotImplemented
        self._check_mate(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return WeylElement(self.hbar, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return WeylElement(self.hbar, {k: -c for k, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return WeylElement(self.hbar,
                               {k: c * other for k, c in self.coeffs.items()})
        if isinstance(other, WeylElement):
            return weyl_mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def dagger(self):
        """(q^m p^n)^dagger = p^n q^m with the coefficient conjugated."""
        out = WeylElement.zero(self.hbar)
        for (m, n), c in self.coeffs.items():
            out = out + _reorder(self.hbar, n, m, np.conj(c))
        return out

    def degree(self):
        return max((m + n for (m, n) in self.coeffs), default=0)

    def norm(self):
        return sum(abs(c) for c in self.coeffs.values())

    def is_zero(self, tol=0.0):
        return all(abs(c) <= tol for c in self.coeffs.values())

    def __repr__(self):
        terms = ", ".join(f"q^{m} p^{n}: {c:.4g}"
                          for (m, n), c in sorted(self.coeffs.items()))
        return f"WeylElement({terms or '0'})"


def _reorder(hbar, n, m, c):
    """p^n q^m in normal order, scaled by c."""
    out = {}
    top = min(n, m)
    for k in range(top + 1):
        w = math.comb(n, k) * math.comb(m, k) * math.factorial(k)
        out[(m - k, n - k)] = c * w * (-1j * hbar) ** k
    return WeylElement(hbar, out)


def weyl_mul(f, g):
    """Exact normal-ordered product."""
    f._check_mate(g)
    acc = WeylElement.zero(f.hbar)
    for (m1, n1), c1 in f.coeffs.items():
        for (m2, n2), c2 in g.coeffs.items():
            mid = _reorder(f.hbar, n1, m2, c1 * c2)
            shifted = {(m1 + m, n + n2): c for (m, n), c in mid.coeffs.items()}
            acc = acc + WeylElement(f.hbar, shifted)
    return acc


def commutator(f, g):
    return weyl_mul(f, g) - weyl_mul(g, f)


def dhat_q(f):
    """-(1/i hbar)[p, f]; the formal q-partial on normal-ordered monomials."""
    p = WeylElement.p(f.hbar)
    return commutator(p, f) * (-1.0 / (1j * f.hbar))


def dhat_p(f):
    """(1/i hbar)[q, f]; the formal p-partial."""
    q = WeylElement.q(f.hbar)
    return commutator(q, f) * (1.0 / (1j * f.hbar))


class WeylCalculus:
    """Form-carrier marker for the Weyl calculus (two central differentials)."""

    __slots__ = ("hbar",)
    n = 2
    slots = (None, None)
    kinds = ("weyl", "weyl")
    name = "weyl"

    def __init__(self, hbar):
        self.hbar = float(hbar)

    def key(self):
        return ("weyl", self.hbar)

    def _reject(self, *_, **__):
        raise CalculusMismatchError(
            "coefficients are operators here; use the weyl-module ops")

    dhat = shift_coeff = shift_word = star_basis = star_basis_inv = _reject


class WeylForm(Form):
    """Graded form with left WeylElement coefficients on {1, dq, dp, dq dp}."""

    @classmethod
    def function(cls, calc, f):
        return cls(calc, 0, {(): f})

    @classmethod
    def of(cls, calc, grade, components):
        return cls(calc, grade, components)


def _zero_el(calc):
    return WeylElement.zero(calc.hbar)


def _comp(w, word):
    c = w.coefficient(word)
    return _zero_el(w.calculus) if c is None else c


def d_w(w):
    """Exterior derivative: df = (dhat_q f) dq + (dhat_p f) dp."""
    calc = w.calculus
    if w.grade == 0:
        f = _comp(w, ())
        return WeylForm(calc, 1, {_DQ: dhat_q(f), _DP: dhat_p(f)})
    if w.grade == 1:
        f, g = _comp(w, _DQ), _comp(w, _DP)
        return WeylForm(calc, 2, {(0, 1): dhat_q(g) - dhat_p(f)})
    return _zero_form(calc, 2)


def _zero_form(calc, grade):
    return WeylForm(calc, grade, {})


def _merge_sign(w1, w2):
    """Sign of sorting the concatenated word, None on repeats."""
    joint = w1 + w2
    if len(set(joint)) != len(joint):
        return None, None
    sign = 1
    items = list(joint)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign, tuple(sorted(joint))


def wedge_w(w1, w2):
    """Product of forms; differentials are central, coefficients keep order."""
    calc = w1.calculus
    if calc.key() != w2.calculus.key():
        raise CalculusMismatchError("forms live on different calculi")
    grade = w1.grade + w2.grade
    if grade > 2:
        return _zero_form(calc, 2)
    out = {}
    for word1, f in w1.components.items():
        for word2, g in w2.components.items():
            sign, word = _merge_sign(word1, word2)
            if sign is None:
                continue
            c = weyl_mul(f, g) * float(sign)
            out[word] = out.get(word, _zero_el(calc)) + c
    return WeylForm(calc, grade, out)


def star_h(w):
    """Hodge action: basis table plus covariance star(w f) = f-dagger star w."""
    calc = w.calculus
    out = {}
    for word, f in w.components.items():
        fac, new = _STAR_TABLE[word]
        c = f.dagger() * fac
        out[new] = out.get(new, _zero_el(calc)) + c
    return WeylForm(calc, calc.n - w.grade, out)


def star_inv_h(w):
    calc = w.calculus
    out = {}
    for word, f in w.components.items():
        fac, new = _STAR_INV_TABLE[word]
        c = f.dagger() * fac
        out[new] = out.get(new, _zero_el(calc)) + c
    return WeylForm(calc, calc.n - w.grade, out)


def dagger(w):
    """Hermitean conjugation of an element or form."""
    if isinstance(w, WeylElement):
        return w.dagger()
    out = {word: f.dagger() * _WORD_DAGGER_SIGN[word]
           for word, f in w.components.items()}
    return WeylForm(w.calculus, w.grade, out)


def scalar_product_w(alpha, beta):
    return star_inv_h(wedge_w(alpha, star_h(beta)))


def field_residual_pq(P, Q, full_output=False):
    """Residual R = [p, P] + [q, Q] of the automorphism field equation,
    together with the displayed identity R = -i hbar (dhat_q P - dhat_p Q)."""
    P._check_mate(Q)
    hbar = P.hbar
    p, q = WeylElement.p(hbar), WeylElement.q(hbar)
    R = commutator(p, P) + commutator(q, Q)
    ident = (dhat_q(P) - dhat_p(Q)) * (-1j * hbar)
    if full_output:
        return R, {"identity_residual": (R - ident).norm()}
    return R


def gauge_current_pq(P, Q):
    """A = -(1/i hbar)(P - p) dq + (1/i hbar)(Q - q) dp on the Weyl calculus."""
    hbar = P.hbar
    calc = WeylCalculus(hbar)
    p, q = WeylElement.p(hbar), WeylElement.q(hbar)
    s = 1.0 / (1j * hbar)
    return WeylForm(calc, 1, {_DQ: (P - p) * (-s), _DP: (Q - q) * s})


def integrate_exact(omega, max_degree=6):
    """Potential of a closed 1-form by termwise formal antidifferentiation.

    Works degree-by-degree on polynomial coefficients up to the cutoff;
    the (0,0) coefficient of the potential is normalized to zero.
    """
    calc = omega.calculus
    f, g = _comp(omega, _DQ), _comp(omega, _DP)
    closure = (dhat_q(g) - dhat_p(f)).norm()
    if closure > _PRUNE * max(1.0, f.norm() + g.norm()):
        raise GradeError("input 1-form is not closed")
    if max(c_degree(f), c_degree(g)) + 1 > max_degree:
        raise GradeError("degree cutoff exceeded")
    chi = {}
    for (m, n), c in f.coeffs.items():
        chi[(m + 1, n)] = c / (m + 1)
    chi_el = WeylElement(calc.hbar, chi)
    rest = g - dhat_p(chi_el)
    for (m, n), c in rest.coeffs.items():
        if m != 0:
            raise GradeError("antidifferentiation remainder depends on q")
        chi_el = chi_el + WeylElement.monomial(calc.hbar, 0, n + 1, c / (n + 1))
    chi_el = chi_el - WeylElement.unit(calc.hbar, chi_el.coeffs.get((0, 0), 0.0))
    return chi_el


def c_degree(f):
    return max((m + n for (m, n) in f.coeffs), default=0)


# ---------------------------------------------------------------------------
# Matrix layer for the tower-enabling identity
# ---------------------------------------------------------------------------

def _mat_map(mat, fn):
    return [[fn(e) for e in row] for row in mat]


def _mat_add(x, y):
    return [[a + b for a, b in zip(rx, ry)] for rx, ry in zip(x, y)]


def _mat_sub(x, y):
    return [[a - b for a, b in zip(rx, ry)] for rx, ry in zip(x, y)]


def _mat_wedge(x, y):
    n = len(x)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                term = wedge_w(x[i][k], y[k][j])
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def _mat_norm(x):
    return max(e.norm() for row in x for e in row)


def tower_identity_residual(A, chi):
    """Exact residual of the conservation-transport identity.

    Given a matrix 1-form A with d(star A) = 0 entrywise and a matrix chi of
    grade-0 entries, the covariant current D chi = d chi + A chi satisfies

        d star (D chi)_{ij} = d star d chi_{ij}
                              + sum_k d(chi_{kj}^dagger) ^ star A_{ik},

    which for a single entry packages as d star D chi = (D star d psi)^dagger
    with psi = chi^dagger.  Returns the max entry residual of both readings
    (the packaged one only for 1x1 input).
    """
    n = len(chi)
    lhs = _mat_map(_mat_add(_mat_map(chi, d_w), _mat_wedge(A, chi)),
                   lambda e: d_w(star_h(e)))
    rhs = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = d_w(star_h(d_w(chi[i][j])))
            for k in range(n):
                term = wedge_w(d_w(_form_dagger0(chi[k][j])), star_h(A[i][k]))
                acc = acc + term
            row.append(acc)
        rhs.append(row)
    residual = _mat_norm(_mat_sub(lhs, rhs))
    report = {"entrywise_residual": residual}
    if n == 1:
        psi = _form_dagger0(chi[0][0])
        sdpsi = star_h(d_w(psi))
        packaged = d_w(sdpsi) + wedge_w(A[0][0], sdpsi)
        report["packaged_residual"] = (lhs[0][0] - dagger(packaged)).norm()
    return report


def _form_dagger0(w):
    f = _comp(w, ())
    return WeylForm(w.calculus, 0, {(): f.dagger()})


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

class EpsilonTable:
    """Grade constants of the double star, with their involution laws."""

    __slots__ = ("eps0", "eps1", "eps2")

    def __init__(self, eps0, eps1, eps2):
        self.eps0, self.eps1, self.eps2 = complex(eps0), complex(eps1), complex(eps2)

    def as_tuple(self):
        return (self.eps0, self.eps1, self.eps2)

    def check(self):
        ok_inv = all(abs(np.conj(e) - 1.0 / e) == 0.0 for e in self.as_tuple())
        ok_tower = self.eps1 == -complex(np.conj(self.eps2))
        return {"dagger_inverse": bool(ok_inv), "tower_condition": bool(ok_tower)}


def _rand_element(rng, hbar, max_degree=3, dyadic=True):
    out = {}
    for _ in range(rng.integers(2, 5)):
        m = int(rng.integers(0, max_degree + 1))
        n = int(rng.integers(0, max_degree + 1 - m))
        if dyadic:
            c = complex(int(rng.integers(-8, 9)) / 8.0,
                        int(rng.integers(-8, 9)) / 8.0)
        else:
            c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        out[(m, n)] = out.get((m, n), 0.0) + c
    return WeylElement(hbar, out)


def _rand_form(rng, calc, grade, **kw):
    words = {0: [()], 1: [_DQ, _DP], 2: [(0, 1)]}[grade]
    return WeylForm(calc, grade,
                    {w: _rand_element(rng, calc.hbar, **kw) for w in words})


def measured_epsilon(calc):
    """Read the grade constants off the double star on basis forms."""
    vals = []
    one = WeylElement.unit(calc.hbar)
    for grade, word in ((0, ()), (1, _DQ), (2, (0, 1))):
        w = WeylForm(calc, grade, {word: one})
        ww = star_h(star_h(w))
        c = ww.coefficient(word)
        vals.append(c.coeffs.get((0, 0), 0.0) if c is not None else 0.0)
    return EpsilonTable(*vals)


def epsilon_suite(hbar=0.5, samples=40, seed=0, tolerance=0.0):
    """Measure the epsilon table and its involution/tower conditions, plus
    scalar-product hermiticity, on random forms.  Exact checks by default."""
    calc = WeylCalculus(hbar)
    rng = np.random.default_rng(seed)
    table = measured_epsilon(calc)
    worst = {"epsilon_measured": max(abs(a - b) for a, b in
                                     zip(table.as_tuple(), (1, -1, 1)))}

    def record(name, value):
        worst[name] = max(worst.get(name, 0.0), float(value))

    eps = {0: table.eps0, 1: table.eps1, 2: table.eps2}
    for _ in range(samples):
        for grade in (0, 1, 2):
            w = _rand_form(rng, calc, grade)
            record(f"double_star_grade{grade}",
                   (star_h(star_h(w)) - w * eps[grade]).norm() / max(w.norm(), 1.0))
            record("star_dagger",
                   (dagger(star_h(w)) - star_inv_h(dagger(w))).norm()
                   / max(w.norm(), 1.0))
        alpha, beta = _rand_form(rng, calc, 1), _rand_form(rng, calc, 1)
        sp = scalar_product_w(alpha, beta)
        record("scalar_hermitean",
               (dagger(sp) - scalar_product_w(beta, alpha)).norm()
               / max(alpha.norm() * beta.norm(), 1.0))
        record("wedge_star_dagger",
               (dagger(wedge_w(alpha, star_h(beta)))
                - wedge_w(beta, star_h(alpha)) * np.conj(eps[2])).norm()
               / max(alpha.norm() * beta.norm(), 1.0))
    checks = table.check()
    passed = all(v <= tolerance for v in worst.values()) and \
        checks["dagger_inverse"] and checks["tower_condition"]
    return {"hbar": hbar, "epsilon": [table.eps0, table.eps1, table.eps2],
            "conditions": checks, "residuals": worst, "pass": passed}


def weyl_suite(hbar=0.5, samples=80, seed=0, tolerance=0.0):
    """Algebra and exterior-calculus axioms, checked exactly."""
    calc = WeylCalculus(hbar)
    rng = np.random.default_rng(seed)
    worst = {}

    def record(name, value):
        worst[name] = max(worst.get(name, 0.0), float(value))

    q, p = WeylElement.q(hbar), WeylElement.p(hbar)
    record("commutator_qp", (commutator(q, p)
                             - WeylElement.unit(hbar, 1j * hbar)).norm())
    record("partial_table", (dhat_q(q) - WeylElement.unit(hbar)).norm()
           + dhat_q(p).norm() + dhat_p(q).norm()
           + (dhat_p(p) - WeylElement.unit(hbar)).norm())
    for _ in range(samples):
        f = _rand_element(rng, hbar)
        g = _rand_element(rng, hbar)
        h = _rand_element(rng, hbar)
        scale = max(f.norm() * g.norm(), 1.0)
        record("associativity",
               (weyl_mul(weyl_mul(f, g), h) - weyl_mul(f, weyl_mul(g, h))).norm()
               / max(scale * h.norm(), 1.0))
        record("dagger_involution", (f.dagger().dagger() - f).norm()
               / max(f.norm(), 1.0))
        record("dagger_antihom", ((weyl_mul(f, g)).dagger()
                                  - weyl_mul(g.dagger(), f.dagger())).norm() / scale)
        # formal-partial action on normal-ordered monomials
        fq = WeylElement(hbar, {(m - 1, n): m * c
                                for (m, n), c in f.coeffs.items() if m})
        fp = WeylElement(hbar, {(m, n - 1): n * c
                                for (m, n), c in f.coeffs.items() if n})
        record("partial_formal", (dhat_q(f) - fq).norm() + (dhat_p(f) - fp).norm())
        # exterior calculus
        w0 = WeylForm(calc, 0, {(): f})
        record("d_squared", d_w(d_w(w0)).norm() / max(f.norm(), 1.0))
        record("leibniz_0", (d_w(WeylForm(calc, 0, {(): weyl_mul(f, g)}))
                             - wedge_w(d_w(w0), WeylForm(calc, 0, {(): g}))
                             - wedge_w(w0, d_w(WeylForm(calc, 0, {(): g})))).norm()
               / scale)
        w1 = _rand_form(rng, calc, 1)
        g0 = WeylForm(calc, 0, {(): g})
        record("leibniz_1", (d_w(wedge_w(w1, g0))
                             - wedge_w(d_w(w1), g0)
                             + wedge_w(w1, d_w(g0))).norm()
               / max(w1.norm() * g.norm(), 1.0))
        # central differentials: dq f = f dq and dp f = f dp as forms
        for nm, word in (("central_dq", _DQ), ("central_dp", _DP)):
            basis = WeylForm(calc, 1, {word: WeylElement.unit(hbar)})
            record(nm, (wedge_w(basis, w0) - wedge_w(w0, basis)).norm()
                   / max(f.norm(), 1.0))
    record("d_unit", d_w(WeylForm(calc, 0, {(): WeylElement.unit(hbar)})).norm())
    passed = all(v <= tolerance for v in worst.values())
    return {"calculus": "weyl", "hbar": hbar, "samples": samples,
            "residuals": worst, "tolerance": tolerance, "pass": passed}


def automorphism_catalog(hbar, theta=0.5, s=0.25, c=0.75):
    """Affine symplectic (P, Q) pairs with their expected residuals."""
    p, q = WeylElement.p(hbar), WeylElement.q(hbar)
    one = WeylElement.unit(hbar)
    return {
        "translation": (p + one * c, q, WeylElement.zero(hbar)),
        "squeeze": (p * math.exp(s), q * math.exp(-s), WeylElement.zero(hbar)),
        "rotation": (p * math.cos(theta) + q * math.sin(theta),
                     p * (-math.sin(theta)) + q * math.cos(theta),
                     one * (-2j * hbar * math.sin(theta))),
    }
