"""Two-parameter shift calculus: moves, star family, field equation."""

import numpy as np
import pytest

from ncforms.calculus import Form, d
from ncforms.coeff import ExpSum
from ncforms.errors import (CalculusMismatchError, ConfigError, GradeError,
                            SingularityError)
from ncforms.shiftcalc import (Affine, ShiftCalculusSpec, bimodule_move, cx,
                               d_ab, derivation_check_A, field_residual_ab,
                               mul_left, mul_right, shift_suite, star_theta,
                               sx, to_left, to_right, wedge_ab)

SPEC = ShiftCalculusSpec(0.7, 0.4, theta=0.6)
DT, DX = (0,), (1,)


def one_form(spec, p, q):
    return Form(spec, 1, {DT: p, DX: q})


class TestOperators:
    def test_exponentials_are_eigenfunctions(self):
        lam = 1.25
        f = ExpSum.exponential(2.0, lx=lam)
        assert (cx(SPEC, f) - f * np.cos(SPEC.a * lam)).norm() <= 1e-15
        assert (sx(SPEC, f) - f * np.sin(SPEC.a * lam)).norm() <= 1e-15

    def test_pythagoras_exact(self):
        f = ExpSum.exponential(1.0, lx=0.5, mt=-0.25) + ExpSum.constant(2.0)
        got = cx(SPEC, cx(SPEC, f)) + sx(SPEC, sx(SPEC, f))
        assert (got - f).norm() == 0.0

    def test_derivative_of_exponential(self):
        lam, mu = 1.25, -0.5
        f = ExpSum.exponential(1.0, lx=lam, mt=mu)
        w = d_ab(SPEC, f)
        shift = np.exp(mu * SPEC.b)
        want_t = f * ((np.cos(SPEC.a * lam) * shift - 1.0) / SPEC.b)
        want_x = f * (np.sin(SPEC.a * lam) * shift / SPEC.a)
        assert (w.coefficient(DT) - want_t).norm() <= 1e-14
        assert (w.coefficient(DX) - want_x).norm() <= 1e-14

    def test_d_squared_and_unit(self):
        f = ExpSum.exponential(1.0, lx=0.5, mt=0.75)
        assert d_ab(SPEC, d_ab(SPEC, f)).norm() <= 1e-15
        assert d_ab(SPEC, ExpSum.one()).norm() == 0.0


class TestMoves:
    def test_right_move_formulas(self):
        f = ExpSum.exponential(1.5, lx=0.5, mt=-0.25)
        fp = f.shift("t", SPEC.b)
        ratio = SPEC.b / SPEC.a
        got = bimodule_move(SPEC, "right", "dt", f)
        assert (got.coefficient(DT) - cx(SPEC, fp)).norm() == 0.0
        assert (got.coefficient(DX) - sx(SPEC, fp) * ratio).norm() == 0.0
        got = bimodule_move(SPEC, "right", "dx", f)
        assert (got.coefficient(DT) + sx(SPEC, fp) / ratio).norm() == 0.0
        assert (got.coefficient(DX) - cx(SPEC, fp)).norm() == 0.0

    def test_left_move_formulas(self):
        f = ExpSum.exponential(1.5, lx=0.5, mt=-0.25)
        fm = f.shift("t", -SPEC.b)
        ratio = SPEC.b / SPEC.a
        got = bimodule_move(SPEC, "left", "dt", f)
        assert (got.coefficient(DT) - cx(SPEC, fm)).norm() == 0.0
        assert (got.coefficient(DX) + sx(SPEC, fm) * ratio).norm() == 0.0

    def test_move_roundtrip(self):
        w = one_form(SPEC, ExpSum.exponential(1.0, lx=0.5),
                     ExpSum.exponential(0.5, mt=0.25))
        assert (to_left(SPEC, to_right(SPEC, w)) - w).norm() <= 1e-15

    def test_unknown_move_rejected(self):
        with pytest.raises(GradeError):
            bimodule_move(SPEC, "middle", "dt", ExpSum.one())

    def test_leibniz(self):
        f = ExpSum.exponential(1.0, lx=0.5, mt=-0.25)
        h = ExpSum.exponential(0.5, lx=-0.75, mt=0.5)
        lhs = d_ab(SPEC, f * h)
        rhs = mul_right(SPEC, d_ab(SPEC, f), h) + mul_left(SPEC, f, d_ab(SPEC, h))
        assert (lhs - rhs).norm() <= 1e-14 * max(lhs.norm(), 1.0)


class TestWedge:
    def test_basis_products(self):
        one = ExpSum.one()
        dt = Form(SPEC, 1, {DT: one})
        dx = Form(SPEC, 1, {DX: one})
        assert wedge_ab(SPEC, dt, dt).norm() == 0.0
        assert wedge_ab(SPEC, dx, dx).norm() == 0.0
        anti = wedge_ab(SPEC, dt, dx) + wedge_ab(SPEC, dx, dt)
        assert anti.norm() == 0.0
        assert (wedge_ab(SPEC, dt, dx).coefficient((0, 1)) - one).norm() == 0.0

    def test_grade_overflow_is_zero(self):
        top = Form(SPEC, 2, {(0, 1): ExpSum.one()})
        dt = Form(SPEC, 1, {DT: ExpSum.one()})
        assert wedge_ab(SPEC, top, dt).is_zero()

    def test_right_multiplication_guard(self):
        top = Form(SPEC, 2, {(0, 1): ExpSum.one()})
        f = Form(SPEC, 0, {(): ExpSum.constant(2.0)})
        with pytest.raises(GradeError):
            wedge_ab(SPEC, top, f)


class TestStar:
    def test_grade_guard(self):
        with pytest.raises(GradeError):
            star_theta(SPEC, Form(SPEC, 0, {(): ExpSum.one()}))

    def test_basis_involution_exact(self):
        for word in (DT, DX):
            w = Form(SPEC, 1, {word: ExpSum.one()})
            assert (star_theta(SPEC, star_theta(SPEC, w)) - w).norm() <= 1e-16

    def test_double_star_is_time_shift(self):
        w = one_form(SPEC, ExpSum.exponential(1.0, lx=0.5, mt=-0.25),
                     ExpSum.exponential(0.5, lx=-0.5, mt=0.75))
        got = star_theta(SPEC, star_theta(SPEC, w))
        want = w.map_coefficients(lambda c: c.shift("t", -2 * SPEC.b))
        assert (got - want).norm() <= 1e-15

    def test_star_symmetry(self):
        al = d_ab(SPEC, ExpSum.exponential(1.0, lx=0.5, mt=-0.25))
        be = d_ab(SPEC, ExpSum.exponential(0.5, lx=-0.75, mt=0.5))
        sym = wedge_ab(SPEC, al, star_theta(SPEC, be)) \
            - wedge_ab(SPEC, be, star_theta(SPEC, al))
        assert sym.norm() <= 1e-14 * max(al.norm() * be.norm(), 1.0)


class TestFieldEquation:
    def test_plain_star_linear_profiles_solve(self):
        spec = ShiftCalculusSpec(0.7, 0.4, theta=0.0)
        for p, r in ((1.3, -0.5), (0.0, 1.0), (-0.8, 0.25)):
            assert field_residual_ab(spec, p, r).is_zero(1e-13)

    def test_residual_closed_form(self):
        for theta in (0.6, 2.2):
            spec = ShiftCalculusSpec(0.7, 0.4, theta=theta)
            p, r = 1.3, -0.5
            res, info = field_residual_ab(spec, p, r, full_output=True)
            want = np.exp(-r * spec.b) * (np.cos(spec.a * p + theta)
                                          - np.cos(spec.a * p - theta))
            assert (res - ExpSum.constant(want)).norm() <= 1e-12
            assert info["machinery_residual"] <= 1e-13

    def test_derivation_check(self):
        f = ExpSum.exponential(1.0, lx=0.75)
        rep = derivation_check_A(SPEC, f, f.inverse())
        assert all(c["residual"] <= 1e-12 for c in rep["checks"])

    def test_derivation_check_needs_reciprocal_pair(self):
        f = ExpSum.exponential(1.0, lx=0.75)
        with pytest.raises(SingularityError):
            derivation_check_A(SPEC, f, f)


class TestSuiteAndGuards:
    @pytest.mark.parametrize("theta", [0.0, 0.6, 2.2])
    def test_suite_passes(self, theta):
        rep = shift_suite(ShiftCalculusSpec(0.7, 0.4, theta=theta),
                          samples=30, seed=1)
        assert rep["pass"], rep["residuals"]
        assert {"c2_plus_s2", "cx_product", "sx_product", "d_squared",
                "leibniz", "star_involution", "star_symmetry"} <= set(
                    rep["residuals"])

    def test_degenerate_parameters_rejected(self):
        with pytest.raises(ConfigError):
            ShiftCalculusSpec(0.0, 0.4)
        with pytest.raises(ConfigError):
            ShiftCalculusSpec(0.7, 0.0)

    def test_generic_machinery_rejected(self):
        w = Form(SPEC, 0, {(): ExpSum.exponential(1.0, lx=0.5)})
        with pytest.raises(CalculusMismatchError):
            d(w)

    def test_affine_container(self):
        f = Affine(1.0, 2.0, 3.0)
        g = f.shift("t", 0.5)
        assert (g.c0, g.ct, g.cx) == (2.0, 2.0, 3.0)
        h = (f + 4.0) * 2.0
        assert (h.c0, h.ct, h.cx) == (10.0, 4.0, 6.0)
        assert (f - f).is_zero()
        assert f.norm() == 6.0
