"""Lattice and semi-discrete calculi: d, wedge, star, metric."""

import numpy as np
import pytest

import ncforms.coeff as cf
from ncforms.calculus import (CalculusSpec, Form, axiom_suite, d,
                              epsilon_constants, lattice_calculus,
                              metric_components, quantum_plane_check,
                              scalar_product, semi_discrete_calculus, star,
                              star_inv, wedge)
from ncforms.errors import (CalculusMismatchError, GradeError,
                            SingularityError)


def grid(values, boundary="open"):
    return cf.GridFunction(np.asarray(values, dtype=float), boundary=boundary)


class TestDerivative:
    def test_square_coordinate(self):
        # d(x^2) on a unit 1-d lattice has coefficient (x+1)^2 - x^2 = 2x + 1
        calc = lattice_calculus((1.0,), signature=(1,))
        x = np.arange(8.0)
        w = d(Form.function(calc, grid(x ** 2)))
        got = w.coefficient((0,))
        want = 2 * x[:] + 1
        a = got.values
        assert np.array_equal(a, want[: a.size])

    def test_forward_difference_scaling(self):
        calc = lattice_calculus((0.25,), signature=(1,))
        f = grid([0.0, 1.0, 4.0, 9.0])
        got = d(Form.function(calc, f)).coefficient((0,))
        assert np.allclose(got.values, np.array([1.0, 3.0, 5.0]) / 0.25)

    def test_d_squared_zero_grid(self, rng):
        calc = lattice_calculus((0.5, 1.5))
        g = cf.GridFunction(rng.standard_normal((6, 6)))
        f = Form.function(calc, g)
        assert d(d(f)).norm() <= 1e-13 * g.norm()

    def test_d_unit_zero(self):
        calc = lattice_calculus((1.0, 1.0))
        one = Form.function(calc, cf.GridFunction(np.ones((4, 4))))
        assert d(one).norm() == 0.0

    def test_right_basis_move(self, rng):
        # dx . f = (T f) dx: the coefficient crosses with one lattice shift
        calc = lattice_calculus((1.0, 1.0))
        f = cf.GridFunction(rng.standard_normal((5, 5)))
        moved = Form.basis(calc, (1,), unit=cf.GridFunction(np.ones((5, 5)))) * f
        want = f.shift(1, 1)
        assert (moved.coefficient((1,)) - want).norm() == 0.0


class TestWedge:
    def test_anticommutes_on_basis(self):
        calc = lattice_calculus((1.0, 1.0))
        dt, dx = Form.basis(calc, (0,)), Form.basis(calc, (1,))
        assert (wedge(dt, dx) + wedge(dx, dt)).norm() == 0.0
        assert wedge(dt, dt).norm() == 0.0

    def test_grade_overflow_truncates(self):
        calc = lattice_calculus((1.0, 1.0))
        top = Form.basis(calc, (0, 1))
        assert wedge(top, Form.basis(calc, (0,))).is_zero()

    def test_associativity_with_coefficients(self, rng):
        calc = lattice_calculus((0.5, 2.0))
        mk = lambda: cf.GridFunction(rng.standard_normal((6, 6)))
        f = Form.function(calc, mk())
        a = Form(calc, 1, {(0,): mk(), (1,): mk()})
        b = Form(calc, 1, {(0,): mk(), (1,): mk()})
        lhs = wedge(wedge(f, a), b)
        rhs = wedge(f, wedge(a, b))
        assert (lhs - rhs).norm() <= 1e-13 * max(lhs.norm(), 1.0)

    def test_mismatched_calculi_rejected(self):
        c1 = lattice_calculus((1.0, 1.0))
        c2 = lattice_calculus((1.0, 2.0))
        with pytest.raises(CalculusMismatchError):
            wedge(Form.basis(c1, (0,)), Form.basis(c2, (1,)))

    def test_bad_word_rejected(self):
        calc = lattice_calculus((1.0, 1.0))
        with pytest.raises(GradeError):
            Form(calc, 2, {(1, 0): cf.ExpSum.one()})
        with pytest.raises(GradeError):
            Form(calc, 1, {(5,): cf.ExpSum.one()})


class TestStar:
    def test_semi_discrete_table_frozen(self):
        calc = semi_discrete_calculus(0.5)
        assert calc.star_basis(()) == (1.0, (0, 1))
        assert calc.star_basis((0,)) == (-1.0, (1,))
        assert calc.star_basis((1,)) == (-1.0, (0,))
        assert calc.star_basis((0, 1)) == (1.0, ())
        assert epsilon_constants(calc) == {0: 1.0, 1: 1.0, 2: 1.0}

    def test_roundtrip_exact(self, rng):
        for calc in (lattice_calculus((0.5, 1.25), signature=(1, -1)),
                     semi_discrete_calculus(0.75)):
            w = Form(calc, 1, {(0,): cf.ExpSum.exponential(1.5, lx=0.5, mt=-0.25),
                               (1,): cf.ExpSum.exponential(0.5, lx=-0.25)})
            assert (star_inv(star(w)) - w).norm() <= 1e-15

    def test_covariance(self, rng):
        # star(w . f) = f . star(w)
        calc = lattice_calculus((0.5, 1.25), signature=(1, -1))
        mk = lambda: cf.GridFunction(rng.standard_normal((6, 6)))
        w = Form(calc, 1, {(0,): mk(), (1,): mk()})
        f = mk()
        lhs = star(w * f)
        rhs = f * star(w)
        assert (lhs - rhs).norm() <= 1e-14 * max(lhs.norm(), 1.0)

    def test_double_star_matches_measured_constants(self):
        # shift-invariant coefficients: star twice is exactly the per-grade
        # constant read off the basis table
        for sig in ((1, 1), (1, -1)):
            calc = lattice_calculus((1.0, 0.5), signature=sig)
            eps = epsilon_constants(calc)
            for grade, words in {0: [()], 1: [(0,), (1,)], 2: [(0, 1)]}.items():
                assert eps[grade] is not None
                w = Form(calc, grade,
                         {t: cf.ExpSum.constant(1.5 - 0.25j) for t in words})
                assert (star(star(w)) - w.scale(eps[grade])).norm() == 0.0

    def test_star_symmetry_two_axes(self, rng):
        calc = lattice_calculus((0.75, 1.5), signature=(1, -1))
        mk = lambda: cf.GridFunction(rng.standard_normal((6, 6)))
        a = Form(calc, 1, {(0,): mk(), (1,): mk()})
        b = Form(calc, 1, {(0,): mk(), (1,): mk()})
        lhs = wedge(a, star(b))
        rhs = wedge(b, star(a))
        assert (lhs - rhs).norm() <= 1e-13 * max(lhs.norm(), 1.0)


class TestAxiomSuite:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_lattice_grid(self, n):
        calc = lattice_calculus(tuple(0.5 + 0.25 * k for k in range(n)))
        rep = axiom_suite(calc, samples=40, seed=1, kind="grid")
        assert rep["pass"], rep["residuals"]

    def test_lattice_expsum_exact(self):
        calc = lattice_calculus((0.5, 1.25), signature=(1, -1))
        rep = axiom_suite(calc, samples=40, seed=2, kind="expsum")
        assert rep["pass"], rep["residuals"]

    def test_semi_discrete_expsum(self):
        calc = semi_discrete_calculus(0.5)
        rep = axiom_suite(calc, samples=40, seed=3, kind="expsum")
        assert rep["pass"], rep["residuals"]


class TestMetric:
    def test_flat_components_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(3):
            n = 2
            spac = [int(rng.integers(1, 9)) / 4.0 for _ in range(n)]
            sig = [int(s) for s in rng.choice([1, -1], n)]
            calc = lattice_calculus(tuple(spac), tuple(sig))
            axes = [np.arange(8) * l for l in spac]
            tt, xx = np.meshgrid(*axes, indexing="ij")
            ys = [cf.GridFunction(tt, boundary=("open", "open")),
                  cf.GridFunction(xx, boundary=("open", "open"))]
            m = metric_components(calc, ys, basis="x")
            for mu in range(n):
                for nu in range(n):
                    want = spac[mu] * spac[nu] * sig[mu] if mu == nu else 0.0
                    got = m.components[(mu, nu)]
                    assert float(np.abs(got.values - want).max()) == 0.0
            assert m.check_inverse(tol=0.0) <= 1e-15

    def test_degenerate_coordinates_rejected(self):
        calc = lattice_calculus((1.0, 1.0))
        tt, _ = np.meshgrid(np.arange(6.0), np.arange(6.0), indexing="ij")
        y = cf.GridFunction(tt, boundary=("open", "open"))
        with pytest.raises(SingularityError):
            metric_components(calc, [y, y])

    def test_quantum_plane_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(3):
            qs, spac = [], []
            while len(qs) < 2:
                cand = int(rng.integers(2, 9)) / 4.0
                if cand != 1.0:
                    qs.append(cand)
            spac = [int(rng.integers(1, 9)) / 4.0 for _ in range(2)]
            calc = lattice_calculus(tuple(spac), (1, -1))
            rep = quantum_plane_check(calc, qs)
            assert rep["pass"]
            assert max(rep["checks"].values()) == 0.0

    def test_quantum_plane_degenerate_q(self):
        calc = lattice_calculus((1.0, 1.0), (1, -1))
        with pytest.raises(SingularityError):
            quantum_plane_check(calc, [1, 2])

    def test_scalar_product_grade_guard(self):
        calc = lattice_calculus((1.0, 1.0))
        with pytest.raises(GradeError):
            scalar_product(Form.basis(calc, (0, 1)), Form.basis(calc, (0,)))
