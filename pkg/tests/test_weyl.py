"""Weyl algebra, its differential calculus, and the hermitean star."""

import numpy as np
import pytest

from ncforms.calculus import d as lattice_d
from ncforms.errors import CalculusMismatchError, ConfigError, GradeError
from ncforms.weyl import (EpsilonTable, WeylCalculus, WeylElement, WeylForm,
                          automorphism_catalog, c_degree, commutator, dagger,
                          dhat_p, dhat_q, d_w, epsilon_suite,
                          field_residual_pq, gauge_current_pq, integrate_exact,
                          measured_epsilon, scalar_product_w, star_h,
                          star_inv_h, tower_identity_residual, wedge_w,
                          weyl_mul, weyl_suite, _rand_element)

HBAR = 0.5
CALC = WeylCalculus(HBAR)
Q, P = WeylElement.q(HBAR), WeylElement.p(HBAR)
ONE = WeylElement.unit(HBAR)
DQ, DP = (0,), (1,)


def form0(f):
    return WeylForm(CALC, 0, {(): f})


def basis(word):
    return WeylForm(CALC, 1, {word: ONE})


class TestAlgebra:
    def test_commutator_table(self):
        assert (commutator(Q, P) - ONE * (1j * HBAR)).norm() == 0.0
        assert commutator(Q, Q).norm() == 0.0
        assert commutator(P, P).norm() == 0.0

    def test_p_times_q_squared(self):
        got = weyl_mul(P, weyl_mul(Q, Q))
        want = WeylElement(HBAR, {(2, 1): 1.0, (1, 0): -2j * HBAR})
        assert (got - want).norm() == 0.0

    def test_reordering_degree_two(self):
        got = weyl_mul(weyl_mul(P, P), weyl_mul(Q, Q))
        want = WeylElement(HBAR, {(2, 2): 1.0, (1, 1): -4j * HBAR,
                                  (0, 0): -2.0 * HBAR ** 2})
        assert (got - want).norm() == 0.0

    def test_fock_representation_oracle(self):
        # truncated ladder representation; the upper-left window is exact up
        # to roundoff for products of bounded degree
        dim = 64
        a = np.zeros((dim, dim), dtype=complex)
        idx = np.arange(1, dim)
        a[idx - 1, idx] = np.sqrt(idx)
        ad = a.conj().T
        Qm = np.sqrt(HBAR / 2) * (a + ad)
        Pm = 1j * np.sqrt(HBAR / 2) * (ad - a)

        def rep(el):
            out = np.zeros_like(Qm)
            for (m, n), c in el.coeffs.items():
                out += c * (np.linalg.matrix_power(Qm, m)
                            @ np.linalg.matrix_power(Pm, n))
            return out

        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(20):
            f = _rand_element(rng, HBAR, max_degree=4, dyadic=False)
            g = _rand_element(rng, HBAR, max_degree=4, dyadic=False)
            diff = rep(weyl_mul(f, g))[:33, :33] - (rep(f) @ rep(g))[:33, :33]
            worst = max(worst, float(np.abs(diff).max()))
        assert worst <= 1e-10, worst

    def test_hbar_mismatch_rejected(self):
        with pytest.raises(CalculusMismatchError):
            WeylElement.q(0.5) + WeylElement.q(1.0)
        with pytest.raises(CalculusMismatchError):
            weyl_mul(WeylElement.p(0.5), WeylElement.p(0.25))

    def test_bad_hbar_rejected(self):
        with pytest.raises(ConfigError):
            WeylElement.unit(0.0)
        with pytest.raises(ConfigError):
            WeylElement.q(-1.0)

    def test_tiny_coefficients_pruned(self):
        assert WeylElement(HBAR, {(0, 0): 1e-15}).is_zero()
        assert not WeylElement(HBAR, {(0, 0): 1e-13}).is_zero()

    def test_degree(self):
        f = WeylElement(HBAR, {(2, 1): 1.0, (0, 0): 2.0})
        assert f.degree() == 3
        assert c_degree(f) == 3
        assert WeylElement.zero(HBAR).degree() == 0


class TestDagger:
    def test_element_involution_and_antihom(self, rng):
        for _ in range(10):
            f = _rand_element(rng, HBAR)
            g = _rand_element(rng, HBAR)
            assert (f.dagger().dagger() - f).norm() == 0.0
            assert (weyl_mul(f, g).dagger()
                    - weyl_mul(g.dagger(), f.dagger())).norm() == 0.0

    def test_generators_self_adjoint(self):
        assert (Q.dagger() - Q).norm() == 0.0
        assert (P.dagger() - P).norm() == 0.0
        assert ((ONE * 1j).dagger() - ONE * (-1j)).norm() == 0.0

    def test_basis_form_signs(self):
        assert (dagger(basis(DQ)) - basis(DQ)).norm() == 0.0
        assert (dagger(basis(DP)) + basis(DP)).norm() == 0.0
        top = WeylForm(CALC, 2, {(0, 1): ONE})
        assert (dagger(top) - top).norm() == 0.0
        unit0 = form0(ONE)
        assert (dagger(unit0) - unit0).norm() == 0.0

    def test_star_dagger_compatibility(self, rng):
        for grade in (0, 1, 2):
            from ncforms.weyl import _rand_form
            w = _rand_form(rng, CALC, grade)
            assert (dagger(star_h(w)) - star_inv_h(dagger(w))).norm() == 0.0

    def test_wedge_antihomomorphism(self, rng):
        from ncforms.weyl import _rand_form
        u = _rand_form(rng, CALC, 1)
        v = _rand_form(rng, CALC, 1)
        got = dagger(wedge_w(u, v))
        want = wedge_w(dagger(v), dagger(u))
        assert (got - want).norm() == 0.0


class TestCalculusOps:
    def test_partial_table(self):
        assert (dhat_q(Q) - ONE).norm() == 0.0
        assert dhat_q(P).norm() == 0.0
        assert dhat_p(Q).norm() == 0.0
        assert (dhat_p(P) - ONE).norm() == 0.0

    def test_partials_are_formal(self):
        f = WeylElement.monomial(HBAR, 3, 2, 0.75)
        assert (dhat_q(f) - WeylElement.monomial(HBAR, 2, 2, 2.25)).norm() == 0.0
        assert (dhat_p(f) - WeylElement.monomial(HBAR, 3, 1, 1.5)).norm() == 0.0

    def test_d_squared_and_unit(self, rng):
        f = _rand_element(rng, HBAR)
        assert d_w(d_w(form0(f))).norm() == 0.0
        assert d_w(form0(ONE)).norm() == 0.0

    def test_leibniz(self, rng):
        f = _rand_element(rng, HBAR)
        g = _rand_element(rng, HBAR)
        lhs = d_w(form0(weyl_mul(f, g)))
        rhs = wedge_w(d_w(form0(f)), form0(g)) + wedge_w(form0(f), d_w(form0(g)))
        assert (lhs - rhs).norm() == 0.0

    def test_central_differentials(self, rng):
        f0 = form0(_rand_element(rng, HBAR))
        for word in (DQ, DP):
            assert (wedge_w(basis(word), f0) - wedge_w(f0, basis(word))).norm() == 0.0

    def test_star_covariance(self, rng):
        from ncforms.weyl import _rand_form
        f = _rand_element(rng, HBAR)
        for grade in (0, 1, 2):
            w = _rand_form(rng, CALC, grade)
            lhs = star_h(wedge_w(w, form0(f)))
            rhs = wedge_w(form0(f.dagger()), star_h(w))
            assert (lhs - rhs).norm() == 0.0

    def test_star_table(self):
        assert (star_h(form0(ONE)) - WeylForm(CALC, 2, {(0, 1): ONE})).norm() == 0.0
        assert (star_h(basis(DQ)) - basis(DP)).norm() == 0.0
        assert (star_h(basis(DP)) + basis(DQ)).norm() == 0.0
        assert (star_inv_h(star_h(basis(DQ))) - basis(DQ)).norm() == 0.0

    def test_generic_machinery_rejected(self):
        with pytest.raises(CalculusMismatchError):
            lattice_d(form0(Q))

    def test_wedge_calculus_mismatch(self):
        other = WeylCalculus(1.0)
        w = WeylForm(other, 0, {(): WeylElement.q(1.0)})
        with pytest.raises(CalculusMismatchError):
            wedge_w(form0(Q), w)


class TestEpsilon:
    def test_measured_table(self):
        table = measured_epsilon(CALC)
        assert table.as_tuple() == (1 + 0j, -1 + 0j, 1 + 0j)
        checks = table.check()
        assert checks["dagger_inverse"] and checks["tower_condition"]

    def test_involution_laws(self):
        table = EpsilonTable(1.0, -1.0, 1.0)
        for e in table.as_tuple():
            assert np.conj(e) == 1.0 / e
        assert table.eps1 == -np.conj(table.eps2)

    def test_scalar_product_hermitean(self, rng):
        from ncforms.weyl import _rand_form
        al = _rand_form(rng, CALC, 1)
        be = _rand_form(rng, CALC, 1)
        assert (dagger(scalar_product_w(al, be))
                - scalar_product_w(be, al)).norm() == 0.0

    def test_suites_pass_exactly(self):
        assert weyl_suite(hbar=0.5, samples=40, seed=0)["pass"]
        rep = epsilon_suite(hbar=0.5, samples=20, seed=0)
        assert rep["pass"], rep["residuals"]
        assert rep["epsilon"] == [1 + 0j, -1 + 0j, 1 + 0j]


class TestAutomorphisms:
    def test_catalog_residuals(self):
        cat = automorphism_catalog(HBAR, theta=0.5)
        for name, (Pa, Qa, want) in cat.items():
            got, info = field_residual_pq(Pa, Qa, full_output=True)
            assert (got - want).norm() <= 1e-15, name
            assert info["identity_residual"] <= 1e-15, name
        rot = cat["rotation"][2]
        assert (rot - ONE * (-2j * HBAR * np.sin(0.5))).norm() == 0.0

    def test_affine_residual_formula(self):
        # P = alpha p + beta q + c1, Q = gamma p + delta q + c2:
        # R = i hbar (gamma - beta), independent of alpha, delta, shifts
        alpha, beta, gamma, delta = 0.75, 0.25, -0.5, 1.25
        Pa = P * alpha + Q * beta + ONE * 0.5
        Qa = P * gamma + Q * delta + ONE * (-0.25)
        R = field_residual_pq(Pa, Qa)
        assert (R - ONE * (1j * HBAR * (gamma - beta))).norm() == 0.0

    def test_field_residual_as_two_form(self):
        cat = automorphism_catalog(HBAR, theta=0.5)
        Pr, Qr, R = cat["rotation"]
        dsA = d_w(star_h(gauge_current_pq(Pr, Qr)))
        want = R * (1.0 / HBAR ** 2)
        assert (dsA.coefficient((0, 1)) - want).norm() == 0.0


class TestIntegration:
    def test_roundtrip(self, rng):
        for _ in range(5):
            chi = _rand_element(rng, HBAR)
            chi = chi - WeylElement.unit(HBAR, chi.coeffs.get((0, 0), 0.0))
            omega = WeylForm(CALC, 1, {DQ: dhat_q(chi), DP: dhat_p(chi)})
            assert (integrate_exact(omega) - chi).norm() == 0.0

    def test_not_closed_rejected(self):
        omega = WeylForm(CALC, 1, {DQ: P})
        with pytest.raises(GradeError, match="closed"):
            integrate_exact(omega)

    def test_degree_cutoff(self):
        chi = WeylElement.monomial(HBAR, 4, 3, 1.0)
        omega = WeylForm(CALC, 1, {DQ: dhat_q(chi), DP: dhat_p(chi)})
        with pytest.raises(GradeError, match="cutoff"):
            integrate_exact(omega, max_degree=6)
        assert (integrate_exact(omega, max_degree=7) - chi).norm() == 0.0

    def test_constant_normalized_away(self):
        omega = WeylForm(CALC, 1, {DQ: ONE})
        chi = integrate_exact(omega)
        assert chi.coeffs.get((0, 0), 0.0) == 0.0
        assert (chi - Q).norm() == 0.0


def flat_current(rng):
    # matched affine pair (equal cross couplings) gives d star A = 0
    k = [int(rng.integers(-4, 5)) / 4.0 for _ in range(5)]
    beta = k[4]
    Pa = P * (1.0 + k[0]) + Q * beta + ONE * k[1]
    Qa = P * beta + Q * (1.0 + k[2]) + ONE * k[3]
    return gauge_current_pq(Pa, Qa)


class TestTowerIdentity:
    def test_scalar_exact(self):
        rng = np.random.default_rng(12)
        for _ in range(6):
            A = [[flat_current(rng)]]
            chi = [[form0(_rand_element(rng, HBAR))]]
            rep = tower_identity_residual(A, chi)
            assert rep["entrywise_residual"] == 0.0
            assert rep["packaged_residual"] == 0.0

    def test_matrix_exact(self):
        rng = np.random.default_rng(21)
        A = [[flat_current(rng) for _ in range(2)] for _ in range(2)]
        chi = [[form0(_rand_element(rng, HBAR)) for _ in range(2)]
               for _ in range(2)]
        rep = tower_identity_residual(A, chi)
        assert rep["entrywise_residual"] == 0.0

    def test_identity_needs_flat_background(self):
        rng = np.random.default_rng(5)
        Pa = P + Q * 0.5     # unmatched couplings: d star A != 0
        Qa = Q
        A = [[gauge_current_pq(Pa, Qa)]]
        chi = [[form0(_rand_element(rng, HBAR))]]
        rep = tower_identity_residual(A, chi)
        assert rep["entrywise_residual"] > 1e-3
