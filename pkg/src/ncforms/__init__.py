"""Differential forms over deformed coordinate algebras.

Lattice, semi-discrete and operator-coefficient calculi with generalized
Hodge operators, gauge currents and conserved-current towers, plus the
integrable lattice model their continuum limit produces.
"""

__version__ = "0.1.0"

from .errors import (NCFormsError, CoefficientKindError, WindowMismatchError,
                     CalculusMismatchError, GradeError, SingularityError,
                     ObstructionError, NewtonDivergenceError,
                     OverflowAbortError, ConfigError)
from .coeff import ExpSum, GridFunction
from .calculus import (CalculusSpec, Form, MetricTensor, lattice_calculus,
                       semi_discrete_calculus, d, wedge, star, star_inv,
                       scalar_product, epsilon_constants, metric_components,
                       quantum_plane_check, axiom_suite)
from .harmonic import (MatrixForm, TowerReport, gauge_current, curvature,
                       field_residual, solve_field_equation, integrate_closed,
                       charges, charge_drift, conserved_tower)
from .toda import (TodaState, toda_rhs, derive_toda, simulate, wave_limit,
                   amplitude_limit)
from .shiftcalc import (ShiftCalculusSpec, RightForm, Affine, d_ab,
                        bimodule_move, to_left, to_right, mul_left, mul_right,
                        wedge_ab, star_theta, field_residual_ab,
                        derivation_check_A, shift_suite)
from .weyl import (WeylElement, WeylCalculus, WeylForm, EpsilonTable,
                   weyl_mul, commutator, dagger, dhat_q, dhat_p, d_w, wedge_w,
                   star_h, star_inv_h, scalar_product_w, field_residual_pq,
                   gauge_current_pq, integrate_exact, tower_identity_residual,
                   measured_epsilon, epsilon_suite, weyl_suite,
                   automorphism_catalog)
from . import kernels

__all__ = [n for n in dir() if not n.startswith("_")]
