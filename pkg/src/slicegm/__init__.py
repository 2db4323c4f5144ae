"""Exact computations with locally nilpotent derivations that admit a slice.

From an LND D with slice s on a polynomial ring, build the semisimple
derivation N s D, its torus action, and a certified linearization.
"""

from .action import (
    ActionImages,
    alpha_action,
    alpha_nice,
    alpha_via_expansion,
    beta_freudenburg,
    build_partial,
    compare_actions,
    infinitesimal_generator,
    semisimplicity_witness,
    verify_group_law,
)
from .deriv import Derivation, apply, check_semisimple_on, is_lnd, is_nice, iterate, verify_slice
from .flow import exp_derivation, exp_formal, kernel_projection, slice_expansion, translation_identity_check
from .ideal import GroebnerBasis, MonomialOrder, buchberger, derivation_descends, normal_form, quotient_kernel_basis
from .kernel import kernel_basis, kernel_intersection, ml_obstruction_report
from .linearize import (
    build_linearizer,
    check_condition_three,
    check_condition_two,
    factor_diagonal,
    kernel_criterion_check,
    slice_conjugate,
    wang_normal_form,
)
from .morph import AutomorphismPair, Endomorphism, apply_endo, compose, conjugate_derivation, invert_triangular, verify_automorphism
from .parse import ProblemSpec, format_polynomial, parse_polynomial, parse_problem
from .ring import LaurentPoly, Polynomial, RationalMatrix, VarContext, solve_nullspace

__version__ = "0.1.0"
