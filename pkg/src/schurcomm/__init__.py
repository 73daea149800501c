"""Finite-dimensional verification of commutator inequalities via Schur products.

The package builds the unit-grid spectral binning of a Hermitian ``D``,
scalar Schur multipliers with their row-norm bounds, and block matrices
over the bins, and uses them to check inequalities of the form

    ||[g(D), y]|| <= A_0 ||y|| + A_1 ||[D, y]|| + ... + A_n ||ad_D^n(y)||

on dense instances, reporting the slack ``lhs / rhs``.
"""

__version__ = "0.1.0"

from .binning import SpectralBinning, bin_index, build_binning
from .blocks import (
    BlockMatrix,
    ScalarMultiplier,
    assemble,
    bennett_bound_check,
    block_derivation,
    column_norm_blocks,
    row_norm,
    schur_scalar_product,
    to_blocks,
)
from .errors import *  # noqa: F401,F403
from .fourier import CircleModel, derivation_as_schur, exact_schur_identity
from .functions import (
    FunctionSpec,
    HolderBound,
    abs_multiplier,
    holder_multiplier,
    l1_linf_norm,
    lp_norm_of_derivative,
    verify_holder_bound,
)
from .inequalities import (
    PositiveInstance,
    check_abs_cont,
    check_abs_first,
    check_abs_higher,
    check_gbeta,
    check_holder,
    check_log_interp,
    check_lp,
    check_tilde_log,
)
from .operators import (
    BoundedOperator,
    HermitianOperator,
    apply_function,
    commutator,
    iterated_commutator,
    make_hermitian,
    operator_norm,
)
from .report import InequalityReport
