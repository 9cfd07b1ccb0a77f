"""Exact permanents, degree-M and limit Bethe permanents, and the
pseudocodeword vectors built from them."""

__version__ = "0.1.0"

from .bethe import BetheResult, bethe_cofactor_inequality, bethe_free_energy, minimize_bethe
from .lifting import (
    AverageResult,
    BudgetExceeded,
    LiftingAssignment,
    degree_M_bethe_perm,
    degree_M_bethe_perm_canonical,
    enumerate_liftings,
    lift,
    q,
    q2_closed,
    t3,
    t3_closed,
    that3,
    that3_closed,
)
from .matrix import ExponentMatrix, ParseError, expand_exponents, parse_dense, parse_exponents, row_support, submatrix
from .permanent import (
    block_matrix_permanent,
    merge_columns_by_unit_row,
    perm_subset_expansion,
    permanent_naive,
    permanent_ryser,
    reduce_block_identity,
)
from .pseudo import (
    ConeReport,
    PseudoVector,
    awgnc_pseudo_weight,
    bethe_perm_vector,
    bethe_perm_vector_M,
    in_fundamental_cone,
    min_pseudo_weight_bound,
    perm_vector,
    proportional,
    root_M_scale,
)
