"""Generalized N-means on finite atomic measure spaces.

Forward means and their inverse kernel operators, marginal reductions of
symmetric densities, the section lower-bound check and the bound constants
that go with it, and builders for the classical counterexamples.
"""

from .bounds import (
    BoundTable,
    BoundsReport,
    bound_table,
    c_inf_bound,
    c_r_bound,
    ess_bounds,
    lr_norm,
    random_bounds_suite,
    verify_bounds,
)
from .counterexamples import (
    ConvergenceTrace,
    build_ex1,
    build_ex2,
    build_ex3,
    build_ex3_trace,
    build_ex4,
    ex3_partial_sums,
)
from .densities import (
    SectionBoundReport,
    SymmetricDensity,
    check_cond27,
    check_section_bound,
    clip_renormalize,
    expectation_identity_check,
    l1_distance,
    make_density,
    normalize,
    o_ell_member,
    perturb_theorem14,
    perturb_toward_product,
    product_density,
    random_symmetric_density,
    reduce,
    uniform_rho,
)
from .errors import (
    ArityError,
    BadExponent,
    BadGrid,
    BudgetExceeded,
    SectionBoundFails,
    DuplicateLabel,
    EmptySpace,
    GenMeanError,
    IndexOutOfRange,
    InvalidInput,
    NonPositiveRho,
    NonPositiveWeight,
    NotADensity,
    NotAGeneralizedMean,
    OrderMismatch,
    ShapeMismatch,
)
from .measure_space import (
    GridFunction,
    MeasureSpace,
    constant,
    entry_budget,
    get_budget,
    integrate,
    make_space,
    product_weight,
    uniform_space,
)
from .operators import (
    AnchorSelection,
    KernelRecovery,
    g_mn,
    is_generalized_mean,
    k_1n,
    k_mn,
    recover_kernel,
    symmetrize,
)

__version__ = "0.1.0"

__all__ = [
    "BoundTable",
    "BoundsReport",
    "bound_table",
    "c_inf_bound",
    "c_r_bound",
    "ess_bounds",
    "lr_norm",
    "random_bounds_suite",
    "verify_bounds",
    "ConvergenceTrace",
    "build_ex1",
    "build_ex2",
    "build_ex3",
    "build_ex3_trace",
    "build_ex4",
    "ex3_partial_sums",
    "SectionBoundReport",
    "SymmetricDensity",
    "check_cond27",
    "check_section_bound",
    "clip_renormalize",
    "expectation_identity_check",
    "l1_distance",
    "make_density",
    "normalize",
    "o_ell_member",
    "perturb_theorem14",
    "perturb_toward_product",
    "product_density",
    "random_symmetric_density",
    "reduce",
    "uniform_rho",
    "ArityError",
    "BadExponent",
    "BadGrid",
    "BudgetExceeded",
    "SectionBoundFails",
    "DuplicateLabel",
    "EmptySpace",
    "GenMeanError",
    "IndexOutOfRange",
    "InvalidInput",
    "NonPositiveRho",
    "NonPositiveWeight",
    "NotADensity",
    "NotAGeneralizedMean",
    "OrderMismatch",
    "ShapeMismatch",
    "GridFunction",
    "MeasureSpace",
    "constant",
    "entry_budget",
    "get_budget",
    "integrate",
    "make_space",
    "product_weight",
    "uniform_space",
    "AnchorSelection",
    "KernelRecovery",
    "g_mn",
    "is_generalized_mean",
    "k_1n",
    "k_mn",
    "recover_kernel",
    "symmetrize",
]
