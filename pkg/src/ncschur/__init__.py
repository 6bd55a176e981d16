"""Realization theory for noncommutative Schur-class multipliers on the Fock space.

Truncated formal power series in noncommuting variables, colligations and
their transfer functions, noncommutative kernels, the lifted-norm model
realization and inner multipliers from homogeneous interpolation data.
"""
from .beurling_lax import (
    InnerCertificate,
    InnerSynthesis,
    SubspaceReport,
    interpolation_matrix,
    is_inner,
    membership_check,
    normalize_input_pair,
    subspace_check,
    synthesize_inner,
)
from .colligation import (
    Colligation,
    InputPair,
    OutputPair,
    classify,
    coisometry_completion,
    complete,
    gramian,
    is_strongly_stable,
    observability_operator,
    observability_rank,
    simulate,
    stability_iterates,
    transfer_function,
    unique_B_from_S,
    unitary_equivalence,
)
from .dbr_model import DbrColligation, build_dbr_colligation, reflection_angle, verify_realization
from .errors import (
    ConvergenceError,
    DimensionError,
    KernelMismatchError,
    NcSchurError,
    NotCoisometricError,
    NotContractiveError,
    NotObservableError,
    RankCollapseError,
    SingularGramianError,
    StabilityError,
)
from .fock_space import (
    FockBasis,
    eval_operator,
    mult_linear_operator,
    mult_operator_matrix,
    mult_operator_right,
    series_to_vector,
    shift_matrix,
    tau_matrix,
    vector_to_series,
)
from .formal_series import (
    FormalSeries,
    KernelTable,
    adjoint_series,
    functional_calculus,
    left_eval,
    multiply,
    right_multiply,
    szego_kernel,
    tau,
)
from .free_words import WordIndex, concat, enumerate_words, factorizations, transpose
from .kernels import (
    DbrSpace,
    bilateral_identity_residual,
    dbr_space,
    defect_kernel,
    dq_inequality_slack,
    factor_kernel,
    find_linking_isometry,
    kernel_KCA,
    kernel_KS,
    multiplier_estimate_slack,
    positivity_check,
)

__all__ = [
    "InnerCertificate",
    "InnerSynthesis",
    "SubspaceReport",
    "interpolation_matrix",
    "is_inner",
    "membership_check",
    "normalize_input_pair",
    "subspace_check",
    "synthesize_inner",
    "Colligation",
    "InputPair",
    "OutputPair",
    "classify",
    "coisometry_completion",
    "complete",
    "gramian",
    "is_strongly_stable",
    "observability_operator",
    "observability_rank",
    "simulate",
    "stability_iterates",
    "transfer_function",
    "unique_B_from_S",
    "unitary_equivalence",
    "DbrColligation",
    "build_dbr_colligation",
    "reflection_angle",
    "verify_realization",
    "ConvergenceError",
    "DimensionError",
    "KernelMismatchError",
    "NcSchurError",
    "NotCoisometricError",
    "NotContractiveError",
    "NotObservableError",
    "RankCollapseError",
    "SingularGramianError",
    "StabilityError",
    "FockBasis",
    "eval_operator",
    "mult_linear_operator",
    "mult_operator_matrix",
    "mult_operator_right",
    "series_to_vector",
    "shift_matrix",
    "tau_matrix",
    "vector_to_series",
    "FormalSeries",
    "KernelTable",
    "adjoint_series",
    "functional_calculus",
    "left_eval",
    "multiply",
    "right_multiply",
    "szego_kernel",
    "tau",
    "WordIndex",
    "concat",
    "enumerate_words",
    "factorizations",
    "transpose",
    "DbrSpace",
    "bilateral_identity_residual",
    "dbr_space",
    "defect_kernel",
    "dq_inequality_slack",
    "factor_kernel",
    "find_linking_isometry",
    "kernel_KCA",
    "kernel_KS",
    "multiplier_estimate_slack",
    "positivity_check",
]

__version__ = "0.1.0"
