"""Numerical toolkit for moment recovery in matrix algebras with
normalized traces: Schatten norms, cyclic-trace coefficient families,
norm-to-moment reconstruction, distribution matching and the analytic
machinery backing them.
"""

from .algebra import (
    SingularProfile,
    StarWord,
    adjoint,
    hermitian_apply,
    matrix_unit,
    normalized_trace,
    schatten_p_norm,
    schatten_pp,
    singular_profile,
    singular_values,
    tensor,
    word_trace,
)
from .combinatorics import (
    alpha_count,
    coefficient_root_report,
    generalized_binomial,
    moment_coefficient,
)
from .corners import (
    LambdaZeroError,
    corner_embed,
    cycle_polynomial_P,
    four_term_defect,
    psi_eval,
    psi_series,
    psi_tail_sign,
    recover_even_norm,
    recover_even_norm_of,
    truncation_remainder,
)
from .distribution import (
    AdjointOutsideSpanError,
    MomentTable,
    ProductOutsideSpanError,
    SpanMap,
    adjoint_defect,
    complete_isometry_probe,
    distributions_match,
    multiplicativity_defect,
    reconstruct_moment_table,
    selfadjoint_linearization_check,
    star_moments,
)
from .evenp import (
    PreconditionFailedError,
    alternating_moment,
    even_p_transfer_check,
    expand_even_norm,
)
from .gadgets import GadgetFamily, compact_family, full_cycle_family, verify_cyclic_trace
from .matrixio import parse_word, read_matrix_file, write_matrix_file
from .reconstruction import (
    ExtrapolationPlan,
    MomentEstimate,
    NonConvergenceError,
    NormOracle,
    ZeroCoefficientError,
    extrapolated_moment,
    fourier_moment_estimate,
    gram_deviation_coefficient,
    make_norm_oracle,
    recover_moment,
)
from .suite import ReportDocument, SuiteConfig, run_suite

__version__ = "0.1.0"

__all__ = [
    "SingularProfile",
    "StarWord",
    "adjoint",
    "hermitian_apply",
    "matrix_unit",
    "normalized_trace",
    "schatten_p_norm",
    "schatten_pp",
    "singular_profile",
    "singular_values",
    "tensor",
    "word_trace",
    "alpha_count",
    "coefficient_root_report",
    "generalized_binomial",
    "moment_coefficient",
    "GadgetFamily",
    "compact_family",
    "full_cycle_family",
    "verify_cyclic_trace",
    "ExtrapolationPlan",
    "MomentEstimate",
    "NonConvergenceError",
    "NormOracle",
    "ZeroCoefficientError",
    "extrapolated_moment",
    "fourier_moment_estimate",
    "gram_deviation_coefficient",
    "make_norm_oracle",
    "recover_moment",
    "LambdaZeroError",
    "corner_embed",
    "cycle_polynomial_P",
    "four_term_defect",
    "psi_eval",
    "psi_series",
    "psi_tail_sign",
    "recover_even_norm",
    "recover_even_norm_of",
    "truncation_remainder",
    "AdjointOutsideSpanError",
    "MomentTable",
    "ProductOutsideSpanError",
    "SpanMap",
    "adjoint_defect",
    "complete_isometry_probe",
    "distributions_match",
    "multiplicativity_defect",
    "reconstruct_moment_table",
    "selfadjoint_linearization_check",
    "star_moments",
    "PreconditionFailedError",
    "alternating_moment",
    "even_p_transfer_check",
    "expand_even_norm",
    "parse_word",
    "read_matrix_file",
    "write_matrix_file",
    "ReportDocument",
    "SuiteConfig",
    "run_suite",
]
