"""Numerical verification of higher-order convexity and Hornich-Hlawka type inequalities."""

from ._common import DEFAULT_TOL, Verdict, passes
from ._kernels import BACKEND
from .cone import (
    ConePoint,
    MultiFunctionSpec,
    bernstein_pq_closed_form,
    bernstein_pq_values,
    cm_difference_probe,
    composed,
    cone_iterated_difference,
    double_divided_difference,
    double_divided_difference_nested,
    exp_linear,
    frechet_min,
    neg_sqrt_product,
    riesz_kernel,
    sz_alternating_sum,
    sz_bounds,
)
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    DomainError,
    HHVerifyError,
    HypothesisViolation,
    InvalidCharacter,
    NegativeDeterminant,
    SingularityError,
    SingularMatrix,
    SizeLimit,
    UnknownInequality,
    UnknownTarget,
)
from .harness import (
    CampaignReport,
    SearchConfig,
    Witness,
    replay_report,
    replay_witness,
    run_campaign,
    sample_psd,
    search_counterexample,
)
from .inequalities import (
    AlternatingSumSpec,
    Functional,
    derivative_formula_check,
    det_alternating_difference,
    det_hlawka_with_base_margin,
    det_shift_functional,
    detrho_alternating_sum,
    esym_hlawka_margin,
    generalized_sk_margin,
    immanant_hh_margin,
    lemma_main_margin,
    minkowski_like_margin,
    norm_functional,
    operator_hh_margin,
    scalar_shift_functional,
    serre_reverse_margin,
    va_margin,
)
from .matrix import (
    SIGN,
    TRIVIAL,
    CharacterSpec,
    LoewnerMargin,
    SymMatrix,
    compound_matrix,
    det,
    esym,
    esym_minors,
    immanant,
    loewner_margin,
    mixed_tensor,
    permanent,
    permanent_naive,
    tensor_power,
)
from .scalar import (
    CATALOG,
    FunctionSpec,
    Interval,
    bernstein_function,
    bernstein_poly,
    divided_difference,
    eval_function,
    get_function,
    iterated_difference,
    n_convexity_probe,
    popoviciu_sum,
    positive_difference_probe,
)

__version__ = "0.1.0"

__all__ = [
    "AlternatingSumSpec",
    "BACKEND",
    "CATALOG",
    "CampaignReport",
    "CharacterSpec",
    "ConePoint",
    "DEFAULT_TOL",
    "DegenerateInput",
    "DimensionMismatch",
    "DomainError",
    "FunctionSpec",
    "Functional",
    "HHVerifyError",
    "HypothesisViolation",
    "Interval",
    "InvalidCharacter",
    "LoewnerMargin",
    "MultiFunctionSpec",
    "NegativeDeterminant",
    "SIGN",
    "SearchConfig",
    "SingularMatrix",
    "SingularityError",
    "SizeLimit",
    "SymMatrix",
    "TRIVIAL",
    "UnknownInequality",
    "UnknownTarget",
    "Verdict",
    "Witness",
    "bernstein_function",
    "bernstein_poly",
    "bernstein_pq_closed_form",
    "bernstein_pq_values",
    "cm_difference_probe",
    "composed",
    "compound_matrix",
    "cone_iterated_difference",
    "derivative_formula_check",
    "det",
    "det_alternating_difference",
    "det_hlawka_with_base_margin",
    "det_shift_functional",
    "detrho_alternating_sum",
    "divided_difference",
    "double_divided_difference",
    "double_divided_difference_nested",
    "esym",
    "esym_hlawka_margin",
    "esym_minors",
    "eval_function",
    "exp_linear",
    "frechet_min",
    "generalized_sk_margin",
    "get_function",
    "immanant",
    "immanant_hh_margin",
    "iterated_difference",
    "lemma_main_margin",
    "loewner_margin",
    "minkowski_like_margin",
    "mixed_tensor",
    "n_convexity_probe",
    "neg_sqrt_product",
    "norm_functional",
    "operator_hh_margin",
    "passes",
    "permanent",
    "permanent_naive",
    "popoviciu_sum",
    "positive_difference_probe",
    "replay_report",
    "replay_witness",
    "riesz_kernel",
    "run_campaign",
    "sample_psd",
    "scalar_shift_functional",
    "search_counterexample",
    "serre_reverse_margin",
    "sz_alternating_sum",
    "sz_bounds",
    "tensor_power",
    "va_margin",
]
