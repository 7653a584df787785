"""Sparse kernel expansions of initial/boundary data over fractional heat
and fractional Poisson kernel dictionaries, lifted to series solutions on
the upper half-plane."""

from .quadrature import (
    ConvergenceError,
    QuadratureError,
    QuadratureSpec,
    TruncationError,
    integrate_adaptive,
    integrate_halfline_decaying,
    integrate_oscillatory_cosine,
)
from .kernels import (
    HalfSpacePoint,
    KernelFamily,
    g_sigma,
    heat_kernel,
    heat_kernel_batch,
    heat_kernel_envelope_check,
    poisson_kernel,
    poisson_normalizer,
)
from .rkhs import (
    DataFunction,
    GramContext,
    data_kernel_inner,
    gram,
    kernel_slice,
    norm_sq,
    normalized_objective_k1,
)
from .greedy import (
    DecompositionState,
    DegenerateCandidateError,
    DictionaryExhaustedError,
    SearchConfig,
    SparseRepresentation,
    coefficients_from_orthonormal,
    decompose,
    gram_schmidt_update,
    preortho_objective,
    select_next,
)
from .solution import (
    SolutionField,
    evaluate_grid,
    evaluate_solution,
    isometry_report,
)
from .oracles import (
    OracleGrid,
    convolution_gram_oracle,
    exhaustive_argmax_oracle,
    functional_gs_oracle,
    plancherel_gram_oracle,
)
from .datasets import example1, example2, example1_search, example2_search
from .expressions import ExpressionError, parse_expression

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "QuadratureError",
    "QuadratureSpec",
    "TruncationError",
    "integrate_adaptive",
    "integrate_halfline_decaying",
    "integrate_oscillatory_cosine",
    "HalfSpacePoint",
    "KernelFamily",
    "g_sigma",
    "heat_kernel",
    "heat_kernel_batch",
    "heat_kernel_envelope_check",
    "poisson_kernel",
    "poisson_normalizer",
    "DataFunction",
    "GramContext",
    "data_kernel_inner",
    "gram",
    "kernel_slice",
    "norm_sq",
    "normalized_objective_k1",
    "DecompositionState",
    "DegenerateCandidateError",
    "DictionaryExhaustedError",
    "SearchConfig",
    "SparseRepresentation",
    "coefficients_from_orthonormal",
    "decompose",
    "gram_schmidt_update",
    "preortho_objective",
    "select_next",
    "SolutionField",
    "evaluate_grid",
    "evaluate_solution",
    "isometry_report",
    "OracleGrid",
    "convolution_gram_oracle",
    "exhaustive_argmax_oracle",
    "functional_gs_oracle",
    "plancherel_gram_oracle",
    "example1",
    "example2",
    "example1_search",
    "example2_search",
    "ExpressionError",
    "parse_expression",
]
