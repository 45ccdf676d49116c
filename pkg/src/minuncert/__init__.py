"""Heisenberg-Robertson uncertainty audits and saturating mixed states."""

from .angular_momentum import SpinSpace, angular_momentum_ops, spin_pair_example
from .counterexample import (
    EigenketCheck,
    SaturatingFamily,
    eigenket_check,
    find_saturating_mixed_states,
    is_normal,
    three_level_example,
    scan_lambda,
)
from .errors import DimensionError, InputError, MinUncertError, NumericalError, TruncationError
from .gaussian import (
    FockTruncation,
    GaussianParams,
    displaced_gaussian,
    gaussian_moments_exact,
    quadratic_observables,
    gaussian_mixture_example,
    quadrature_ops,
)
from .operator_core import (
    DensityMatrix,
    HermitianOperator,
    UncertaintyReport,
    commutator,
    commutator_bound,
    expectation,
    is_pure,
    purity,
    spread,
    uncertainty_report,
)
from .search import SearchConfig, SearchResult, gradient_check, search_saturating_state

__version__ = "0.1.0"
