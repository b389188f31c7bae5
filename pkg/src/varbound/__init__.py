"""Variance-product uncertainty bounds for pure states in finite dimension."""

from .basisopt import (
    BasisParams,
    BoundKind,
    OptimizerConfig,
    OptResult,
    l1_l2_combined,
    objective,
    optimize,
    unitary_from_params,
)
from .bounds import (
    BoundReport,
    callebaut_product,
    combined_bound,
    full_report,
    mbp_bound,
    mbp_bound_literal,
    milne_product,
    robertson_bound,
    schrodinger_bound,
)
from .qcore import (
    DimensionError,
    HermitianObservable,
    OrthonormalBasis,
    PureState,
    ValidationError,
    amplitudes,
    anticommutator_expectation,
    centered_apply,
    commutator_expectation,
    expectation,
    inner,
    variance,
)
from .scenarios import (
    SweepRow,
    SweepSpec,
    pauli_operators,
    random_hermitian,
    random_state,
    spin1_operators,
    sweep,
    theta_state,
)

__version__ = "0.1.0"
