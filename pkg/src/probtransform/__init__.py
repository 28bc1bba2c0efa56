"""Probability relations under sequential generalized measurements.

Exact measurement calculus (POVMs, Kraus instruments, sequential statistics,
interference coefficients) alongside a relative-frequency simulator of
context transitions, so the two descriptions can be checked against each
other.
"""

__version__ = "0.1.0"

from .errors import (
    BadWeights,
    DegenerateOverlap,
    DimMismatch,
    InfeasibleCounts,
    InvalidModel,
    InvariantViolation,
    NotHermitian,
    NotOrthogonal,
    NotPsd,
    NotUnit,
    ProbTransformError,
    ScenarioError,
    UnknownLabel,
    ZeroProbabilityOutcome,
)
from .frequency import (
    ContextModel,
    EnsembleCounts,
    FrequencyReport,
    ModelKind,
    convergence_study,
    double_stochastic_check,
    frequency_report,
    observable_lambda,
    simulate,
)
from .interference import (
    Classification,
    Kind,
    LambdaReport,
    classify_transformation,
    lambda_bounds,
    lambda_report,
    mixture_rule,
    projective_lambda,
    superposition_rule,
)
from .measurement import (
    KrausChannel,
    Povm,
    filter_povm,
    posterior,
    povm_from_channel,
    probability,
    unconditional_posterior,
)
from .operators import DEFAULT_TOL, adjoint, hermitian_eigen, psd_sqrt, trace
from .sequential import SequentialResult, quantum_bayes_check, reversed_joint, sequential_joint
from .states import DensityOperator, PureState, basis_state, mix, pure_to_density, superpose
