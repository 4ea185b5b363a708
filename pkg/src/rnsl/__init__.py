"""Random-normed numerics: scalars and vectors over finite probability
spaces, transform calculus for exponentially bounded curves, and operator
families checked against their generation conditions.
"""

from .acp import (
    AcpProblem,
    Trajectory,
    direct_value_problem,
    initial_vector,
    resolvent_seeded_problem,
    rk4_oracle,
    solve_acp,
)
from .calculus import (
    CurveSampler,
    QuadratureResult,
    WeightedIntegralResult,
    damped_weighted_integral,
    derivative,
    improper_integral,
    riemann_integral,
)
from .errors import (
    BoundViolated,
    CertificateMissing,
    CoefficientOverflow,
    DimMismatch,
    DivisionByZeroOnAtom,
    EmptyAtomList,
    EmptyFamily,
    EtaInSpectrum,
    EtaNotInGxi,
    ExtendedValueError,
    InitialValueMismatch,
    MaxPanelsExceeded,
    MissingSuiteData,
    NegativeTime,
    NonCommuting,
    NonFiniteValue,
    NonPositiveProbability,
    NonPositiveTime,
    NotInjective,
    PowerIterationDiverged,
    ProbabilitiesDoNotSumToOne,
    RnslError,
    SchemaError,
    SolveFailed,
    SpaceMismatch,
    StepUnderflow,
    UnknownSuite,
)
from .l0 import (
    L0Scalar,
    L0Set,
    ProbabilitySpace,
    distance,
    expectation,
    indicator,
    lattice,
    level_set,
    make_space,
    pointwise,
)
from .laplace import (
    LaplaceSpec,
    TransformDerivativeProvider,
    TransformEqualityReport,
    laplace_derivative,
    laplace_derivative_scaled,
    laplace_transform,
    make_laplace_spec,
    post_widder,
    provider_from_curve,
    transforms_equal,
)
from .rn import (
    ExponentialBound,
    InjectivityReport,
    L0Operator,
    RnVector,
    check_injective,
    l0_norm,
    matrix_exp,
    op_apply,
    op_norm,
    vector_distance,
)
from .scenario import Scenario, load_scenario, scenario_from_dict
from .semigroup import (
    AbelLimitReport,
    CSemigroup,
    ResolventReport,
    abel_limit_check,
    c_resolvent_direct,
    c_resolvent_integral,
    estimate_generator,
    evaluate,
    hille_yosida_report,
    make_matrix_semigroup,
    make_sampled_semigroup,
    resolvent_operator,
    transform_identity_gap,
    yosida_approximant,
)
from .suites import SUITE_NAMES, emit_plot_data, run_scenario

__all__ = [
    "AbelLimitReport",
    "AcpProblem",
    "BoundViolated",
    "CSemigroup",
    "CertificateMissing",
    "CoefficientOverflow",
    "CurveSampler",
    "DimMismatch",
    "DivisionByZeroOnAtom",
    "EmptyAtomList",
    "EmptyFamily",
    "EtaInSpectrum",
    "EtaNotInGxi",
    "ExponentialBound",
    "ExtendedValueError",
    "InitialValueMismatch",
    "InjectivityReport",
    "L0Operator",
    "L0Scalar",
    "L0Set",
    "LaplaceSpec",
    "MaxPanelsExceeded",
    "MissingSuiteData",
    "NegativeTime",
    "NonCommuting",
    "NonFiniteValue",
    "NonPositiveProbability",
    "NonPositiveTime",
    "NotInjective",
    "PowerIterationDiverged",
    "ProbabilitiesDoNotSumToOne",
    "ProbabilitySpace",
    "QuadratureResult",
    "ResolventReport",
    "RnVector",
    "RnslError",
    "SUITE_NAMES",
    "SchemaError",
    "SolveFailed",
    "SpaceMismatch",
    "StepUnderflow",
    "UnknownSuite",
    "Scenario",
    "Trajectory",
    "TransformDerivativeProvider",
    "TransformEqualityReport",
    "WeightedIntegralResult",
    "abel_limit_check",
    "c_resolvent_direct",
    "c_resolvent_integral",
    "check_injective",
    "damped_weighted_integral",
    "derivative",
    "direct_value_problem",
    "distance",
    "emit_plot_data",
    "estimate_generator",
    "evaluate",
    "expectation",
    "hille_yosida_report",
    "improper_integral",
    "indicator",
    "initial_vector",
    "l0_norm",
    "laplace_derivative",
    "laplace_derivative_scaled",
    "laplace_transform",
    "lattice",
    "level_set",
    "load_scenario",
    "make_laplace_spec",
    "make_matrix_semigroup",
    "make_sampled_semigroup",
    "make_space",
    "matrix_exp",
    "op_apply",
    "op_norm",
    "pointwise",
    "post_widder",
    "provider_from_curve",
    "resolvent_operator",
    "resolvent_seeded_problem",
    "riemann_integral",
    "rk4_oracle",
    "run_scenario",
    "scenario_from_dict",
    "solve_acp",
    "transform_identity_gap",
    "transforms_equal",
    "vector_distance",
    "yosida_approximant",
]
