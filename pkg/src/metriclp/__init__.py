"""Nonlinear Lebesgue spaces over discretized measure spaces.

Mappings from weighted atom collections into metric targets, compared by
the D_p family of metrics, with constructive approximation (finite-value
quantization, continuous and smooth relaxations) and a verification
suite that machine-checks the structural guarantees at desk scale.
"""

from .domain import (
    AtomSet,
    Domain,
    GridGeometry,
    MorphologyResult,
    TransitionField,
    face_adjacent_pairs,
    inner_closed_approx,
    is_purely_infinite,
    measure,
    outer_open_approx,
    urysohn,
)
from .errors import (
    CapabilityError,
    DataError,
    DimensionMismatchError,
    DomainMismatchError,
    GeometryError,
    InvalidPointError,
    MetricLpError,
    NonConvergenceError,
    SearchBudgetError,
)
from .maps import (
    BASE_LABEL,
    MeasurableMap,
    SimpleMap,
    check_p,
    constant_embed,
    differing_support,
    distance_to_base_field,
    dp_distance,
    equivalent,
    is_member,
    is_trivial,
    near_equivalent,
    pointwise_distance,
    restrict,
)
from .quantize import (
    ApproxReport,
    almost_simple_approx,
    countable_quantize,
    divergence_fixture,
    orthonormal_lower_bound,
    simple_approx_sup,
)
from .relax import (
    ContinuousField,
    adjacent_difference_report,
    boundary_difference_scan,
    continuous_from_simple,
    error_bound,
    smooth_from_simple,
    smoothstep,
    smoothstep_max_slope,
)
from .spaces import (
    CircleSpace,
    EuclideanSpace,
    HistogramSpace,
    MetricSpace,
    Point,
    SimplexSpace,
    SpdSpace,
    make_space,
    space_from_descriptor,
)
from .verify import (
    CauchySequenceSpec,
    DenseFamily,
    RieszFischerResult,
    SuiteConfig,
    SuiteResult,
    build_dense_family,
    fast_subsequence,
    incomplete_fixture,
    is_fast_cauchy,
    riesz_fischer_limit,
    run_theorem_suite,
    separability_probe,
)

__version__ = "0.1.0"

__all__ = [
    "AtomSet",
    "ApproxReport",
    "BASE_LABEL",
    "CapabilityError",
    "CauchySequenceSpec",
    "CircleSpace",
    "ContinuousField",
    "DataError",
    "DenseFamily",
    "DimensionMismatchError",
    "Domain",
    "DomainMismatchError",
    "EuclideanSpace",
    "GeometryError",
    "GridGeometry",
    "HistogramSpace",
    "InvalidPointError",
    "MeasurableMap",
    "MetricLpError",
    "MetricSpace",
    "MorphologyResult",
    "NonConvergenceError",
    "Point",
    "RieszFischerResult",
    "SearchBudgetError",
    "SimpleMap",
    "SimplexSpace",
    "SpdSpace",
    "SuiteConfig",
    "SuiteResult",
    "TransitionField",
    "adjacent_difference_report",
    "almost_simple_approx",
    "boundary_difference_scan",
    "build_dense_family",
    "check_p",
    "constant_embed",
    "distance_to_base_field",
    "continuous_from_simple",
    "countable_quantize",
    "differing_support",
    "divergence_fixture",
    "dp_distance",
    "equivalent",
    "error_bound",
    "face_adjacent_pairs",
    "fast_subsequence",
    "incomplete_fixture",
    "inner_closed_approx",
    "is_fast_cauchy",
    "is_member",
    "is_purely_infinite",
    "is_trivial",
    "make_space",
    "measure",
    "near_equivalent",
    "orthonormal_lower_bound",
    "outer_open_approx",
    "pointwise_distance",
    "restrict",
    "riesz_fischer_limit",
    "run_theorem_suite",
    "separability_probe",
    "simple_approx_sup",
    "smooth_from_simple",
    "smoothstep",
    "smoothstep_max_slope",
    "space_from_descriptor",
    "urysohn",
]
