"""vopcert: exact certificates of norm-robust efficiency for vector optimization.

Everything is rational arithmetic end to end: certificates are exact, and
every verdict either carries a finite witness or says why it abstained.
"""

__version__ = "0.1.0"

from .certify import (
    CONES_COINCIDE,
    CONIC_GATE,
    DISCRETIZED,
    INCONCLUSIVE,
    NECESSARY_INTERSECTION,
    NECESSARY_SPAN,
    NOT_ROBUST_CERTIFIED,
    ROBUST_CERTIFIED,
    SUFFICIENT_INTERSECTION,
    SUFFICIENT_SPAN,
    ConditionReport,
    EfficiencyResult,
    Verdict,
    VOPInstance,
    certify,
    check_necessary_intersection,
    check_span_forms,
    check_sufficient_intersection,
    efficiency_check,
)
from .errors import (
    CapabilityError,
    ConeValidationError,
    ConsistencyError,
    EmptyInteriorError,
    InfeasiblePointError,
    InstanceFormatError,
    NotPointedError,
    TrivialConeError,
    VopcertError,
)
from .funcs import (
    MAX,
    MIN,
    SMOOTH,
    AffinePiece,
    PieceFn,
    QuadPiece,
    SubdiffPolytope,
    clarke_subdiff_component,
    kconvexity_check,
    scalarized_subdiff,
)
from .gapfn import gap_necessary_check, gap_query, zero_in_gap
from .geometry import (
    ConicBlockSet,
    DiscretizedSet,
    OrderingCone,
    PolyhedralSet,
    g1_cone,
    g2_cone,
    normal_cone,
    tangent_cone,
    validate_ordering_cone,
)
from .instances import (
    ParsedInstance,
    describe_document,
    oracle_document,
    parse_instance,
    parse_instance_text,
    report_document,
    verify_report,
)
from .oracle import (
    NO_COUNTEREXAMPLE,
    REFUTED,
    OracleReport,
    PerturbationMatrix,
    RadiusEstimate,
    radius_estimate,
    robust_oracle,
)
from .rationals import RationalParseError, format_rational, parse_rational

__all__ = [
    "AffinePiece",
    "CapabilityError",
    "ConditionReport",
    "CONES_COINCIDE",
    "CONIC_GATE",
    "ConeValidationError",
    "ConicBlockSet",
    "ConsistencyError",
    "DISCRETIZED",
    "DiscretizedSet",
    "EfficiencyResult",
    "EmptyInteriorError",
    "INCONCLUSIVE",
    "InfeasiblePointError",
    "InstanceFormatError",
    "MAX",
    "MIN",
    "NECESSARY_INTERSECTION",
    "NECESSARY_SPAN",
    "NO_COUNTEREXAMPLE",
    "NOT_ROBUST_CERTIFIED",
    "NotPointedError",
    "OracleReport",
    "OrderingCone",
    "ParsedInstance",
    "PerturbationMatrix",
    "PieceFn",
    "PolyhedralSet",
    "QuadPiece",
    "REFUTED",
    "ROBUST_CERTIFIED",
    "RadiusEstimate",
    "RationalParseError",
    "SMOOTH",
    "SUFFICIENT_INTERSECTION",
    "SUFFICIENT_SPAN",
    "SubdiffPolytope",
    "TrivialConeError",
    "VOPInstance",
    "Verdict",
    "VopcertError",
    "certify",
    "check_necessary_intersection",
    "check_span_forms",
    "check_sufficient_intersection",
    "clarke_subdiff_component",
    "describe_document",
    "efficiency_check",
    "format_rational",
    "g1_cone",
    "g2_cone",
    "gap_necessary_check",
    "gap_query",
    "kconvexity_check",
    "normal_cone",
    "oracle_document",
    "parse_instance",
    "parse_instance_text",
    "parse_rational",
    "radius_estimate",
    "report_document",
    "robust_oracle",
    "scalarized_subdiff",
    "tangent_cone",
    "validate_ordering_cone",
    "verify_report",
    "zero_in_gap",
]
