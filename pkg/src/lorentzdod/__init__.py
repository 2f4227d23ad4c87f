"""Lorentzian affine space as an open Schubert cell of the isotropic-line Grassmannian.

Affine deformations of Schottky subgroups of O(n-1,1), their limit sets in
F_1, thickenings, and a constructive search for the domain of proper
discontinuity.
"""

from .chart import (
    Frame,
    apply,
    chart_to_flag,
    embed_affine,
    flag_to_chart,
    linear_part,
    shear,
    shear_compose_check,
    transvection,
)
from .domain import (
    AuditReport,
    NullHyperplaneSet,
    domain_margin,
    equivariance_audit,
    find_domain_point,
    properness_audit,
    thickening_in_chart,
)
from .errors import (
    AmbiguousClassification,
    EmptySample,
    GeometryError,
    NotInGroup,
    NotIsotropic,
    NotOpposite,
    NotRegular,
    PingPongFailure,
    SearchFailed,
)
from .estimators import LorentzChart, ThickeningDomain
from .geometry import (
    IsotropicLine,
    LinePosition,
    QuadraticSpace,
    chordal_distance,
    classify_pair,
    ellipsoid_sample,
    make_space,
    quadric_margin,
)
from .groups import (
    AffineIsometry,
    SchottkyGroup,
    boost,
    desk_instance,
    evaluate,
    scale_group,
    schottky,
    words,
)
from .limitset import (
    LimitSample,
    attracting_line,
    containment_report,
    limit_sample,
    scaling_check,
)

__version__ = "0.1.0"
