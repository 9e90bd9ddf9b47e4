"""Centroaffine geometry of homogeneous level sets: metrics, boundary
regularity, and completeness certificates."""

from .chart import (
    ChartFrame,
    ChartPoint,
    centroaffine_metric_ambient,
    chart_metric,
    chart_metric_consistency,
    classify,
    cone_identity_residual,
    lorentz_identity_residuals,
    lorentz_metric,
    make_chart,
    radial_projection,
    slice_chart,
    tangent_basis_at,
)
from .completeness import (
    AnalysisConfig,
    CompletenessVerdict,
    CurveTrace,
    completeness_verdict,
    concavity_test,
    cubic_segment_test,
    curve_length,
    geodesic_shoot,
    log_length_bound,
    n1_monomial_test,
)
from .boundary import (
    BoundaryPoint,
    boundary_scan,
    compactness_bound,
    gen_perturb,
    lorentz_extension_check,
    regular_boundary_check,
    regularity_report,
)
from .forms import Signature, SymmetricForm
from .homogeneous import (
    HomogeneousPolynomial,
    SmoothHomogeneousMap,
    UnivariateRestriction,
    euler_residual,
    polarization,
    position_identity_residual,
    restrict_to_line,
)
from .structure import (
    ConnectionSample,
    CubicFormSample,
    cubic_form,
    curvature_residual,
    fund_equation_residual,
    gauss_split,
    volume_form,
    volume_parallel_residual,
)
from .errors import (
    ConsistencyError,
    DegenerateFrameError,
    DomainError,
    MixedDegreeError,
    ParseError,
    UnboundedRayError,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "BoundaryPoint",
    "ChartFrame",
    "ChartPoint",
    "CompletenessVerdict",
    "ConnectionSample",
    "ConsistencyError",
    "CubicFormSample",
    "CurveTrace",
    "DegenerateFrameError",
    "DomainError",
    "HomogeneousPolynomial",
    "MixedDegreeError",
    "ParseError",
    "Signature",
    "SmoothHomogeneousMap",
    "SymmetricForm",
    "UnboundedRayError",
    "UnivariateRestriction",
    "boundary_scan",
    "centroaffine_metric_ambient",
    "chart_metric",
    "chart_metric_consistency",
    "classify",
    "compactness_bound",
    "completeness_verdict",
    "concavity_test",
    "cone_identity_residual",
    "cubic_form",
    "cubic_segment_test",
    "curvature_residual",
    "curve_length",
    "euler_residual",
    "fund_equation_residual",
    "gauss_split",
    "gen_perturb",
    "geodesic_shoot",
    "log_length_bound",
    "lorentz_extension_check",
    "lorentz_identity_residuals",
    "lorentz_metric",
    "make_chart",
    "n1_monomial_test",
    "polarization",
    "position_identity_residual",
    "radial_projection",
    "regular_boundary_check",
    "regularity_report",
    "restrict_to_line",
    "slice_chart",
    "tangent_basis_at",
    "volume_form",
    "volume_parallel_residual",
]
