import math

import numpy as np
import pytest

from centroaffine import (
    AnalysisConfig,
    CurveTrace,
    HomogeneousPolynomial,
    completeness_verdict,
    concavity_test,
    cubic_segment_test,
    curve_length,
    geodesic_shoot,
    log_length_bound,
    make_chart,
    n1_monomial_test,
)
from centroaffine.catalog import analytic_example, nonclosed_example
from centroaffine.completeness import monomial_face_check

CURVE = HomogeneousPolynomial.parse("x^3 - x*y^2")
MONOMIAL = HomogeneousPolynomial.parse("x^2*y")

FAST = AnalysisConfig(boundary_dirs=40, segment_lines=200, concavity_samples=120)


# -- segment test -----------------------------------------------------------------


def test_segment_line_constant_f0():
    frame = make_chart(CURVE, [1, 0])
    result = cubic_segment_test(frame, n_lines=2, seed=0)
    line = result.lines[0]
    # restriction 1 - t^2 gives f0 = 2 (1 - t^2)(-2) - 4 t^2 = -4 identically
    assert abs(line.max_f0 + 4.0) < 1e-12
    assert abs(line.f0_left + 4.0) < 1e-10 and abs(line.f0_right + 4.0) < 1e-10
    assert line.interval == (-1.0, 1.0)
    assert line.endpoint_identity_defect < 1e-10
    assert line.monotone_defect < 1e-12
    assert result.passed


def test_segment_catalog_pass(catalog_frames):
    for poly, frame in catalog_frames.values():
        result = cubic_segment_test(frame, n_lines=300, seed=1)
        assert result.passed and not result.closedness_failures
        for line in result.lines:
            assert line.f0_left <= 1e-9 and line.f0_right <= 1e-9


def test_segment_structural_identity(catalog_frames):
    # the derivative of f0 equals 2 h0 h0''' as exact coefficient algebra
    for poly, frame in catalog_frames.values():
        result = cubic_segment_test(frame, n_lines=60, seed=2)
        assert max(l.monotone_defect for l in result.lines) <= 1e-10


def test_segment_nonclosed_piece_reports_witness():
    entry = nonclosed_example()
    poly, frame = entry.build()
    result = cubic_segment_test(frame, n_lines=40, seed=0)
    assert result.closedness_failures and not result.passed


def test_segment_rejects_non_cubic():
    quartic = HomogeneousPolynomial.parse("x^2*y*z")
    frame = make_chart(quartic, [1, 1, 1])
    with pytest.raises(ValueError):
        cubic_segment_test(frame, n_lines=10)


def test_segment_root_concave_on_grid(catalog_frames):
    # on every passing line the square root of the restriction has
    # nonpositive second differences across the positivity interval
    from centroaffine.homogeneous import restrict_to_line

    for poly, frame in catalog_frames.values():
        result = cubic_segment_test(frame, n_lines=8, seed=3)
        for line in result.lines:
            a, b = line.interval
            x0 = frame.point(line.base_coords)
            v = line.direction @ frame.basis
            r = restrict_to_line(poly, x0, v)
            ts = np.linspace(a, b, 1002)[1:-1]
            vals = np.sqrt(np.maximum([r.value(t) for t in ts], 0.0))
            second = vals[2:] - 2.0 * vals[1:-1] + vals[:-2]
            assert second.max() <= 1e-10


# -- concavity --------------------------------------------------------------------


def test_concavity_pass_on_curve():
    frame = make_chart(CURVE, [1, 0])
    result = concavity_test(frame, eps=1.0, n_samples=150)
    assert result.passed


def test_concavity_hessian_matches_closed_form():
    # for the square-root exponent the chart Hessian is -(1 - t^2)^(-3/2)
    frame = make_chart(CURVE, [1, 0])
    k, eps = 3.0, 1.0
    m = 1.0 / (k - eps)
    t = 0.37
    x = frame.point([t])
    grad = frame.basis @ CURVE.gradient(x)
    hess = frame.basis @ CURVE.hessian(x) @ frame.basis.T
    hx = CURVE(x)
    val = m * hx ** (m - 1) * hess[0, 0] + m * (m - 1) * hx ** (m - 2) * grad[0] ** 2
    assert abs(val + (1 - t * t) ** (-1.5)) < 1e-12


def test_concavity_fails_on_analytic_example_for_every_grid_eps():
    _, frame = analytic_example(2.0)
    k = 2.0
    for eps in (k / 8, k / 4, k / 2, 3 * k / 4, k - k / 8):
        result = concavity_test(frame, eps, n_samples=150)
        assert not result.passed
        assert result.witness_eigenvalue > 0


def test_concavity_rejects_bad_eps():
    frame = make_chart(CURVE, [1, 0])
    with pytest.raises(ValueError):
        concavity_test(frame, eps=3.0)


# -- lengths and bounds --------------------------------------------------------------


def test_log_length_bound_value():
    frame = make_chart(CURVE, [1, 0])
    trace = CurveTrace(
        params=np.array([0.0, 1.0]),
        coords=np.zeros((2, 1)),
        ambient=np.zeros((2, 2)),
        hvals=np.array([1.0, 1e-6]),
        cumulative_length=np.array([0.0, 1.0]),
    )
    expected = (1.0 / 3.0) * math.sqrt(0.5) * math.log(1e6)
    assert abs(log_length_bound(frame, trace, eps=1.0) - expected) < 1e-12
    flat = CurveTrace(
        params=np.array([0.0, 1.0]),
        coords=np.zeros((2, 1)),
        ambient=np.zeros((2, 2)),
        hvals=np.array([0.5, 0.5]),
        cumulative_length=np.array([0.0, 1.0]),
    )
    assert log_length_bound(frame, flat, eps=1.0) == 0.0


def test_curve_length_analytic_example():
    _, frame = analytic_example(2.0)
    t_plus = frame.boundary_distance([0.0], [1.0])
    t_minus = frame.boundary_distance([0.0], [-1.0])
    total = curve_length(
        frame, lambda t: np.array([t]), t0=-t_minus, t1=t_plus, dpath=lambda t: np.array([1.0])
    )
    assert abs(total - math.sqrt(2) * math.pi) < 1e-6
    half = curve_length(
        frame, lambda t: np.array([t]), t0=-t_minus, t1=0.0, dpath=lambda t: np.array([1.0])
    )
    assert abs(half - math.sqrt(2) * math.pi / 2) < 1e-6


def test_curve_length_degenerate_path():
    frame = make_chart(CURVE, [1, 0])
    assert curve_length(frame, lambda t: np.array([0.1]), t0=0.3, t1=0.3) == 0.0


def test_log_bound_below_measured_length_on_traces():
    frame = make_chart(CURVE, [1, 0])
    trace = geodesic_shoot(frame, [0.0], [1.0], max_len=6.0, refinements=1)
    for i in range(1, len(trace.hvals)):
        bound = (1.0 / 3.0) * math.sqrt(0.5) * abs(math.log(trace.hvals[i]))
        assert trace.cumulative_length[i] >= bound - 1e-9


# -- geodesics ---------------------------------------------------------------------------


def test_geodesic_rejects_zero_direction():
    frame = make_chart(CURVE, [1, 0])
    with pytest.raises(ValueError):
        geodesic_shoot(frame, [0.0], [0.0])


def test_geodesic_unit_speed_conservation():
    frame = make_chart(CURVE, [1, 0])
    trace = geodesic_shoot(frame, [0.0], [1.0], max_len=5.0)
    assert trace.unit_speed_drift <= 1e-6 * max(1.0, trace.length)


def test_geodesic_analytic_reaches_boundary():
    _, frame = analytic_example(2.0)
    trace = geodesic_shoot(frame, [0.0], [1.0], max_len=30.0)
    half = math.sqrt(2) * math.pi / 2
    assert trace.stop_reason in ("boundary", "drift", "step_underflow")
    assert trace.length <= half + 1e-3
    assert trace.length >= half - 0.05  # truncated just short of the boundary


def test_geodesic_trace_invariants():
    frame = make_chart(CURVE, [1, 0])
    trace = geodesic_shoot(frame, [0.0], [1.0], max_len=3.0, refinements=0)
    assert np.all(np.diff(trace.cumulative_length) >= 0)
    assert np.all(trace.hvals > 0)
    assert trace.ambient.shape[1] == 2


def test_trace_csv_columns():
    frame = make_chart(CURVE, [1, 0])
    trace = geodesic_shoot(frame, [0.0], [1.0], max_len=0.5, refinements=0)
    text = trace.to_csv()
    header = text.splitlines()[0].split(",")
    assert header == ["t", "c_1", "x_0", "x_1", "h", "cum_length"]
    assert len(text.splitlines()) == len(trace.params) + 1


# -- bivariate monomial criterion -----------------------------------------------------


def test_monomial_test_catalog_curves():
    frame = make_chart(MONOMIAL, [1, 1])
    result = n1_monomial_test(MONOMIAL, frame)
    assert result.passed and not result.skipped
    powers = sorted(f.min_power for f in result.faces)
    assert powers == [1, 2]

    quartic = HomogeneousPolynomial.parse("x*y^3")
    frame4 = make_chart(quartic, [1, 1])
    result4 = n1_monomial_test(quartic, frame4)
    assert result4.passed
    assert {f.min_power for f in result4.faces} == {1, 3}
    assert {f.sign_value for f in result4.faces} == {-2.0, 0.0}

    frame_c = make_chart(CURVE, [1, 0])
    assert n1_monomial_test(CURVE, frame_c).passed


def test_monomial_face_check_axis_violation():
    bad = HomogeneousPolynomial.parse("y^3 + x^2*y")  # nonzero on the y-axis
    result = monomial_face_check(bad)
    assert not result.passed
    assert any("axis" in f.reason for f in result.faces)


def test_monomial_test_skips_unbounded_cone():
    entry = nonclosed_example()
    poly, frame = entry.build()
    result = n1_monomial_test(poly, frame)
    assert result.skipped


# -- verdicts ----------------------------------------------------------------------------


def test_verdict_catalog_cubics(catalog_frames):
    for ident, (poly, frame) in catalog_frames.items():
        verdict = completeness_verdict(frame, FAST)
        assert verdict.status == "complete"
        assert verdict.route == "cubic-criterion"


def test_verdict_quadric():
    quadric = HomogeneousPolynomial.parse("x^2 - y^2")
    frame = make_chart(quadric, [2.0, 0.5])
    verdict = completeness_verdict(frame, FAST)
    assert verdict.status == "complete" and verdict.route == "quadric"


def test_verdict_analytic_incomplete():
    _, frame = analytic_example(2.0)
    verdict = completeness_verdict(frame, FAST)
    assert verdict.status == "incomplete"
    assert verdict.route == "finite-length-witness"
    assert abs(verdict.evidence["witness_length"] - math.sqrt(2) * math.pi) < 1e-5


def test_verdict_nonclosed_piece_reports_failure():
    poly, frame = nonclosed_example().build()
    verdict = completeness_verdict(frame, FAST)
    assert "closedness_failure" in verdict.evidence
    assert verdict.status in ("incomplete", "inconclusive")
    if verdict.status == "incomplete":
        assert math.isfinite(verdict.evidence["witness_length"])


def test_verdict_n1_route_for_quartic_curve():
    quartic = HomogeneousPolynomial.parse("x*y^3")
    frame = make_chart(quartic, [1, 1])
    verdict = completeness_verdict(frame, FAST)
    assert verdict.status == "complete" and verdict.route == "n1-monomial"


def test_verdict_monotone_under_route_removal():
    # disabling the segment test must not flip the decision, only the route
    frame = make_chart(CURVE, [1, 0])
    with_seg = completeness_verdict(frame, FAST)
    without = completeness_verdict(
        frame,
        AnalysisConfig(boundary_dirs=40, segment_lines=0, concavity_samples=120),
    )
    assert with_seg.status == without.status == "complete"
    assert without.route == "regular-boundary"


def test_verdict_deterministic():
    _, frame = analytic_example(2.0)
    v1 = completeness_verdict(frame, FAST)
    v2 = completeness_verdict(frame, FAST)
    assert v1.status == v2.status and v1.route == v2.route
    assert v1.evidence == v2.evidence
