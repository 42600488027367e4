"""Tests for the secant / reflection / billiard correspondences."""

import math
import random

import pytest

from algbilliards.curve import (
    PlaneCurve,
    on_curve_residual,
    proj_distance,
    proj_point,
)
from algbilliards.phase import (
    InfinityBasePointError,
    NoRealReturnError,
    PhasePoint,
    ScratchPointError,
    billiard_step,
    conic_residual,
    direction_from_slope,
    direction_point,
    orbit_tree,
    orbit_tree_jsonl,
    phase_distance,
    phase_point,
    real_billiard_step,
    reflect,
    rotate_direction,
    secant,
)

S2 = math.sqrt(2)


def ellipse():
    return PlaneCurve.from_coeffs(2, {(2, 0, 0): 1, (0, 2, 0): 4, (0, 0, 2): -4})


def quartic_box():
    # x^4 + y^4 = 1
    return PlaneCurve.from_coeffs(4, {(4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): -1})


def sample_states(curve, count, seed=0):
    """Deterministic well-conditioned complex states for property checks."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        theta = rng.uniform(0, 2 * math.pi) + 1j * rng.uniform(-0.6, 0.6)
        q = rotate_direction(direction_point(1, 0, 1), theta)
        # base point: intersect a random line through a random anchor with the curve
        anchor = (rng.uniform(-2, 2) + 1j * rng.uniform(-1, 1),
                  rng.uniform(-2, 2) + 1j * rng.uniform(-1, 1), 1.0)
        direction = (rng.uniform(-1, 1) + 1j * rng.uniform(-0.5, 0.5),
                     rng.uniform(-1, 1) + 1j * rng.uniform(-0.5, 0.5), 0.0)
        from algbilliards.numerics import find_roots

        poly = curve.restrict_to_line(anchor, direction)
        try:
            roots = find_roots(poly)
        except Exception:
            continue
        rc = roots[rng.randrange(len(roots))]
        c = proj_point(
            anchor[0] + rc.value * direction[0],
            anchor[1] + rc.value * direction[1],
            1.0,
        )
        if abs(c.coords[2]) < 0.05 or max(abs(z) for z in c.coords) > 50:
            continue
        x = PhasePoint(c=c, q=q)
        from algbilliards.phase import (
            reflect_scratch_proximity,
            secant_scratch_proximity,
        )

        if secant_scratch_proximity(curve, x) < 1e-3:
            continue
        if reflect_scratch_proximity(curve, x) < 1e-3:
            continue
        if on_curve_residual(curve, c) > 1e-9:
            continue
        out.append(x)
    return out


def collinearity_residual(x: PhasePoint, y: PhasePoint) -> float:
    # 3x3 determinant [[c0, c0', q0], [c1, c1', q1], [c2, c2', 0]]
    c, cp, q = x.c.coords, y.c.coords, x.q.q
    det = q[0] * (c[1] * cp[2] - c[2] * cp[1]) - q[1] * (c[0] * cp[2] - c[2] * cp[0])
    return abs(det)


# ---------------------------------------------------------------------------
# direction points
# ---------------------------------------------------------------------------


def test_direction_from_slope_horizontal():
    q = direction_from_slope((1, 0), 0)
    assert q.q == (1 + 0j, 0j, 1 + 0j)
    assert not q.is_isotropic


def test_direction_from_slope_complex():
    # [2 : i]: scale so Q0^2 + Q1^2 = 1 gives (2, i, sqrt(3)) ~ (2/sqrt3, i/sqrt3, 1)
    q = direction_from_slope((2, 1j), 0)
    s3 = math.sqrt(3)
    target = direction_point(2 / s3, 1j / s3, 1)
    assert phase_distance(
        PhasePoint(proj_point(1, 0, 0), q), PhasePoint(proj_point(1, 0, 0), target)
    ) < 1e-12


def test_direction_from_slope_branches_differ():
    q0 = direction_from_slope((2, 1j), 0)
    q1 = direction_from_slope((2, 1j), 1)
    assert abs(q0.q[2] / q0.q[0] + q1.q[2] / q1.q[0]) < 1e-12


def test_direction_from_slope_isotropic():
    q = direction_from_slope((1, 1j))
    assert q.is_isotropic
    assert abs(q.q[2]) == 0


def test_rotation_stays_on_conic():
    rng = random.Random(1)
    q = direction_point(1, 0, 1)
    for _ in range(50):
        theta = rng.uniform(-3, 3) + 1j * rng.uniform(-1, 1)
        q2 = rotate_direction(q, theta)
        assert conic_residual(*q2.q) < 1e-12


# ---------------------------------------------------------------------------
# secant
# ---------------------------------------------------------------------------


def test_secant_ellipse_basic():
    c = ellipse()
    q = direction_point(-S2 / 2, S2 / 2, 1)
    x = phase_point(c, proj_point(2, 0, 1), q)
    out = secant(c, x)
    assert out.total_multiplicity() == 1
    img = out.images[0].point
    assert proj_distance(img.c, proj_point(6 / 5, 4 / 5, 1)) < 1e-9
    assert img.q is q  # direction preserved exactly


def test_secant_tangent_line_returns_base_once():
    c = ellipse()
    q = direction_point(0, 1, 1)  # vertical tangent at (2, 0)
    x = phase_point(c, proj_point(2, 0, 1), q)
    out = secant(c, x)
    assert out.total_multiplicity() == 1
    assert proj_distance(out.images[0].point.c, proj_point(2, 0, 1)) < 1e-7


def test_secant_two_point_line():
    c = ellipse()
    # line through (0, 1) and (2, 0) has direction (2, -1)
    q = direction_from_slope((2, -1), 0)
    x = phase_point(c, proj_point(0, 1, 1), q)
    out = secant(c, x)
    assert proj_distance(out.images[0].point.c, proj_point(2, 0, 1)) < 1e-9


def test_secant_scratch_point_rejected():
    c = ellipse()
    q = direction_from_slope((2, 1j), 0)
    x = PhasePoint(c=proj_point(2, 1j, 0), q=q)
    with pytest.raises(ScratchPointError):
        secant(c, x)


def test_secant_line_in_curve_rejected():
    from algbilliards.curve import PlaneCurve
    from algbilliards.phase import LineInCurveError

    # the line pair X0 * X1 contains the vertical line x = 0
    pair = PlaneCurve.from_coeffs(2, {(1, 1, 0): 1})
    x = PhasePoint(c=proj_point(0, 5, 1), q=direction_point(0, 1, 1))
    with pytest.raises(LineInCurveError):
        secant(pair, x)


def test_secant_collinearity_and_symmetry_properties():
    c = ellipse()
    for x in sample_states(c, 40, seed=3):
        out = secant(c, x)
        assert out.total_multiplicity() == 1
        for br in out.images:
            assert collinearity_residual(x, br.point) < 1e-7
            assert on_curve_residual(c, br.point.c) < 1e-7
            # self-adjointness: the base point is among the secant images of the image
            back = secant(c, br.point)
            assert min(
                phase_distance(b.point, x) for b in back.images
            ) < 1e-6


# ---------------------------------------------------------------------------
# reflect
# ---------------------------------------------------------------------------


def test_reflect_ellipse_top():
    c = ellipse()
    q = direction_point(-S2 / 2, S2 / 2, 1)
    x = phase_point(c, proj_point(0, 1, 1), q)
    out = reflect(c, x)
    img = out.images[0].point
    assert img.c is x.c
    assert phase_distance(img, PhasePoint(x.c, direction_point(-S2 / 2, -S2 / 2, 1))) < 1e-12


def test_reflect_exchanges_isotropic_directions():
    c = ellipse()
    q = direction_point(1, 1j, 0)
    x = phase_point(c, proj_point(0, 1, 1), q)
    out = reflect(c, x)
    assert phase_distance(
        out.images[0].point, PhasePoint(x.c, direction_point(1, -1j, 0))
    ) < 1e-12


def test_reflect_involution_property():
    c = ellipse()
    for x in sample_states(c, 100, seed=5):
        y = reflect(c, x).images[0].point
        z = reflect(c, y).images[0].point
        assert phase_distance(z, x) < 1e-7


def test_reflect_rejects_infinity_base():
    c = ellipse()
    q = direction_point(1, 0, 1)
    x = PhasePoint(c=proj_point(2, 1j, 0), q=q)
    with pytest.raises(InfinityBasePointError):
        reflect(c, x)


# ---------------------------------------------------------------------------
# billiards
# ---------------------------------------------------------------------------


def test_billiard_step_ellipse_frozen_value():
    c = ellipse()
    q = direction_point(-S2 / 2, S2 / 2, 1)
    x = phase_point(c, proj_point(2, 0, 1), q)
    out = billiard_step(c, x)
    assert out.total_multiplicity() == 1
    img = out.images[0].point
    # tangent at (6/5, 4/5) has direction (8, -3); reflecting gives
    # q' = (-103 sqrt2 / 146, -7 sqrt2 / 146)
    assert proj_distance(img.c, proj_point(6 / 5, 4 / 5, 1)) < 1e-9
    expected_q = direction_point(-103 * S2 / 146, -7 * S2 / 146, 1)
    assert phase_distance(img, PhasePoint(img.c, expected_q)) < 1e-9


def test_billiard_reversibility():
    c = ellipse()
    for x in sample_states(c, 30, seed=8):
        for br in billiard_step(c, x).images:
            y = br.point
            ry = reflect(c, y).images[0].point
            back = billiard_step(c, ry)
            candidates = [reflect(c, b.point).images[0].point for b in back.images]
            assert min(phase_distance(cand, x) for cand in candidates) < 1e-6


# ---------------------------------------------------------------------------
# real billiards
# ---------------------------------------------------------------------------


def test_real_step_matches_complex_branch():
    c = ellipse()
    q = direction_point(-S2 / 2, S2 / 2, 1)
    x = phase_point(c, proj_point(2, 0, 1), q)
    y = real_billiard_step(c, x)
    assert proj_distance(y.c, proj_point(6 / 5, 4 / 5, 1)) < 1e-9
    expected_q = direction_point(-103 * S2 / 146, -7 * S2 / 146, 1)
    assert phase_distance(y, PhasePoint(y.c, expected_q)) < 1e-9


def test_real_step_two_periodic_bounce():
    c = ellipse()
    x = phase_point(c, proj_point(0, 1, 1), direction_point(0, -1, 1))
    y = real_billiard_step(c, x)
    assert proj_distance(y.c, proj_point(0, -1, 1)) < 1e-9
    assert phase_distance(y, PhasePoint(y.c, direction_point(0, 1, 1))) < 1e-9
    z = real_billiard_step(c, y)
    assert phase_distance(z, x) < 1e-9


def test_real_step_no_real_return_on_quartic_edge():
    c = quartic_box()
    x = phase_point(c, proj_point(1, 0, 1), direction_point(0, 1, 1))
    with pytest.raises(NoRealReturnError):
        real_billiard_step(c, x)


# ---------------------------------------------------------------------------
# orbit trees
# ---------------------------------------------------------------------------


def test_orbit_tree_depth_zero():
    c = ellipse()
    x = phase_point(c, proj_point(2, 0, 1), direction_point(-S2 / 2, S2 / 2, 1))
    tree = orbit_tree(c, x, 0)
    assert tree.depth == 0
    assert tree.leaves_with_multiplicity() == 1


def test_orbit_tree_chain_for_conic():
    c = ellipse()
    x = phase_point(c, proj_point(2, 0, 1), direction_point(-S2 / 2, S2 / 2, 1))
    tree = orbit_tree(c, x, 6)
    for k in range(7):
        assert tree.level_mass(k) == 1


def test_orbit_tree_jsonl_format():
    import json

    c = ellipse()
    x = phase_point(c, proj_point(2, 0, 1), direction_point(-S2 / 2, S2 / 2, 1))
    lines = orbit_tree_jsonl(orbit_tree(c, x, 2))
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert first["level"] == 0 and first["parent_index"] == -1 and first["mult"] == 1
    assert len(first["c"]) == 3 and len(first["c"][0]) == 2


def test_orbit_tree_records_terminated_branches():
    """A secant image landing exactly on the infinity line terminates its
    branch with a reason instead of dropping mass silently."""
    import json

    from algbilliards.curve import PlaneCurve, points_at_infinity
    from algbilliards.numerics import find_roots

    cubic = PlaneCurve.from_coeffs(
        3, {(3, 0, 0): 1, (0, 3, 0): 2, (0, 0, 3): 1, (1, 0, 2): 1, (0, 1, 2): 1}
    )
    # aim along a direction whose infinity point lies on the curve: the line
    # through any affine curve point then meets the curve at infinity
    inf_pt = points_at_infinity(cubic)[0][0]
    q = direction_from_slope((inf_pt.coords[0], inf_pt.coords[1]), 0)
    poly = cubic.restrict_to_line((0.2, -0.3, 1.0), (1.1, 0.4, 0.0))
    t = find_roots(poly)[0].value
    c0 = proj_point(0.2 + 1.1 * t, -0.3 + 0.4 * t, 1.0)
    x = phase_point(cubic, c0, q)
    tree = orbit_tree(cubic, x, 1)
    terminated = [n for n in tree.levels[1] if n.terminated_reason is not None]
    assert terminated, "expected a terminated branch at infinity"
    assert terminated[0].terminated_reason == "image_at_infinity"
    # mass bookkeeping stays exact: survivors + terminated = d - 1
    total = sum(n.multiplicity for n in tree.levels[1])
    assert total == 2
    dumped = [json.loads(l) for l in orbit_tree_jsonl(tree)]
    assert any("terminated_reason" in obj for obj in dumped)


def test_real_step_long_run_stability():
    """10^4 classical bounces stay on the curve to rounding accuracy."""
    from algbilliards.curve import on_curve_residual
    from algbilliards.sampling import sample_real_state

    c = ellipse()
    x = sample_real_state(c, seed=1)
    worst = 0.0
    for i in range(10000):
        x = real_billiard_step(c, x)
        if i % 500 == 0:
            worst = max(worst, on_curve_residual(c, x.c))
    assert worst < 1e-10


def test_quartic_branch_residuals():
    """Degree-4 tables: three branches per step, same residual guarantees."""
    from algbilliards.curve import on_curve_residual, PlaneCurve
    from algbilliards.sampling import sample_phase_points

    quartic = PlaneCurve.from_coeffs(
        4,
        {(4, 0, 0): 1, (0, 4, 0): 2, (0, 0, 4): 1, (1, 1, 2): 1,
         (1, 0, 3): 1, (0, 1, 3): 1},
    )
    for x in sample_phase_points(quartic, 50, seed=13):
        out = billiard_step(quartic, x)
        assert out.total_multiplicity() == 3
        for br in out.images:
            assert on_curve_residual(quartic, br.point.c) < 1e-7
        sec = secant(quartic, x)
        for br in sec.images:
            assert collinearity_residual(x, br.point) < 1e-7
