"""Blowup charts at scratch points and the confinement experiments.

A scratch point is a state where one of the two correspondence factors is
indeterminate: at infinity (base point on the infinity line with the line
direction equal to its own tangent direction, which kills the secant step)
or isotropic (direction at an isotropic point of the conic equal to the
tangent direction at an isotropic tangency point, which kills reflection).
A generic degree-d table has exactly 2d scratch points at infinity and
d(d-1) isotropic ones per sign: 2 d^2 in total.

Blowing up a scratch point replaces it by an exceptional line E of
directions of approach, and the correspondences extend to E:

* at infinity, E is the pencil of lines with the tangent direction; the
  secant step sends the pencil member at offset v to its d-1 affine
  intersections with the curve, and reflection negates the offset;
* at an isotropic point, the secant step negates the local curve parameter
  (plus a fixed multiset on the tangent line), and reflection maps E onto
  the direction fiber, a limit realized here by explicit epsilon sequences
  with Richardson extrapolation.

The two confinement experiments drive an actual double billiard step along
shrinking perturbations and compare the extrapolated limits against the
chart-level predictions; distinct starting points must give distinct
limits, which is exactly the "what blows down must blow up" phenomenon.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .curve import (
    PlaneCurve,
    ProjPoint,
    genericity_report,
    isotropic_tangency_points,
    points_at_infinity,
    proj_distance,
    proj_point,
    tangent_at,
)
from .numerics import ComplexPoly, find_roots
from .phase import (
    Branch,
    BranchSet,
    DirectionPoint,
    PhasePoint,
    direction_from_slope,
    direction_point,
    phase_distance,
    reflect,
    rotate_direction,
    secant,
)

__all__ = [
    "ScratchPoint",
    "ExceptionalParam",
    "BlowupError",
    "GenericityFailureError",
    "BoundaryPointError",
    "BranchLostError",
    "ExtrapolationError",
    "enumerate_scratch_points",
    "secant_at_infinity_limit",
    "reflect_at_infinity_limit",
    "secant_at_isotropic_limit",
    "reflect_at_isotropic_limit",
    "confinement_experiment_infinity",
    "confinement_experiment_isotropic",
    "ConfinementReport",
    "default_eps_schedule",
]

EPS_BASE = 1e-2
EPS_COUNT = 13


class BlowupError(ValueError):
    pass


class GenericityFailureError(BlowupError):
    """The curve fails a genericity condition required for the blowup census."""


class BoundaryPointError(BlowupError):
    """The requested exceptional parameter is one of the two boundary points."""


class BranchLostError(BlowupError):
    """No billiard branch approached the scratch point along the epsilon path."""


class ExtrapolationError(BlowupError):
    """The Richardson-extrapolated limit sequence is not Cauchy."""


def default_eps_schedule() -> list[float]:
    return [EPS_BASE * 2.0**-k for k in range(EPS_COUNT)]


KAPPA_MARGIN = 0.1


def infinity_experiment_starts(
    curve: PlaneCurve, scratch: ScratchPoint, candidates, count: int
):
    """Filter candidate curve points down to admissible experiment starts."""
    chart: InfinityChart = scratch.chart
    good = []
    for c in candidates:
        if c.is_at_infinity:
            continue
        offset = chart.kappa(*c.affine())
        if KAPPA_MARGIN < abs(offset) < 1.0 / KAPPA_MARGIN:
            good.append(c)
        if len(good) == count:
            break
    if len(good) < count:
        raise BlowupError("not enough admissible starts among the candidates")
    return good


# ---------------------------------------------------------------------------
# scratch points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InfinityChart:
    """Frame at a scratch point at infinity.

    kappa(x) = n0 x0 + n1 x1 + offset is the affine-linear functional whose
    level sets are the pencil of lines with the tangent direction, pinned so
    that the tangent line at the curve's infinity point (the asymptote) is
    exactly the level set kappa = 0.  Reflection across that line then
    negates kappa regardless of the normalization of n.  The offset vanishes
    only for tables whose asymptotes pass through the origin.
    """

    tangent: tuple[complex, complex]
    normal: tuple[complex, complex]
    offset: complex

    def kappa(self, x0: complex, x1: complex) -> complex:
        return self.normal[0] * x0 + self.normal[1] * x1 + self.offset

    def line_base_point(self, value: complex) -> tuple[complex, complex]:
        n0, n1 = self.normal
        norm2 = abs(n0) ** 2 + abs(n1) ** 2
        rhs = value - self.offset
        return (
            rhs * n0.conjugate() / norm2,
            rhs * n1.conjugate() / norm2,
        )


@dataclass(frozen=True)
class IsotropicChart:
    """Frame at an isotropic scratch point.

    tau is the unit isotropic tangent direction; nu = conj(tau) is a
    transversal Newton direction (the pairing grad F . nu never vanishes at
    a smooth point).  The exceptional coordinate of a nearby state
    (c + a tau + ..., q with conic chart value w) is the ratio a / w.
    """

    sign: int
    tau: tuple[complex, complex]
    nu: tuple[complex, complex]


@dataclass(frozen=True)
class ScratchPoint:
    kind: str  # "infinity" | "isotropic_plus" | "isotropic_minus"
    phase: PhasePoint
    basic: bool
    chart: InfinityChart | IsotropicChart

    def describe(self) -> dict:
        c = self.phase.c.coords
        q = self.phase.q.q
        return {
            "kind": self.kind,
            "basic": self.basic,
            "c": [[z.real, z.imag] for z in c],
            "q": [[z.real, z.imag] for z in q],
        }


@dataclass(frozen=True)
class ExceptionalParam:
    scratch: ScratchPoint
    value: complex


def enumerate_scratch_points(curve: PlaneCurve) -> list[ScratchPoint]:
    """All 2 d^2 scratch points of a curve in general position.

    Each of the d infinity points carries the two direction-conic points
    above its tangent slope; each isotropic tangency point (d(d-1) per sign)
    carries the isotropic direction it is tangent to.
    """
    report = genericity_report(curve)
    if not report.all_ok():
        raise GenericityFailureError(
            "curve fails genericity: " + "; ".join(report.diagnostics)
        )
    out: list[ScratchPoint] = []
    for p, _mult in points_at_infinity(curve):
        td = tangent_at(curve, p)
        basic = _simple_tangency_at(curve, p)
        # pin kappa = 0 on the tangent line at the infinity point: the
        # affine tangent functional is (F0 x0 + F1 x1 + F2)/pivot, with the
        # same pivot that normalized the direction pair
        g = curve.gradient(*p.coords)
        t_raw = (g[1], -g[0])
        pivot = t_raw[0] if abs(t_raw[0]) >= abs(t_raw[1]) else t_raw[1]
        offset = g[2] / pivot
        for branch in (0, 1):
            q = direction_from_slope(td.tangent, branch)
            chart = InfinityChart(tangent=td.tangent, normal=td.normal, offset=offset)
            out.append(
                ScratchPoint(
                    kind="infinity",
                    phase=PhasePoint(c=p, q=q),
                    basic=basic and not q.is_isotropic,
                    chart=chart,
                )
            )
    for sign, kind in ((1, "isotropic_plus"), (-1, "isotropic_minus")):
        q = direction_point(1, sign * 1j, 0)
        for p, mult in isotropic_tangency_points(curve, sign):
            td = tangent_at(curve, p)
            t0, t1 = td.tangent
            norm = math.sqrt(abs(t0) ** 2 + abs(t1) ** 2)
            tau = (t0 / norm, t1 / norm)
            # Newton transversal: the conjugate gradient never pairs to zero
            # with the gradient at a smooth point
            x0, x1 = p.affine()
            g = curve.gradient(x0, x1, 1.0)
            gnorm = math.sqrt(abs(g[0]) ** 2 + abs(g[1]) ** 2)
            nu = (g[0].conjugate() / gnorm, g[1].conjugate() / gnorm)
            out.append(
                ScratchPoint(
                    kind=kind,
                    phase=PhasePoint(c=p, q=q),
                    basic=(mult == 1) and not p.is_at_infinity,
                    chart=IsotropicChart(sign=sign, tau=tau, nu=nu),
                )
            )
    kind_rank = {"infinity": 0, "isotropic_plus": 1, "isotropic_minus": 2}
    out.sort(
        key=lambda s: (
            kind_rank[s.kind],
            s.phase.c.coords[0].real,
            s.phase.c.coords[0].imag,
            s.phase.c.coords[1].real,
            s.phase.c.coords[1].imag,
            s.phase.q.q[2].real,
            s.phase.q.q[2].imag,
        )
    )
    return out


def _simple_tangency_at(curve: PlaneCurve, p: ProjPoint) -> bool:
    """Contact order of the tangent line at p is exactly 2."""
    g = curve.gradient(*p.coords)
    # a direction spanning the tangent line besides p itself
    w = _cross(g, p.coords)
    poly = curve.restrict_to_line(p.coords, w)
    scale = max(abs(c) for c in poly.coeffs)
    if scale == 0:
        return False
    coeffs = list(poly.coeffs) + [0j] * 3
    return abs(coeffs[2]) > 1e-8 * scale


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


# ---------------------------------------------------------------------------
# chart limit maps
# ---------------------------------------------------------------------------


def secant_at_infinity_limit(curve: PlaneCurve, e: ExceptionalParam) -> BranchSet:
    """Secant step applied to a pencil member: the d-1 affine intersections
    of the line {kappa = value} with the curve, paired with the scratch
    direction.  The boundary members (tangent line at value 0 and the
    infinity line at value = infinity) are refused."""
    s = e.scratch
    if s.kind != "infinity":
        raise BlowupError("expected an infinity-kind scratch point")
    if not s.basic:
        raise BlowupError("scratch point is not basic")
    if abs(e.value) < 1e-9 or abs(e.value) > 1e9:
        raise BoundaryPointError("pencil member is a boundary point of the chart")
    chart: InfinityChart = s.chart
    b0, b1 = chart.line_base_point(e.value)
    t0, t1 = chart.tangent
    poly = curve.restrict_to_line((b0, b1, 1.0), (t0, t1, 0.0))
    scale = max(abs(c) for c in poly.coeffs)
    coeffs = list(poly.coeffs) + [0j] * (curve.degree + 1 - len(poly.coeffs))
    # the pencil direction meets the curve at the scratch's infinity point,
    # so the restriction drops to degree d - 1
    eff = len(coeffs)
    while eff > 0 and abs(coeffs[eff - 1]) <= 1e-9 * scale:
        eff -= 1
    if eff - 1 != curve.degree - 1:
        raise BlowupError(
            f"line at offset {e.value} has unexpected intersection degree {eff - 1}"
        )
    branches = []
    for rc in find_roots(ComplexPoly(coeffs[:eff])):
        t = rc.value
        pt = proj_point(b0 + t * t0, b1 + t * t1, 1.0)
        branches.append(Branch(PhasePoint(c=pt, q=s.phase.q), rc.multiplicity))
    branches.sort(key=lambda b: (b.point.c.coords[0].real, b.point.c.coords[0].imag,
                                 b.point.c.coords[1].real, b.point.c.coords[1].imag))
    return BranchSet(source=s.phase, op_tag="secant", images=tuple(branches))


def reflect_at_infinity_limit(curve: PlaneCurve, e: ExceptionalParam) -> ExceptionalParam:
    """Reflection fixes the scratch point and reflects the pencil across the
    tangent line: the chart offset is negated."""
    if e.scratch.kind != "infinity":
        raise BlowupError("expected an infinity-kind scratch point")
    if not e.scratch.basic:
        raise BlowupError("scratch point is not basic")
    return ExceptionalParam(scratch=e.scratch, value=-e.value)


def secant_at_isotropic_limit(
    curve: PlaneCurve, e: ExceptionalParam
) -> tuple[ExceptionalParam, BranchSet]:
    """Secant step through an isotropic scratch point: the exceptional
    coordinate is negated, together with the static multiset of the d - 2
    other intersections of the isotropic tangent line."""
    s = e.scratch
    if s.kind not in ("isotropic_plus", "isotropic_minus"):
        raise BlowupError("expected an isotropic-kind scratch point")
    if not s.basic:
        raise BlowupError("scratch point is not basic")
    chart: IsotropicChart = s.chart
    c = s.phase.c
    x0, x1 = c.affine()
    poly = curve.restrict_to_line((x0, x1, 1.0), (chart.tau[0], chart.tau[1], 0.0))
    scale = max(abs(cf) for cf in poly.coeffs)
    coeffs = list(poly.coeffs)
    # base tangency contributes the double root at t = 0: strip two copies
    if len(coeffs) >= 2 and abs(coeffs[0]) <= 1e-6 * scale and abs(coeffs[1]) <= 1e-5 * scale:
        rest = coeffs[2:]
    else:
        raise BlowupError("tangency at the scratch point is not simple")
    branches = []
    body = ComplexPoly(rest) if rest else None
    if body is not None and body.degree >= 1 and max(abs(cf) for cf in rest) > 1e-9 * scale:
        for rc in find_roots(body):
            t = rc.value
            pt = proj_point(x0 + t * chart.tau[0], x1 + t * chart.tau[1], 1.0)
            branches.append(Branch(PhasePoint(c=pt, q=s.phase.q), rc.multiplicity))
    static = BranchSet(source=s.phase, op_tag="secant", images=tuple(branches))
    return ExceptionalParam(scratch=s, value=-e.value), static


def _conic_chart_point(sign: int, w: complex) -> DirectionPoint:
    """Point of the conic with chart value w near the isotropic point (1, sign*i, 0):
    Q = (1, sign * i * sqrt(1 - w^2), w)."""
    q1 = sign * 1j * cmath.sqrt(1 - w * w)
    return direction_point(1.0, q1, w)


def _curve_point_near(curve: PlaneCurve, base: tuple[complex, complex],
                      tau, nu, a: complex) -> ProjPoint:
    """Newton-correct base + a*tau back onto the curve along nu."""
    x0 = base[0] + a * tau[0]
    x1 = base[1] + a * tau[1]
    mu = 0j
    scale = max(1.0, curve.scale())
    for _ in range(50):
        px = x0 + mu * nu[0]
        py = x1 + mu * nu[1]
        f = curve.form_value(px, py, 1.0)
        if abs(f) < 1e-14 * scale:
            break
        g = curve.gradient(px, py, 1.0)
        deriv = g[0] * nu[0] + g[1] * nu[1]
        if abs(deriv) < 1e-14 * scale:
            raise BlowupError("Newton correction onto the curve is degenerate")
        mu -= f / deriv
    return proj_point(x0 + mu * nu[0], x1 + mu * nu[1], 1.0)


def _richardson(values: list[complex]) -> tuple[complex, list[float]]:
    """One-step Richardson extrapolation for f(eps_k) with eps_{k+1} = eps_k / 2.

    Returns the last extrapolant and the successive extrapolant differences.
    """
    rich = [2 * values[k + 1] - values[k] for k in range(len(values) - 1)]
    diffs = [abs(rich[k + 1] - rich[k]) for k in range(len(rich) - 1)]
    return rich[-1], diffs


def _extrapolate_vector(seq: list[tuple[complex, ...]]) -> tuple[tuple[complex, ...], float, bool]:
    """Componentwise Richardson extrapolation; returns (limit, final_diff, cauchy).

    Cauchy means every successive pair of extrapolant differences contracts
    by at least a factor of 2 until the differences reach the rounding
    floor; an analytic limit contracts by about 4 per halving, while a lost
    branch shows order-one differences that this test flags immediately.
    """
    comps = list(zip(*seq))
    limit = []
    worst = 0.0
    cauchy = True
    for comp in comps:
        value, diffs = _richardson(list(comp))
        limit.append(value)
        if not diffs:
            continue
        worst = max(worst, diffs[-1])
        if not _diffs_contract(diffs, max(abs(v) for v in comp)):
            cauchy = False
    return tuple(limit), worst, cauchy


def _diffs_contract(diffs: list[float], scale: float) -> bool:
    """Does a Richardson difference sequence certify convergence?

    Three conditions: a sustained window of factor->=2 contraction (an
    analytic limit gives about 4 per halving), an overall contraction of at
    least three orders of magnitude, and no rebound after the minimum (the
    tail may only plateau at its rounding floor).  A sequence that sits at
    rounding level throughout passes trivially.
    """
    top = max(diffs)
    if top <= 1e-8 * max(1.0, scale):
        return True
    bottom = min(diffs)
    if bottom > 1e-3 * top:
        return False
    # the tail jitters around its rounding floor, so only a rebound far
    # above the best level reached indicates a lost branch
    if diffs[-1] > 1e3 * max(bottom, 1e-300):
        return False
    need = max(3, len(diffs) // 3)
    run = 0
    for a, b in zip(diffs, diffs[1:]):
        if b == 0 or a >= 2.0 * b:
            run += 1
            if run >= need:
                return True
        else:
            run = 0
    return False


def reflect_at_isotropic_limit(
    curve: PlaneCurve, e: ExceptionalParam, eps_list: list[float] | None = None
) -> PhasePoint:
    """Limit of reflection along a path approaching the exceptional point.

    The path holds the blowup ratio a / w fixed at the chart value: the base
    point moves along the curve with parameter a = value * eps while the
    direction approaches the isotropic point with conic chart value w = eps.
    The reflected directions converge to a point of the direction fiber over
    the tangency point; the limit is Richardson-extrapolated and must be
    Cauchy at 1e-6.
    """
    s = e.scratch
    if s.kind not in ("isotropic_plus", "isotropic_minus"):
        raise BlowupError("expected an isotropic-kind scratch point")
    if not s.basic:
        raise BlowupError("scratch point is not basic")
    chart: IsotropicChart = s.chart
    base = s.phase.c.affine()
    eps = default_eps_schedule() if eps_list is None else list(eps_list)
    samples = []
    for w in eps:
        c_eps = _curve_point_near(curve, base, chart.tau, chart.nu, e.value * w)
        q_eps = _conic_chart_point(chart.sign, w)
        out = reflect(curve, PhasePoint(c=c_eps, q=q_eps))
        q_img = out.images[0].point.q
        samples.append(q_img.affine())
    limit, final_diff, cauchy = _extrapolate_vector(samples)
    if not cauchy or final_diff > 1e-6:
        raise ExtrapolationError(
            f"reflection limit not Cauchy (final difference {final_diff:.2e})"
        )
    q0, q1 = limit
    # exact projection onto the conic along the z = q0 + i q1 chart
    z = q0 + 1j * q1
    q_proj = direction_point((z + 1 / z) / 2, (z - 1 / z) / (2j), 1.0)
    return PhasePoint(c=s.phase.c, q=q_proj)


# ---------------------------------------------------------------------------
# confinement experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConfinementReport:
    scratch: ScratchPoint
    eps: tuple[float, ...]
    samples: tuple[dict, ...]
    limits: tuple[tuple[PhasePoint, ...], ...]
    predicted: tuple[tuple[PhasePoint, ...], ...]
    max_prediction_error: float
    min_pairwise_limit_distance: float
    cauchy_ok: bool
    max_final_diff: float

    def passed(self, prediction_tol: float = 1e-5, separation_tol: float = 1e-4) -> bool:
        """Cauchy limits, chart-prediction agreement where a prediction
        exists, and nonconstant dependence on the start where several
        starts were run.  The final Richardson difference only needs to be
        sane; its size is diagnostic, the accuracy gate is the prediction."""
        ok = self.cauchy_ok and self.max_final_diff < 1e-3
        if self.predicted and any(len(p) for p in self.predicted):
            ok = ok and self.max_prediction_error < prediction_tol
        if len(self.limits) >= 2:
            ok = ok and self.min_pairwise_limit_distance > separation_tol
        return ok

    def to_dict(self) -> dict:
        return {
            "scratch": self.scratch.describe(),
            "eps": list(self.eps),
            "samples": list(self.samples),
            "limits": [
                [_phase_to_json(p) for p in group] for group in self.limits
            ],
            "predicted": [
                [_phase_to_json(p) for p in group] for group in self.predicted
            ],
            "max_prediction_error": self.max_prediction_error,
            "min_pairwise_limit_distance": self.min_pairwise_limit_distance,
            "cauchy_ok": self.cauchy_ok,
            "max_final_diff": self.max_final_diff,
        }


def _phase_to_json(p: PhasePoint) -> dict:
    return {
        "c": [[z.real, z.imag] for z in p.c.coords],
        "q": [[z.real, z.imag] for z in p.q.q],
    }


def _scratch_chart_distance(x: PhasePoint, scratch: ScratchPoint) -> float:
    return phase_distance(x, scratch.phase)


def _approached_scratch(distances: list[float]) -> bool:
    """Did the followed branch demonstrably converge toward the scratch point?

    The distance scales linearly in eps with a geometry-dependent constant,
    so for far-out scratch points an absolute bound misfires; accept either
    a small final distance or a 50-fold contraction across the schedule.
    """
    if not distances:
        return False
    return distances[-1] < 1e-3 or distances[-1] < distances[0] / 50.0


def _phase_vector(p: PhasePoint) -> tuple[complex, ...]:
    x0, x1 = p.c.affine()
    q0, q1 = p.q.affine()
    return (x0, x1, q0, q1)


def _vector_to_phase(v: tuple[complex, ...]) -> PhasePoint:
    x0, x1, q0, q1 = v
    return PhasePoint(
        c=proj_point(x0, x1, 1.0),
        q=DirectionPoint(q=proj_point(q0, q1, 1.0).coords,
                         is_isotropic=False),
    )


def confinement_experiment_infinity(
    curve: PlaneCurve,
    scratch: ScratchPoint,
    c0: ProjPoint,
    eps_list: list[float] | None = None,
) -> ConfinementReport:
    """Drive b^2 through a scratch point at infinity from the start (c0, q).

    For each eps the direction is rotated off the scratch direction by eps;
    the first-step branch passing nearest the scratch is followed, the
    second step expands fully, and each surviving chain is extrapolated.
    The prediction composes the chart maps: reflect negates the pencil
    offset kappa(c0), the secant limit intersects the opposite pencil
    member, and a final reflection lands the chain.

    The start must sit away from the tangent-line boundary of the chart
    (|kappa(c0)| above an explicit margin): near it the confined targets
    collide pairwise and the extrapolation degenerates.
    """
    if scratch.kind != "infinity":
        raise BlowupError("expected an infinity-kind scratch point")
    eps = default_eps_schedule() if eps_list is None else list(eps_list)
    chart: InfinityChart = scratch.chart
    q_scratch = scratch.phase.q
    if c0.is_at_infinity:
        raise BoundaryPointError("start point must be affine")
    offset0 = chart.kappa(*c0.affine())
    if not KAPPA_MARGIN < abs(offset0) < 1.0 / KAPPA_MARGIN:
        raise BoundaryPointError(
            f"start offset kappa = {offset0:.3g} is too close to a chart boundary"
        )

    chains: list[list[tuple[complex, ...]]] = []
    step_distances = []
    for k, e in enumerate(eps):
        q_eps = rotate_direction(q_scratch, e)
        x = PhasePoint(c=c0, q=q_eps)
        sec1 = secant(curve, x)
        staged = []
        for br in sec1.images:
            try:
                r1 = reflect(curve, br.point)
            except Exception:
                continue
            y = r1.images[0].point
            staged.append((_scratch_chart_distance(y, scratch), y))
        if not staged:
            raise BranchLostError("all first-step branches failed to reflect")
        staged.sort(key=lambda t: t[0])
        dist, y = staged[0]
        step_distances.append(dist)
        sec2 = secant(curve, y)
        finals = []
        for br in sec2.images:
            try:
                r2 = reflect(curve, br.point)
            except Exception:
                continue
            finals.append(_phase_vector(r2.images[0].point))
        if not finals:
            raise BranchLostError("all second-step branches failed to reflect")
        if not chains:
            finals.sort(key=lambda v: (v[0].real, v[0].imag))
            chains = [[v] for v in finals]
        else:
            # continuation: match each chain to the nearest new value
            used = [False] * len(finals)
            for chain in chains:
                prev = chain[-1]
                best_i, best_d = None, float("inf")
                for i, v in enumerate(finals):
                    if used[i]:
                        continue
                    dd = max(abs(a - b) for a, b in zip(v, prev))
                    if dd < best_d:
                        best_i, best_d = i, dd
                if best_i is None:
                    raise BranchLostError("branch continuation lost a chain")
                used[best_i] = True
                chain.append(finals[best_i])
    if not _approached_scratch(step_distances):
        raise BranchLostError(
            f"nearest branch stayed {step_distances[-1]:.2e} from the scratch point"
        )

    limits = []
    cauchy_all = True
    worst_diff = 0.0
    for chain in chains:
        limit, final_diff, cauchy = _extrapolate_vector(chain)
        worst_diff = max(worst_diff, final_diff)
        cauchy_all = cauchy_all and cauchy
        limits.append(_vector_to_phase(limit))

    # chart-level prediction: reflect the pencil offset, intersect, reflect
    kappa0 = chart.kappa(*c0.affine())
    predicted: list[PhasePoint] = []
    try:
        neg = reflect_at_infinity_limit(curve, ExceptionalParam(scratch, kappa0))
        sec_limit = secant_at_infinity_limit(curve, neg)
        for br in sec_limit.images:
            try:
                predicted.append(reflect(curve, br.point).images[0].point)
            except Exception:
                continue
    except BoundaryPointError:
        predicted = []

    pred_err = 0.0
    if predicted:
        for lim in limits:
            pred_err = max(
                pred_err, min(phase_distance(lim, p) for p in predicted)
            )
        for p in predicted:
            pred_err = max(
                pred_err, min(phase_distance(lim, p) for lim in limits)
            )

    sample = {
        "c0": [[z.real, z.imag] for z in c0.coords],
        "kappa": [kappa0.real, kappa0.imag],
        "nearest_branch_distance": step_distances[-1],
    }
    return ConfinementReport(
        scratch=scratch,
        eps=tuple(eps),
        samples=(sample,),
        limits=(tuple(limits),),
        predicted=(tuple(predicted),),
        max_prediction_error=pred_err,
        min_pairwise_limit_distance=float("inf"),
        cauchy_ok=cauchy_all,
        max_final_diff=worst_diff,
    )


def confinement_experiment_infinity_multi(
    curve: PlaneCurve,
    scratch: ScratchPoint,
    starts: list[ProjPoint],
    eps_list: list[float] | None = None,
) -> ConfinementReport:
    """Run the infinity experiment from several starts and collate separation."""
    reports = [
        confinement_experiment_infinity(curve, scratch, c0, eps_list) for c0 in starts
    ]
    limits = tuple(r.limits[0] for r in reports)
    predicted = tuple(r.predicted[0] for r in reports)
    min_sep = float("inf")
    for i in range(len(limits)):
        for j in range(i + 1, len(limits)):
            min_sep = min(min_sep, _set_distance(limits[i], limits[j]))
    return ConfinementReport(
        scratch=scratch,
        eps=reports[0].eps,
        samples=tuple(r.samples[0] for r in reports),
        limits=limits,
        predicted=predicted,
        max_prediction_error=max(r.max_prediction_error for r in reports),
        min_pairwise_limit_distance=min_sep,
        cauchy_ok=all(r.cauchy_ok for r in reports),
        max_final_diff=max(r.max_final_diff for r in reports),
    )


def _set_distance(a: tuple[PhasePoint, ...], b: tuple[PhasePoint, ...]) -> float:
    """Hausdorff distance between two finite sets of phase points."""
    d_ab = max(min(phase_distance(x, y) for y in b) for x in a)
    d_ba = max(min(phase_distance(x, y) for y in a) for x in b)
    return max(d_ab, d_ba)


def confinement_experiment_isotropic(
    curve: PlaneCurve,
    scratch: ScratchPoint,
    n_samples: int = 5,
    seed: int = 0,
    eps_list: list[float] | None = None,
    sample_params: list[complex] | None = None,
) -> ConfinementReport:
    """Drive b^2 through an isotropic scratch point from sampled starts.

    Starts lie on the contracted curve: secant images of the tangency point's
    direction fiber.  Each start is perturbed by rotating the direction, the
    near-scratch branch is followed through both steps, and the extrapolated
    limits must lie on the direction fiber over the tangency point and vary
    with the start.
    """
    if scratch.kind not in ("isotropic_plus", "isotropic_minus"):
        raise BlowupError("expected an isotropic-kind scratch point")
    import random

    rng = random.Random(seed)
    eps = default_eps_schedule() if eps_list is None else list(eps_list)
    c = scratch.phase.c

    if sample_params is None:
        sample_params = []
        while len(sample_params) < n_samples:
            theta = rng.uniform(0, 2 * math.pi) + 1j * rng.uniform(-0.5, 0.5)
            sample_params.append(theta)

    starts: list[PhasePoint] = []
    for theta in sample_params:
        q_dir = rotate_direction(direction_point(1, 0, 1), theta)
        try:
            sec = secant(curve, PhasePoint(c=c, q=q_dir))
        except Exception:
            continue
        cands = [
            b.point
            for b in sec.images
            if not b.point.c.is_at_infinity
            and proj_distance(b.point.c, c) > 1e-3
        ]
        if not cands:
            continue
        starts.append(cands[0])

    if len(starts) < 2:
        raise BranchLostError("could not sample enough starts on the contracted curve")

    limit_groups: list[tuple[PhasePoint, ...]] = []
    samples_meta = []
    cauchy_all = True
    worst_diff = 0.0
    for x0 in starts:
        chain = []
        approach = []
        for e in eps:
            q_eps = rotate_direction(x0.q, e)
            x = PhasePoint(c=x0.c, q=q_eps)
            sec1 = secant(curve, x)
            best = None
            for br in sec1.images:
                d = proj_distance(br.point.c, c)
                if best is None or d < best[0]:
                    best = (d, br.point)
            if best is None:
                raise BranchLostError("first secant produced no branches")
            y_mid = best[1]
            r1 = reflect(curve, y_mid)
            y = r1.images[0].point
            approach.append(_scratch_chart_distance(y, scratch))
            sec2 = secant(curve, y)
            best2 = None
            for br in sec2.images:
                d = proj_distance(br.point.c, c)
                if best2 is None or d < best2[0]:
                    best2 = (d, br.point)
            if best2 is None:
                raise BranchLostError("second secant produced no branches")
            r2 = reflect(curve, best2[1])
            chain.append(_phase_vector(r2.images[0].point))
        if not _approached_scratch(approach):
            raise BranchLostError(
                f"branch stayed {approach[-1]:.2e} away from the scratch point"
            )
        last_dist = approach[-1]
        limit, final_diff, cauchy = _extrapolate_vector(chain)
        worst_diff = max(worst_diff, final_diff)
        cauchy_all = cauchy_all and cauchy
        limit_groups.append((_vector_to_phase(limit),))
        samples_meta.append(
            {
                "start": _phase_to_json(x0),
                "nearest_branch_distance": last_dist,
            }
        )

    min_sep = float("inf")
    for i in range(len(limit_groups)):
        for j in range(i + 1, len(limit_groups)):
            min_sep = min(min_sep, _set_distance(limit_groups[i], limit_groups[j]))

    return ConfinementReport(
        scratch=scratch,
        eps=tuple(eps),
        samples=tuple(samples_meta),
        limits=tuple(limit_groups),
        predicted=((),) * len(limit_groups),
        max_prediction_error=0.0,
        min_pairwise_limit_distance=min_sep,
        cauchy_ok=cauchy_all,
        max_final_diff=worst_diff,
    )
