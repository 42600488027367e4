"""Deterministic sampling of well-conditioned phase-space states.

Sampling is fully determined by the seed: identical (curve, count, seed)
always return identical states.  Points are produced by intersecting random
complex lines with the curve and pairing them with rotated directions, then
rejecting configurations too close to scratch points, to the infinity line,
or with degenerate form density, so that downstream finite-difference and
residual checks are well conditioned.
"""

from __future__ import annotations

import math
import random

from .curve import PlaneCurve, on_curve_residual, proj_point
from .numerics import find_roots
from .phase import (
    PhasePoint,
    direction_point,
    reflect_scratch_proximity,
    rotate_direction,
    secant_scratch_proximity,
)

__all__ = ["sample_phase_points", "sample_curve_points", "sample_real_state"]

SCRATCH_MARGIN = 5e-2


def sample_phase_points(
    curve: PlaneCurve,
    count: int,
    seed: int,
    *,
    scratch_margin: float = SCRATCH_MARGIN,
    max_tries: int = 100000,
) -> list[PhasePoint]:
    rng = random.Random(seed)
    out: list[PhasePoint] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("sampling failed to find enough generic states")
        theta = rng.uniform(0, 2 * math.pi) + 1j * rng.uniform(-0.6, 0.6)
        q = rotate_direction(direction_point(1, 0, 1), theta)
        anchor = (
            rng.uniform(-2, 2) + 1j * rng.uniform(-1, 1),
            rng.uniform(-2, 2) + 1j * rng.uniform(-1, 1),
            1.0,
        )
        direction = (
            rng.uniform(-1, 1) + 1j * rng.uniform(-0.5, 0.5),
            rng.uniform(-1, 1) + 1j * rng.uniform(-0.5, 0.5),
            0.0,
        )
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
        if abs(c.coords[2]) < 0.05 or max(abs(z) for z in c.coords) > 20:
            continue
        x = PhasePoint(c=c, q=q)
        if secant_scratch_proximity(curve, x) < scratch_margin:
            continue
        if reflect_scratch_proximity(curve, x) < scratch_margin:
            continue
        if on_curve_residual(curve, c) > 1e-9:
            continue
        # form density tau x q must be nondegenerate for frame-based checks
        q0, q1 = x.q.affine()
        try:
            from .curve import tangent_at

            td = tangent_at(curve, c)
        except Exception:
            continue
        t0, t1 = td.tangent
        tn = math.sqrt(abs(t0) ** 2 + abs(t1) ** 2)
        density = abs((t0 / tn) * (-q1) + (t1 / tn) * q0)
        if not (1e-3 < density < 1e3):
            continue
        out.append(x)
    return out


def sample_curve_points(curve: PlaneCurve, count: int, seed: int) -> list:
    """Affine, moderately sized points on the curve (for confinement starts)."""
    return [x.c for x in sample_phase_points(curve, count, seed)]


def sample_real_state(curve: PlaneCurve, seed: int, tries: int = 4000) -> PhasePoint:
    """A real affine state on a real curve, suitable for the classical map."""
    rng = random.Random(seed)
    for _ in range(tries):
        theta = rng.uniform(0, 2 * math.pi)
        q = rotate_direction(direction_point(1, 0, 1), theta)
        anchor = (rng.uniform(-2, 2), rng.uniform(-2, 2), 1.0)
        direction = (math.cos(theta), math.sin(theta), 0.0)
        poly = curve.restrict_to_line(anchor, direction)
        try:
            roots = find_roots(poly)
        except Exception:
            continue
        real_roots = [
            rc.value.real
            for rc in roots
            if abs(rc.value.imag) < 1e-9 * (1 + abs(rc.value))
        ]
        if not real_roots:
            continue
        t = real_roots[0]
        c = proj_point(anchor[0] + t * direction[0], anchor[1] + t * direction[1], 1.0)
        if max(abs(z) for z in c.coords) > 20:
            continue
        x = PhasePoint(c=c, q=q)
        if secant_scratch_proximity(curve, x) < SCRATCH_MARGIN:
            continue
        if on_curve_residual(curve, c) > 1e-9:
            continue
        return x
    raise RuntimeError("could not sample a real state on the curve")
