"""Multivaluedness on a cubic: a billiard step has d - 1 = 2 branches.

Iterating the correspondence grows a binary tree of states; every branch is
itself reversible through a conjugated backward step.
"""

from algbilliards import PlaneCurve, billiard_step, reflect
from algbilliards.phase import orbit_tree, phase_distance
from algbilliards.sampling import sample_phase_points

# x^3 + 2 y^3 + x + y + 1 = 0, a table in general position
cubic = PlaneCurve.from_coeffs(
    3, {(3, 0, 0): 1, (0, 3, 0): 2, (0, 0, 3): 1, (1, 0, 2): 1, (0, 1, 2): 1}
)
x = sample_phase_points(cubic, 1, seed=9)[0]

step = billiard_step(cubic, x)
print(f"one billiard step from a generic state has {step.total_multiplicity()} branches:")
for br in step.images:
    cx, cy = br.point.c.affine()
    print(f"   branch -> ({cx:.4f}, {cy:.4f})  multiplicity {br.multiplicity}")

# reversibility: conjugating by the reflection inverts the correspondence
y = step.images[0].point
ry = reflect(cubic, y).images[0].point
back = [reflect(cubic, b.point).images[0].point for b in billiard_step(cubic, ry).images]
print("reverse-step distance to the start:",
      min(phase_distance(b, x) for b in back))

tree = orbit_tree(cubic, x, depth=8)
print("\norbit tree level masses (should double each level):")
for k in range(tree.depth + 1):
    print(f"   level {k}: {tree.level_mass(k)}")
