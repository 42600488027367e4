"""Classical billiards in an ellipse, driven through the algebraic machinery.

The real map is one branch of the complex correspondence: launch a point on
x^2/4 + y^2 = 1, bounce it around, and watch the reflection law and the
2-periodic vertical orbit fall out of the same code that handles complex
branches.
"""

import math

from algbilliards import PlaneCurve, direction_point, phase_point, proj_point
from algbilliards.phase import real_billiard_step

ellipse = PlaneCurve.from_coeffs(2, {(2, 0, 0): 1, (0, 2, 0): 4, (0, 0, 2): -4})

# fire from the right vertex at 135 degrees
S2 = math.sqrt(2)
x = phase_point(ellipse, proj_point(2, 0, 1), direction_point(-S2 / 2, S2 / 2, 1))

print("step   position                     direction")
for step in range(12):
    cx, cy = x.c.affine()
    qx, qy = x.q.affine()
    print(f"{step:3d}   ({cx.real:+.6f}, {cy.real:+.6f})   ({qx.real:+.6f}, {qy.real:+.6f})")
    x = real_billiard_step(ellipse, x)

# the minor axis is a 2-periodic orbit: down, up, down, up, ...
x = phase_point(ellipse, proj_point(0, 1, 1), direction_point(0, -1, 1))
y = real_billiard_step(ellipse, x)
z = real_billiard_step(ellipse, y)
print("\nvertical bounce:")
print("  start ", x.c.affine()[1].real, " -> ", y.c.affine()[1].real, " -> ", z.c.affine()[1].real)
