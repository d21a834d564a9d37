"""Pressure force on a small disk next to a point vortex.

A vortex of strength 2 pi sits at (1, 0); the disk of radius eps is at rest
with circulation 1.  The term carrying the body circulation equals the
Kutta-Joukowski lift (u(0) - ell)^perp = (1, 0), and the whole force
approaches it as eps shrinks.  An ellipse-shaped body is shown for contrast.
"""
import numpy as np

from smallbody import BodyGeometry, VorticityField, joukowski_family_map, unit_disk_map
from smallbody.finite_eps import EpsState, force_terms, lift_residual

state = EpsState(ell=[0.0, 0.0], r=0.0, theta=0.0, h=[0.0, 0.0],
                 field=VorticityField([[1.0, 0.0]], [2 * np.pi]))

print(f"{'eps':>6s} {'C_b':>26s} {'B + C':>26s} {'distance to lift':>17s}")
for eps in (0.4, 0.2, 0.1, 0.05, 0.025):
    geom = BodyGeometry(unit_disk_map(), eps)
    ft = force_terms(state, geom, gamma=1.0)
    total = ft.B + ft.C
    res, _ = lift_residual(state, geom, 1.0)
    print(f"{eps:6.3f} ({ft.C_b[0]:+.6f}, {ft.C_b[1]:+.6f}) "
          f"({total[0]:+.6f}, {total[1]:+.6f}) {res:17.3e}")

geom = BodyGeometry(joukowski_family_map(0.5), 0.2)
ft = force_terms(state, geom, gamma=1.0)
print("ellipse, eps = 0.2:")
for k, v in ft.as_dict().items():
    print(f"  {k:16s} {v}")
