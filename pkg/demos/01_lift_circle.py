"""A massive point carrying circulation, with no surrounding vorticity.

The lift force gamma h'^perp bends a straight path into a circle of radius
m |h'(0)| / gamma, travelled with period 2 pi m / gamma.  We integrate with
RK4 and compare against that closed form.
"""
import numpy as np

from smallbody import LimitParams, LimitState, VorticityField
from smallbody.limit_dynamics import run

m, gamma = 1.0, 2 * np.pi
params = LimitParams(m=m, gamma=gamma, dt=1e-3)
state = LimitState(h=[0.0, 0.0], xi=[m * 1.0, 0.0], field=VorticityField.empty())
traj = run(state, params, T=3.0, stride=250)

omega = gamma / m
exact = (np.exp(1j * omega * traj.t) - 1) / (1j * omega)
err = np.hypot(traj.h[:, 0] - exact.real, traj.h[:, 1] - exact.imag)

print(f"{'t':>6s} {'h1':>12s} {'h2':>12s} {'error':>10s}")
for t, h, e in zip(traj.t, traj.h, err):
    print(f"{t:6.2f} {h[0]:12.8f} {h[1]:12.8f} {e:10.2e}")
print(f"radius {m / gamma:.6f}, period {2 * np.pi * m / gamma:.3f}")
