"""The massive point vortex interacting with three ordinary point vortices.

The energy and the linear impulse  xi - gamma h^perp - (sum g_j x_j)^perp
are first integrals.  We watch both along a run and check that the Poisson
bracket reproduces the time derivative of a few observables.
"""
import numpy as np

from smallbody import LimitParams, LimitState, VorticityField
from smallbody.limit_dynamics import poisson_bracket_check, run

blobs = VorticityField([[1.5, 0.2], [-1.0, 1.2], [0.3, -1.7]], [1.0, -0.7, 1.3])
params = LimitParams(m=1.0, gamma=0.8, dt=1e-3)
state = LimitState([0.1, 0.0], [0.3, 0.2], blobs)
traj = run(state, params, T=10.0, stride=1000)


def perp(v):
    return np.stack([-v[:, 1], v[:, 0]], axis=1)


moment = np.einsum("j,kjc->kc", traj.strengths, traj.blob_positions)
impulse = traj.xi - params.gamma * perp(traj.h) - perp(moment)

print(f"{'t':>5s} {'H':>18s} {'impulse':>32s}")
for t, H, p in zip(traj.t, traj.hamiltonian, impulse):
    print(f"{t:5.1f} {H:18.12f}   ({p[0]:+.12f}, {p[1]:+.12f})")

for name in ("h1", "xi_sq", "moment_x1", "hamiltonian"):
    lhs, rhs = poisson_bracket_check(traj.final_state, params, name)
    print(f"d/dt {name:11s} = {lhs:+.8f}   {{F, H}} = {rhs:+.8f}")
