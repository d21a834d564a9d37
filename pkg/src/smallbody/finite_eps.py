"""Finite-size body: pressure force decomposition and the coupled body/blob
system in the body frame.

The pressure force and torque ``F`` on the body are never obtained from a
pointwise pressure.  They are assembled from

    -F_i = (M2 (ell, r)')_i + B_i + C_i,

where ``B`` pairs the vorticity with the Kirchhoff gradients and ``C`` is a
boundary integral of the quadratic potential ``Q`` against ``K_i``, split
into four pieces ``C_a..C_d``.  The added-mass term is moved to the left of
the solid equations,

    (M1 + M2) (ell, r)' = -(B + C) + (-m r ell^perp, 0),
    theta' = r,   h' = Q(theta) ell.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._vec import to_complex, to_vec
from .conformal import BodyGeometry
from .contour import BoundaryCurve, blasius_force, xi_zeta
from .errors import CollisionError, NonFiniteError, SingularityError, TangencyError
from .kernels import (
    VorticityField,
    _harmonic_conj,
    _velocity_c,
    biot_savart_plane,
    green_hydrodynamic,
    hydrodynamic_regular_diagonal,
    stream_harmonic,
    velocity_at_blobs,
)
from .limit_dynamics import LimitParams, LimitState
from .limit_dynamics import run as run_limit
from .potentials import added_mass_series, kirchhoff_gradients_c

DEFAULT_NODES = 256


@dataclass(frozen=True)
class EpsParams:
    m: float
    J0: float
    gamma: float
    dt: float = 1e-3
    n_nodes: int = DEFAULT_NODES

    def __post_init__(self):
        if not (self.m > 0 and self.J0 > 0):
            raise ValueError("m and J0 must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True)
class EpsState:
    """Body-frame state: velocities ``ell``, ``r``, angle ``theta``, lab
    centre ``h`` and body-frame blobs."""

    ell: np.ndarray
    r: float
    theta: float
    h: np.ndarray
    field: VorticityField
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "ell", np.asarray(self.ell, dtype=np.float64).reshape(2))
        object.__setattr__(self, "h", np.asarray(self.h, dtype=np.float64).reshape(2))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def solid_velocity(self) -> np.ndarray:
        return np.array([self.ell[0], self.ell[1], self.r])


@dataclass(frozen=True)
class ForceBreakdown:
    """Pressure force terms, each a 3-vector indexed by ``i = 1, 2, 3``."""

    B: np.ndarray
    C_a: np.ndarray
    C_b: np.ndarray
    C_c: np.ndarray
    C_d: np.ndarray
    added_mass_term: np.ndarray
    total_force: np.ndarray
    total_torque: float
    blasius_residual: float | None = None

    @property
    def C(self) -> np.ndarray:
        return self.C_a + self.C_b + self.C_c + self.C_d

    def as_dict(self) -> dict:
        out = {k: [float(v) for v in getattr(self, k)]
               for k in ("B", "C_a", "C_b", "C_c", "C_d", "added_mass_term", "total_force")}
        out["total_torque"] = float(self.total_torque)
        out["blasius_residual"] = None if self.blasius_residual is None else float(self.blasius_residual)
        return out


@lru_cache(maxsize=64)
def inertia(geom: BodyGeometry, m: float, J0: float) -> tuple[np.ndarray, np.ndarray]:
    """``(M1 + M2, M2)`` with ``M2`` from the Laurent coefficients."""
    m2 = added_mass_series(geom)
    m1 = np.diag([m, m, geom.epsilon**2 * J0])
    return m1 + m2, m2


def _rigid(ell, r, z):
    return ell[0] + 1j * ell[1] + r * 1j * z


def _v_tilde_c(geom, state: EpsState, z):
    return _velocity_c(geom, state.field, state.ell, state.r, 0.0, z)


def pressure_potential(state: EpsState, geom: BodyGeometry, gamma: float):
    """The function ``x -> Q(x)`` built from ``v~``, ``H`` and the rigid velocity."""

    def Q(x):
        z = np.asarray(to_complex(x))
        shape = z.shape
        z = z.reshape(-1)
        vt = _v_tilde_c(geom, state, z)
        u = _rigid(state.ell, state.r, z)
        h = np.conj(_harmonic_conj(geom, z))
        dot = lambda a, b: (a * np.conj(b)).real
        q = 0.5 * dot(vt, vt) + gamma * dot(vt - u, h) + 0.5 * gamma**2 * dot(h, h) - dot(u, vt)
        return q.reshape(shape)

    return Q


def _boundary(geom, n):
    z, tau, normal, ds = BoundaryCurve(geom, n).frame()
    k = np.stack([normal.real, normal.imag, (1j * z * np.conj(normal)).real])
    return z, normal, ds, k


def _b_term(geom, state, gamma):
    f = state.field
    if len(f) == 0:
        return np.zeros(3)
    v = to_complex(velocity_at_blobs(geom, f, state.ell, state.r, gamma))
    rel = v - _rigid(state.ell, state.r, f.z)
    grads = kirchhoff_gradients_c(geom, f.z)
    # a^perp . b  =  Re(i a conj(b))
    return np.sum(f.strengths[None, :] * (1j * rel[None, :] * np.conj(grads)).real, axis=1)


def force_terms(state: EpsState, geom: BodyGeometry, gamma: float,
                accel: Sequence[float] | None = None, n_nodes: int = DEFAULT_NODES,
                cross_check: bool = True) -> ForceBreakdown:
    """All pressure-force terms for ``state``.

    ``accel`` is ``(ell', r')``; the added-mass contribution ``M2 accel`` is
    included in the total force only when it is given.
    """
    z, normal, ds, k = _boundary(geom, n_nodes)
    vt = _v_tilde_c(geom, state, z)
    u = _rigid(state.ell, state.r, z)
    h = np.conj(_harmonic_conj(geom, z))

    def integrate(density):
        return np.sum(k * (density * ds)[None, :], axis=1)

    dot = lambda a, b: (a * np.conj(b)).real
    c_a = integrate(0.5 * dot(vt, vt))
    c_b = integrate(gamma * dot(vt - u, h))
    c_c = integrate(0.5 * gamma**2 * dot(h, h))
    c_d = integrate(-dot(u, vt))
    b = _b_term(geom, state, gamma)
    if not np.all(np.isfinite(np.concatenate([b, c_a, c_b, c_c, c_d]))):
        raise NonFiniteError("non-finite force terms")

    m2 = added_mass_series(geom)
    a_term = m2 @ np.asarray(accel, dtype=float) if accel is not None else np.zeros(3)
    minus_f = a_term + b + c_a + c_b + c_c + c_d

    residual = None
    if cross_check and gamma != 0.0:
        residual = _blasius_cross_check(geom, state, gamma, c_b, n_nodes)
    return ForceBreakdown(b, c_a, c_b, c_c, c_d, a_term, -minus_f[:2], float(-minus_f[2]), residual)


def _blasius_cross_check(geom, state, gamma, c_b, n_nodes):
    def rel_velocity(x):
        zz = to_complex(x)
        return to_vec(_v_tilde_c(geom, state, zz) - _rigid(state.ell, state.r, zz))

    def harmonic(x):
        return to_vec(np.conj(_harmonic_conj(geom, to_complex(x))))

    try:
        force, torque = blasius_force(BoundaryCurve(geom, n_nodes), rel_velocity, harmonic)
    except TangencyError:
        return None
    return float(np.max(np.abs(gamma * np.array([force[0], force[1], torque]) - c_b)))


def lift_residual(state: EpsState, geom: BodyGeometry, gamma: float,
                  n_nodes: int = DEFAULT_NODES) -> tuple[float, float]:
    """Distance of the non-added-mass force from its small-body limit.

    Returns ``(|(B + C)_{1,2} - gamma (u(0) - ell)^perp - eps r gamma xi|,
    |(B + C)_3 - gamma eps zeta . (u(0) - ell)| / eps)`` where ``u`` is the
    plane velocity of the blobs.
    """
    ft = force_terms(state, geom, gamma, n_nodes=n_nodes, cross_check=False)
    total = ft.B + ft.C
    u0 = biot_savart_plane(state.field, np.zeros(2)) if len(state.field) else np.zeros(2)
    rel = u0 - state.ell
    xi, zeta = xi_zeta(geom.map)
    eps = geom.epsilon
    limit12 = gamma * np.array([-rel[1], rel[0]]) + eps * state.r * gamma * xi
    limit3 = gamma * eps * float(np.dot(zeta, rel))
    return (float(np.linalg.norm(total[:2] - limit12)), abs(total[2] - limit3) / eps)


def boundary_circulation(state: EpsState, geom: BodyGeometry, gamma: float,
                         n_nodes: int = 512) -> float:
    """``oint v . tau ds`` around the body."""
    curve = BoundaryCurve(geom, n_nodes)
    z, dz = curve.nodes()
    v = _velocity_c(geom, state.field, state.ell, state.r, gamma, z)
    return float(np.mean(np.conj(v) * dz).real)


# ---------------------------------------------------------------------------
# right-hand sides


def blob_rhs_body_frame(state: EpsState, geom: BodyGeometry, gamma: float) -> np.ndarray:
    """Blob velocities ``v_{-j}(x_j) - ell - r x_j^perp`` in the body frame."""
    f = state.field
    if len(f) == 0:
        return np.zeros((0, 2))
    v = to_complex(velocity_at_blobs(geom, f, state.ell, state.r, gamma))
    return to_vec(v - _rigid(state.ell, state.r, f.z)).reshape(-1, 2)


@dataclass(frozen=True)
class SolidDerivative:
    dell: np.ndarray
    dr: float
    dtheta: float
    dh: np.ndarray
    forces: ForceBreakdown


def solid_rhs(state: EpsState, geom: BodyGeometry, params: EpsParams) -> SolidDerivative:
    """Solve the solid equations for ``(ell', r')`` and return all solid rates."""
    total, _ = inertia(geom, params.m, params.J0)
    ft = force_terms(state, geom, params.gamma, n_nodes=params.n_nodes, cross_check=False)
    ell, r = state.ell, state.r
    rhs = -(ft.B + ft.C)
    rhs[:2] += -params.m * r * np.array([-ell[1], ell[0]])
    accel = np.linalg.solve(total, rhs)
    c, s = np.cos(state.theta), np.sin(state.theta)
    dh = np.array([c * ell[0] - s * ell[1], s * ell[0] + c * ell[1]])
    m2 = total - np.diag([params.m, params.m, geom.epsilon**2 * params.J0])
    a_term = m2 @ accel
    minus_f = a_term + ft.B + ft.C
    ft = replace(ft, added_mass_term=a_term, total_force=-minus_f[:2], total_torque=float(-minus_f[2]))
    return SolidDerivative(accel[:2], float(accel[2]), r, dh, ft)


def energy(state: EpsState, geom: BodyGeometry, params: EpsParams) -> float:
    """Conserved energy of the coupled point-vortex/body system.

    ``1/2 X^T M X - 1/2 [sum_{j != k} G_H g_j g_k + sum_j g_j^2 R_H(x_j)]
    - gamma sum_j g_j Psi_H(x_j)``, with ``R_H`` the regular part of the
    hydrodynamic Green's function on the diagonal.
    """
    total, _ = inertia(geom, params.m, params.J0)
    x = state.solid_velocity
    e = 0.5 * x @ total @ x
    f = state.field
    if len(f):
        pos = f.positions
        g = f.strengths
        n = len(f)
        if n > 1:
            ii, jj = np.triu_indices(n, 1)
            gh = green_hydrodynamic(geom, pos[ii], pos[jj])
            e -= float(np.sum(gh * g[ii] * g[jj]))
        e -= 0.5 * float(np.sum(g**2 * hydrodynamic_regular_diagonal(geom, pos)))
        e -= params.gamma * float(np.sum(g * stream_harmonic(geom, pos)))
    return float(e)


# ---------------------------------------------------------------------------
# time integration


@dataclass
class EpsTrajectory:
    t: np.ndarray
    ell: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    h: np.ndarray
    energy: np.ndarray
    support_radius: np.ndarray
    max_speed: np.ndarray
    blob_positions: np.ndarray      # (K, N, 2), body frame
    strengths: np.ndarray
    dt: float
    epsilon: float
    forces: list = field(default_factory=list)
    final_state: EpsState | None = None

    def records(self):
        for k in range(len(self.t)):
            rec = {
                "t": float(self.t[k]),
                "h": [float(v) for v in self.h[k]],
                "ell": [float(v) for v in self.ell[k]],
                "r": float(self.r[k]),
                "theta": float(self.theta[k]),
                "H": float(self.energy[k]),
                "support_radius": float(self.support_radius[k]),
                "blobs": [{"x": [float(p[0]), float(p[1])], "strength": float(g)}
                          for p, g in zip(self.blob_positions[k], self.strengths)],
            }
            if self.forces:
                rec["forces"] = self.forces[k].as_dict()
            yield rec


def _require_disk(geom):
    if not geom.is_disk:
        raise ValueError("coupled finite-size integration is only available for the disk")


def _derivative(state, geom, params):
    try:
        solid = solid_rhs(state, geom, params)
        blobs = blob_rhs_body_frame(state, geom, params.gamma)
    except SingularityError as exc:
        raise CollisionError(str(exc)) from exc
    return solid, blobs


def _advance(state, d, dt):
    solid, blobs = d
    z = state.field.z + dt * to_complex(blobs) if len(state.field) else state.field.z
    return EpsState(state.ell + dt * solid.dell, state.r + dt * solid.dr,
                    state.theta + dt * solid.dtheta, state.h + dt * solid.dh,
                    state.field.moved(z), state.t + dt)


def step_coupled(state: EpsState, geom: BodyGeometry, params: EpsParams,
                 dt: float | None = None) -> EpsState:
    """One RK4 step of the coupled body/blob system."""
    dt = params.dt if dt is None else dt
    k1 = _derivative(state, geom, params)
    k2 = _derivative(_advance(state, k1, 0.5 * dt), geom, params)
    k3 = _derivative(_advance(state, k2, 0.5 * dt), geom, params)
    k4 = _derivative(_advance(state, k3, dt), geom, params)

    def comb(get):
        return (get(k1) + 2 * get(k2) + 2 * get(k3) + get(k4)) / 6

    ell = state.ell + dt * comb(lambda k: k[0].dell)
    r = state.r + dt * comb(lambda k: k[0].dr)
    theta = state.theta + dt * comb(lambda k: k[0].dtheta)
    h = state.h + dt * comb(lambda k: k[0].dh)
    z = state.field.z + dt * to_complex(comb(lambda k: k[1])) if len(state.field) else state.field.z
    values = np.concatenate([ell, [r, theta], h, np.atleast_1d(np.abs(z))])
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"non-finite state at t={state.t + dt:g}")
    new = EpsState(ell, r, theta, h, state.field.moved(z), state.t + dt)
    if len(new.field):
        geom.check_outside(new.field.z, "vortex blob")
    return new


def run_coupled(initial: EpsState, geom: BodyGeometry, params: EpsParams, T: float,
                stride: int = 1, record_forces: bool = False) -> EpsTrajectory:
    """Integrate the coupled disk/blob system to time ``T``."""
    _require_disk(geom)
    n = int(round(T / params.dt))
    if n < 0 or abs(n * params.dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T={T} is not a whole number of steps of dt={params.dt}")
    if len(initial.field):
        geom.check_outside(initial.field.z, "vortex blob")
    rows = {k: [] for k in ("t", "ell", "r", "theta", "h", "E", "rho", "speed", "pos")}
    forces = []

    def record(s):
        rows["t"].append(s.t)
        rows["ell"].append(s.ell)
        rows["r"].append(s.r)
        rows["theta"].append(s.theta)
        rows["h"].append(s.h)
        rows["E"].append(energy(s, geom, params))
        rows["rho"].append(s.field.support_radius)
        sp = blob_rhs_body_frame(s, geom, params.gamma)
        rows["speed"].append(float(np.max(np.hypot(sp[:, 0], sp[:, 1]))) if len(sp) else 0.0)
        rows["pos"].append(s.field.positions)
        if record_forces:
            forces.append(solid_rhs(s, geom, params).forces)

    state = initial
    record(state)
    for i in range(1, n + 1):
        state = step_coupled(state, geom, params)
        if i % stride == 0 or i == n:
            record(state)
    k = len(rows["t"])
    return EpsTrajectory(
        np.asarray(rows["t"]), np.asarray(rows["ell"]).reshape(k, 2), np.asarray(rows["r"]),
        np.asarray(rows["theta"]), np.asarray(rows["h"]).reshape(k, 2), np.asarray(rows["E"]),
        np.asarray(rows["rho"]), np.asarray(rows["speed"]),
        np.asarray(rows["pos"]).reshape(k, len(initial.field), 2), initial.field.strengths.copy(),
        params.dt, geom.epsilon, forces, state,
    )


def matched_limit_data(initial: EpsState, params: EpsParams) -> tuple[LimitState, LimitParams]:
    """Limit-system data with the same ``gamma``, blobs, ``h0`` and initial velocity."""
    c, s = np.cos(initial.theta), np.sin(initial.theta)
    rot = np.array([[c, -s], [s, c]])
    lab = initial.field.positions @ rot.T + initial.h
    core = float(np.max(initial.field.cores)) if len(initial.field) else 0.0
    field_lab = VorticityField(lab, initial.field.strengths, initial.field.cores)
    state = LimitState(initial.h, params.m * (rot @ initial.ell), field_lab, initial.t)
    return state, LimitParams(params.m, params.gamma, core, params.dt)


@dataclass(frozen=True)
class ConvergenceRow:
    epsilon: float
    sup_error: float
    final_error: float
    energy_drift: float
    eps_r_max: float
    eps_r_drift: float

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class ConvergenceReport:
    rows: list

    @property
    def sup_errors(self) -> np.ndarray:
        return np.array([r.sup_error for r in self.rows])

    @property
    def monotone(self) -> bool | None:
        """Strict decrease of ``sup_error`` as epsilon decreases (None for one row)."""
        if len(self.rows) < 2:
            return None
        order = np.argsort([-r.epsilon for r in self.rows])
        errs = self.sup_errors[order]
        return bool(np.all(np.diff(errs) < 0))

    def as_dict(self) -> dict:
        return {"rows": [r.as_dict() for r in self.rows], "monotone": self.monotone}


def convergence_study(initial: EpsState, params: EpsParams, epsilons: Sequence[float], T: float,
                      stride: int = 1, executor=None) -> ConvergenceReport:
    """Finite-size runs for each epsilon against the limit run from matched data.

    ``executor`` (anything with ``map``) may run the epsilon values concurrently;
    results do not depend on it.
    """
    from .conformal import unit_disk_map

    limit_state, limit_params = matched_limit_data(initial, params)
    reference = run_limit(limit_state, limit_params, T, stride=stride)

    def one(eps):
        geom = BodyGeometry(unit_disk_map(), float(eps))
        traj = run_coupled(initial, geom, params, T, stride=stride)
        err = np.linalg.norm(traj.h - reference.h, axis=1)
        e0 = traj.energy[0]
        drift = float(np.max(np.abs(traj.energy - e0)) / max(1.0, abs(e0)))
        eps_r = eps * np.abs(traj.r)
        return ConvergenceRow(float(eps), float(np.max(err)), float(err[-1]), drift,
                              float(np.max(eps_r)), float(np.max(eps_r) - np.min(eps_r)))

    mapper = executor.map if executor is not None else map
    return ConvergenceReport(list(mapper(one, list(epsilons))))


# ---------------------------------------------------------------------------
# support-radius monitor


@dataclass(frozen=True)
class SupportReport:
    margin: np.ndarray
    min_margin: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.min_margin >= self.slack


def support_radius_monitor(trajectory) -> SupportReport:
    """Check ``rho(t) <= rho(0) + int_0^t max blob speed`` along a trajectory.

    Works on any trajectory exposing ``t``, ``support_radius``, ``max_speed``
    and ``dt``.  The allowed discretisation slack is ``-10 dt max speed``.
    """
    t = np.asarray(trajectory.t)
    rho = np.asarray(trajectory.support_radius)
    speed = np.asarray(trajectory.max_speed)
    integral = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(t))])
    margin = rho[0] + integral - rho
    slack = -10.0 * trajectory.dt * float(np.max(speed)) if speed.size else 0.0
    return SupportReport(margin, float(np.min(margin)), slack)
