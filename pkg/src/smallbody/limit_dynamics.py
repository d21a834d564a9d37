"""The shrunk-body limit: a massive point vortex with lift, coupled to
vortex blobs.

    h' = xi / m
    xi' = gamma (xi / m - u(h))^perp
    x_j' = u_{-j}(x_j) + gamma H(x_j - h)

``u`` is the plane Biot-Savart velocity of the blobs (``u_{-j}`` omits blob
``j``) and ``H(x) = x^perp / (2 pi |x|^2)``.  The system is Hamiltonian; the
energy and the bracket are provided as monitors.

All blob interactions, including blob/point-mass, use the single core radius
``LimitParams.core`` so the regularised system keeps its exact conservation
law.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np
from numpy.typing import ArrayLike

from ._vec import to_complex, to_vec
from .errors import CollisionError, NonFiniteError, SingularityError
from .kernels import VorticityField, biot_savart_plane

TWO_PI = 2.0 * np.pi
MIN_DISTANCE = 1e-12


@dataclass(frozen=True)
class LimitParams:
    m: float
    gamma: float
    core: float = 0.0
    dt: float = 1e-3
    integrator: str = "rk4"

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("mass m must be positive")
        if not self.dt > 0:
            raise ValueError("time step dt must be positive")
        if self.core < 0:
            raise ValueError("core must be nonnegative")
        if self.integrator != "rk4":
            raise ValueError(f"unknown integrator {self.integrator!r}")


@dataclass(frozen=True)
class LimitState:
    h: np.ndarray
    xi: np.ndarray
    field: VorticityField
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "h", np.asarray(self.h, dtype=np.float64).reshape(2))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=np.float64).reshape(2))


@dataclass(frozen=True)
class LimitDerivative:
    dh: np.ndarray
    dxi: np.ndarray
    blob_velocity: np.ndarray   # (N, 2)


@dataclass(frozen=True)
class HamiltonianReport:
    kinetic: float
    blob_interaction: float
    blob_mass_coupling: float

    @property
    def value(self) -> float:
        return self.kinetic + self.blob_interaction + self.blob_mass_coupling


def u_tilde(field: VorticityField, x: ArrayLike) -> np.ndarray:
    """Plane Biot-Savart velocity of the blobs."""
    return biot_savart_plane(field, x)


# ---------------------------------------------------------------------------
# kernel with a common core


def _kernel(dz, core):
    """``i dz / (2 pi max(|dz|^2, core^2))``: velocity at ``src + dz`` of a unit vortex."""
    r2 = dz.real**2 + dz.imag**2
    return 1j * dz / (TWO_PI * np.maximum(r2, core * core))


def _green(r, core):
    """Radial stream function whose perpendicular gradient is :func:`_kernel`."""
    r = np.asarray(r, dtype=np.float64)
    if core == 0.0:
        return np.log(r) / TWO_PI
    inner = np.log(core) / TWO_PI + (r * r - core * core) / (2 * TWO_PI * core * core)
    with np.errstate(divide="ignore"):
        outer = np.log(r) / TWO_PI
    return np.where(r < core, inner, outer)


def _check_distances(z, h, core):
    floor = max(core, MIN_DISTANCE)
    if len(z):
        d = np.abs(z - h)
        if np.min(d) < floor:
            j = int(np.argmin(d))
            raise CollisionError(f"blob {j} collided with the point mass (distance {d[j]:.3e})")
    if core == 0.0 and len(z) > 1:
        dd = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(dd, np.inf)
        if np.min(dd) < MIN_DISTANCE:
            raise CollisionError("two point vortices coincide")


def _rhs_arrays(h, xi, z, gam, params: LimitParams):
    """Complex time derivatives ``(h', xi', x_j')``."""
    core = params.core
    _check_distances(z, h, core)
    if len(z):
        u_h = np.sum(gam * _kernel(h - z, core))
        dz = z[:, None] - z[None, :]
        np.fill_diagonal(dz, 1.0)
        pair = _kernel(dz, core)
        np.fill_diagonal(pair, 0.0)
        u_blobs = pair @ gam + params.gamma * _kernel(z - h, core)
    else:
        u_h = 0j
        u_blobs = np.zeros(0, dtype=np.complex128)
    dh = xi / params.m
    dxi = params.gamma * 1j * (xi / params.m - u_h)
    return dh, dxi, u_blobs


def limit_rhs(state: LimitState, params: LimitParams) -> LimitDerivative:
    """Time derivative of the limit state."""
    f = state.field
    dh, dxi, ub = _rhs_arrays(to_complex(state.h), to_complex(state.xi), f.z, f.strengths, params)
    return LimitDerivative(to_vec(dh), to_vec(dxi), to_vec(ub).reshape(-1, 2))


def hamiltonian(state: LimitState, params: LimitParams) -> HamiltonianReport:
    """Renormalised energy ``|xi|^2/2m - 1/2 sum_{j!=k} G g_j g_k - gamma sum G(x_j-h) g_j``."""
    z, gam = state.field.z, state.field.strengths
    core = params.core
    kinetic = float(np.dot(state.xi, state.xi) / (2 * params.m))
    if len(z) == 0:
        return HamiltonianReport(kinetic, 0.0, 0.0)
    dd = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(dd, 1.0)
    if core == 0.0 and np.any(dd < MIN_DISTANCE):
        raise SingularityError("coincident point vortices in the Hamiltonian")
    g = _green(dd, core)
    np.fill_diagonal(g, 0.0)
    interaction = float(-0.5 * gam @ g @ gam)
    dist_h = np.abs(z - to_complex(state.h))
    if core == 0.0 and np.any(dist_h < MIN_DISTANCE):
        raise SingularityError("point vortex located at the point mass")
    coupling = float(-params.gamma * np.sum(_green(dist_h, core) * gam))
    return HamiltonianReport(kinetic, interaction, coupling)


# ---------------------------------------------------------------------------
# time stepping


def _pack(state: LimitState):
    return to_complex(state.h), to_complex(state.xi), state.field.z.copy()


def step(state: LimitState, params: LimitParams, dt: float | None = None) -> LimitState:
    """One classical Runge-Kutta step."""
    dt = params.dt if dt is None else dt
    gam = state.field.strengths
    h, xi, z = _pack(state)

    def f(h_, xi_, z_):
        return _rhs_arrays(h_, xi_, z_, gam, params)

    k1 = f(h, xi, z)
    k2 = f(h + 0.5 * dt * k1[0], xi + 0.5 * dt * k1[1], z + 0.5 * dt * k1[2])
    k3 = f(h + 0.5 * dt * k2[0], xi + 0.5 * dt * k2[1], z + 0.5 * dt * k2[2])
    k4 = f(h + dt * k3[0], xi + dt * k3[1], z + dt * k3[2])
    h_new = h + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    xi_new = xi + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    z_new = z + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    if not (np.isfinite(h_new) and np.isfinite(xi_new) and np.all(np.isfinite(z_new))):
        raise NonFiniteError(f"non-finite state at t={state.t + dt:g}")
    return LimitState(to_vec(h_new), to_vec(xi_new), state.field.moved(z_new), state.t + dt)


@dataclass
class Trajectory:
    """Samples of a run, one row per output stride."""

    t: np.ndarray
    h: np.ndarray
    xi: np.ndarray
    hamiltonian: np.ndarray
    support_radius: np.ndarray
    max_speed: np.ndarray
    center_of_vorticity: np.ndarray
    blob_positions: np.ndarray      # (K, N, 2)
    strengths: np.ndarray
    dt: float
    final_state: LimitState | None = None
    extra: dict = field(default_factory=dict)

    def records(self):
        """JSON-ready dicts in the trajectory schema."""
        for k in range(len(self.t)):
            yield {
                "t": float(self.t[k]),
                "h": [float(v) for v in self.h[k]],
                "xi": [float(v) for v in self.xi[k]],
                "H": float(self.hamiltonian[k]),
                "support_radius": float(self.support_radius[k]),
                "blobs": [{"x": [float(p[0]), float(p[1])], "strength": float(g)}
                          for p, g in zip(self.blob_positions[k], self.strengths)],
            }


def _n_steps(T, dt):
    n = int(round(T / dt))
    if n < 0 or abs(n * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T={T} is not a whole number of steps of dt={dt}")
    return n


def run(initial: LimitState, params: LimitParams, T: float, stride: int = 1,
        observers: Mapping[str, Callable[[LimitState], float]] | None = None) -> Trajectory:
    """Integrate to time ``T`` with fixed RK4 steps, sampling every ``stride`` steps."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    n = _n_steps(T, params.dt)
    observers = dict(observers or {})
    rows = {k: [] for k in ("t", "h", "xi", "H", "rho", "speed", "cov", "pos")}
    extra = {k: [] for k in observers}

    def record(s):
        d = limit_rhs(s, params)
        rows["t"].append(s.t)
        rows["h"].append(s.h)
        rows["xi"].append(s.xi)
        rows["H"].append(hamiltonian(s, params).value)
        rows["rho"].append(s.field.support_radius)
        sp = np.hypot(d.blob_velocity[:, 0], d.blob_velocity[:, 1])
        rows["speed"].append(float(np.max(sp)) if sp.size else 0.0)
        rows["cov"].append(s.field.center_of_vorticity())
        rows["pos"].append(s.field.positions)
        for k, obs in observers.items():
            extra[k].append(obs(s))

    state = initial
    record(state)
    for i in range(1, n + 1):
        state = step(state, params)
        if i % stride == 0 or i == n:
            record(state)
    return Trajectory(
        np.asarray(rows["t"]), np.asarray(rows["h"]), np.asarray(rows["xi"]),
        np.asarray(rows["H"]), np.asarray(rows["rho"]), np.asarray(rows["speed"]),
        np.asarray(rows["cov"]).reshape(-1, 2),
        np.asarray(rows["pos"]).reshape(len(rows["t"]), len(initial.field), 2),
        initial.field.strengths.copy(), params.dt, state,
        {k: np.asarray(v) for k, v in extra.items()},
    )


def reverse_state(state: LimitState, params: LimitParams) -> tuple[LimitState, LimitParams]:
    """Time-reversed data: ``xi -> -xi``, blob strengths and ``gamma`` negated."""
    field_rev = state.field.with_strengths(-state.field.strengths)
    return (LimitState(state.h, -state.xi, field_rev, 0.0),
            replace(params, gamma=-params.gamma))


def _trapezoid(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


# ---------------------------------------------------------------------------
# Poisson structure


def transport_velocity(state: LimitState, params: LimitParams) -> np.ndarray:
    return limit_rhs(state, params).blob_velocity


def poisson_bracket(state: LimitState, params: LimitParams, F_h, F_xi, grad_F_w) -> float:
    """``{F, H}`` for a functional with derivatives ``F_h``, ``F_xi`` (2-vectors)
    and ``grad F_w`` sampled at the blobs (``(N, 2)``)."""
    h_xi = state.xi / params.m
    u_h = u_tilde(state.field, state.h) if len(state.field) else np.zeros(2)
    h_h = params.gamma * np.array([-u_h[1], u_h[0]])          # gamma u(h)^perp
    grad_perp_H_w = -transport_velocity(state, params)
    F_h, F_xi = np.asarray(F_h, float), np.asarray(F_xi, float)
    out = params.gamma * np.dot(F_xi, np.array([-h_xi[1], h_xi[0]]))
    out -= np.dot(F_xi, h_h) - np.dot(F_h, h_xi)
    if len(state.field):
        out -= float(np.sum(state.field.strengths * np.sum(np.asarray(grad_F_w) * grad_perp_H_w, axis=1)))
    return float(out)


def _functional(name: str, state: LimitState, params: LimitParams):
    """Value and derivatives ``(value, F_h, F_xi, grad F_w at blobs)``."""
    n = len(state.field)
    zero = np.zeros(2)
    none = np.zeros((n, 2))
    if name == "h1":
        return state.h[0], np.array([1.0, 0.0]), zero, none
    if name == "h2":
        return state.h[1], np.array([0.0, 1.0]), zero, none
    if name == "xi_sq":
        return float(state.xi @ state.xi), zero, 2 * state.xi, none
    if name == "moment_x1":
        val = float(np.sum(state.field.strengths * state.field.z.real))
        return val, zero, zero, np.tile([1.0, 0.0], (n, 1))
    if name == "hamiltonian":
        val = hamiltonian(state, params).value
        u_h = u_tilde(state.field, state.h) if n else zero
        return (val, params.gamma * np.array([-u_h[1], u_h[0]]), state.xi / params.m,
                # grad^perp H_w is minus the transport velocity
                _rotate_back(-transport_velocity(state, params)))
    raise ValueError(f"unknown functional {name!r}")


def _rotate_back(v_perp):
    # given a^perp return a
    return np.stack([v_perp[:, 1], -v_perp[:, 0]], axis=1) if len(v_perp) else v_perp


FUNCTIONALS = ("h1", "h2", "xi_sq", "moment_x1", "hamiltonian")


def poisson_bracket_check(state: LimitState, params: LimitParams, F: str,
                          step_size: float = 1e-4) -> tuple[float, float]:
    """``(d/dt F, {F, H})``: centred difference along the flow versus the bracket."""
    fwd = step(state, params, step_size)
    back = step(state, params, -step_size)
    lhs = (_functional(F, fwd, params)[0] - _functional(F, back, params)[0]) / (2 * step_size)
    _, fh, fx, fw = _functional(F, state, params)
    rhs = poisson_bracket(state, params, fh, fx, fw)
    if not (np.isfinite(lhs) and np.isfinite(rhs)):
        raise NonFiniteError("non-finite bracket evaluation")
    return float(lhs), float(rhs)


def weak_form_residual(trajectory: Trajectory, params: LimitParams,
                       test_fn: Callable | None = None) -> float:
    """Discrete weak form of the transport equation for a smooth test function.

    ``sum_j g_j psi(T, x_j(T)) - sum_j g_j psi(0, x_j(0))
    - int_0^T sum_j g_j (psi_t + grad psi . u_j) dt`` with trapezoid in time.
    The default ``psi`` is a Gaussian bump modulated in time.
    """
    if test_fn is None:
        def test_fn(t, x):
            r2 = np.sum(x * x, axis=-1)
            amp = np.exp(-r2 / 4.0)
            c = 1.0 + 0.5 * np.sin(t)
            return (c * amp, 0.5 * np.cos(t) * amp, (-0.5 * c * amp)[..., None] * x)

    gam = trajectory.strengths
    integrand = []
    for k, t in enumerate(trajectory.t):
        x = trajectory.blob_positions[k]
        state = LimitState(trajectory.h[k], trajectory.xi[k],
                           VorticityField(x, gam, params.core), t)
        u = transport_velocity(state, params)
        _, psi_t, grad = test_fn(t, x)
        integrand.append(np.sum(gam * (psi_t + np.sum(grad * u, axis=1))))
    psi_end = test_fn(trajectory.t[-1], trajectory.blob_positions[-1])[0]
    psi_0 = test_fn(trajectory.t[0], trajectory.blob_positions[0])[0]
    integral = _trapezoid(np.asarray(integrand), trajectory.t)
    return float(np.sum(gam * psi_end) - np.sum(gam * psi_0) - integral)
