"""Contour integration on the body boundary, Blasius' formulas and the
residue coefficients of the harmonic field."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._vec import to_complex, to_vec
from .conformal import BodyGeometry, ConformalMap
from .errors import ConvergenceError, NonFiniteError, TangencyError
from .kernels import _harmonic_conj

DEFAULT_NODES = 512
TANGENCY_TOL = 1e-8


@dataclass(frozen=True)
class BoundaryCurve:
    """Body boundary ``s -> T_eps^{-1}(exp(2 pi i s))``, ``s`` in [0, 1).

    Positively oriented (fluid on the right when walking along it, body on
    the left).  ``node_count`` uniform trapezoid nodes.
    """

    geom: BodyGeometry
    node_count: int = DEFAULT_NODES

    def parameterization(self, s):
        return to_vec(self.geom.inverse(np.exp(2j * np.pi * np.asarray(s))))

    def nodes(self):
        """Complex nodes ``z_j`` and derivatives ``dz/ds`` at ``s_j = j/N``."""
        w = np.exp(2j * np.pi * np.arange(self.node_count) / self.node_count)
        z = self.geom.inverse(w)
        dz = self.geom.inverse_derivative(w) * 2j * np.pi * w
        return z, dz

    def frame(self):
        """Nodes, unit tangent, unit normal (out of the fluid) and ``ds`` weights."""
        z, dz = self.nodes()
        speed = np.abs(dz)
        tau = dz / speed
        return z, tau, 1j * tau, speed / self.node_count

    def signed_area(self) -> float:
        z, dz = self.nodes()
        return float(0.5 * np.mean(np.conj(z) * dz).imag)

    def doubled(self) -> "BoundaryCurve":
        return BoundaryCurve(self.geom, 2 * self.node_count)


def contour_integral(curve: BoundaryCurve, f: Callable[[np.ndarray], np.ndarray]) -> complex:
    """Trapezoid rule for ``oint f(z) dz`` along ``curve``."""
    z, dz = curve.nodes()
    vals = np.asarray(f(z), dtype=np.complex128)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteError("non-finite integrand samples on the contour")
    return complex(np.mean(vals * dz))


def _tangent_samples(curve, f, name):
    z, tau, normal, ds = curve.frame()
    v = np.asarray(f(to_vec(z)), dtype=np.float64)
    vc = to_complex(v)
    normal_part = (vc * np.conj(normal)).real
    scale = max(1.0, float(np.max(np.abs(vc))))
    if np.max(np.abs(normal_part)) > TANGENCY_TOL * scale:
        raise TangencyError(f"{name} is not tangent to the boundary "
                            f"(max normal component {np.max(np.abs(normal_part)):.2e})")
    return vc


def blasius_force(curve: BoundaryCurve, f, g) -> tuple[np.ndarray, float]:
    """Force ``oint (f.g) n ds`` and torque ``oint (f.g)(x^perp.n) ds`` via
    the complex contour integrals, for tangent fields ``f`` and ``g``.

    ``f`` and ``g`` map an ``(N, 2)`` array of boundary points to ``(N, 2)``.
    """
    fc = _tangent_samples(curve, f, "f")
    gc = _tangent_samples(curve, g, "g")
    z, dz = curve.nodes()
    prod = np.conj(fc) * np.conj(gc) * dz
    force = 1j * np.conj(np.mean(prod))
    torque = float(np.mean(z * prod).real)
    return np.array([force.real, force.imag]), torque


def blasius_force_real(curve: BoundaryCurve, f, g) -> tuple[np.ndarray, float]:
    """Same quantities as :func:`blasius_force` by real quadrature in arc length."""
    z, tau, normal, ds = curve.frame()
    x = to_vec(z)
    fg = np.sum(np.asarray(f(x)) * np.asarray(g(x)), axis=-1)
    force = np.array([np.sum(fg * normal.real * ds), np.sum(fg * normal.imag * ds)])
    lever = (1j * z * np.conj(normal)).real
    return force, float(np.sum(fg * lever * ds))


def _harmonic_integrals(map_: ConformalMap, n: int):
    curve = BoundaryCurve(BodyGeometry(map_, 1.0), n)
    z, dz = curve.nodes()
    hc = _harmonic_conj(curve.geom, z)
    xi = np.conj(np.mean(np.conj(z) * hc * dz))
    zeta = np.mean(hc * z * dz)
    vanishing = np.mean(np.conj(z) * hc * z * dz)
    return xi, zeta, vanishing


def xi_zeta(map_: ConformalMap, n_nodes: int = DEFAULT_NODES, tol: float = 1e-8):
    """The residue coefficients ``xi`` and ``zeta`` of the reference body.

    ``xi = conj(oint conj(z) (H1 - i H2) dz)``, ``zeta = oint (H1 - i H2) z dz``.
    Certified by node doubling.
    """
    xi, zeta, _ = _harmonic_integrals(map_, n_nodes)
    xi2, zeta2, _ = _harmonic_integrals(map_, 2 * n_nodes)
    if abs(xi - xi2) > tol or abs(zeta - zeta2) > tol:
        raise ConvergenceError("xi/zeta quadrature changed under node doubling")
    return to_vec(xi2), to_vec(zeta2)


def verify_vanishing_identity(map_: ConformalMap, n_nodes: int = DEFAULT_NODES) -> float:
    """``|Im oint conj(z) (H1 - i H2) z dz|``; zero for every smooth body."""
    return float(abs(_harmonic_integrals(map_, n_nodes)[2].imag))


@dataclass(frozen=True)
class FarFieldReport:
    radii: np.ndarray
    circulation_defect: np.ndarray   # max |x^perp . H - 1/2pi| * |x|
    commutator_defect: np.ndarray    # max |H^perp - (x^perp . grad) H| * |x|^2

    def decay_ratios(self):
        """Per-decade ratios of the raw defects (about 10 and 100 expected)."""
        raw1 = self.circulation_defect / self.radii
        raw2 = self.commutator_defect / self.radii**2
        with np.errstate(divide="ignore", invalid="ignore"):
            return raw1[:-1] / raw1[1:], raw2[:-1] / raw2[1:]


def laurent_far_field_checks(map_: ConformalMap, radii=(10.0, 100.0, 1000.0),
                             n_angles: int = 32) -> FarFieldReport:
    """Far-field behaviour of the harmonic field of the reference body."""
    geom = BodyGeometry(map_, 1.0)
    radii = np.asarray(radii, dtype=float)
    theta = 2 * np.pi * (np.arange(n_angles) + 0.25) / n_angles
    circ, comm = [], []
    for rad in radii:
        z = rad * np.exp(1j * theta)
        t = geom.forward(z)
        tp = geom.derivative(z)
        tpp = geom.second_derivative(z)
        hc = tp / (2j * np.pi * t)
        dhc = (tpp * t - tp**2) / (2j * np.pi * t**2)
        h = np.conj(hc)
        x_perp_dot_h = (1j * z * hc).real
        directional = np.conj(dhc * 1j * z)
        circ.append(np.max(np.abs(x_perp_dot_h - 1 / (2 * np.pi))) * rad)
        comm.append(np.max(np.abs(1j * h - directional)) * rad**2)
    return FarFieldReport(radii, np.asarray(circ), np.asarray(comm))


def random_tangent_field(geom: BodyGeometry, rng: np.random.Generator, n_modes: int = 4):
    """Random smooth field tangent to the body boundary.

    It is ``grad^perp psi`` with ``psi = (|T(z)|^2 - 1) g(z)``, where
    ``g = Re(c_0 + sum_k c_k T(z)^-k)`` has random complex coefficients.
    ``psi`` vanishes on the boundary, so the field is exactly tangent there.
    """
    coeffs = rng.normal(size=n_modes + 1) + 1j * rng.normal(size=n_modes + 1)
    k = np.arange(n_modes + 1)

    def field(x):
        z = np.asarray(to_complex(x)).reshape(-1)
        w = geom.forward(z)
        tp = geom.derivative(z)
        g = np.sum(coeffs[:, None] * w[None, :] ** (-k[:, None]), axis=0).real
        dg = np.sum((-k * coeffs)[1:, None] * w[None, :] ** (-k[1:, None] - 1), axis=0)
        grad_g = np.conj(dg * tp)
        grad_mod = 2 * w * np.conj(tp)
        grad_psi = (np.abs(w) ** 2 - 1) * grad_g + g * grad_mod
        return to_vec(1j * grad_psi).reshape(np.shape(x))

    return field
