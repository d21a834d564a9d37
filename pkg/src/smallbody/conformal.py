"""Exterior conformal maps and the epsilon-scaled body geometry.

A :class:`ConformalMap` sends the fluid domain (exterior of the reference
body) onto the exterior of the closed unit disk, normalised at infinity as
``T(z) = beta*z + beta_tilde + O(1/z)`` with ``beta > 0``.  All functions act
elementwise on complex scalars or arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, InsideBodyError

ComplexFn = Callable[[np.ndarray], np.ndarray]

#: points with ``|T(z)| < 1 - INSIDE_TOL`` are considered inside the body
INSIDE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConformalMap:
    """Biholomorphism from the exterior of the body onto ``|w| > 1``.

    ``second_derivative`` is optional; it is only needed for the regular part
    of the Green's function on the diagonal (self-induced image velocity).
    When omitted it is approximated by a central difference of ``derivative``.
    """

    forward: ComplexFn
    derivative: ComplexFn
    inverse: ComplexFn
    beta: float = 1.0
    beta_tilde: complex = 0j
    second_derivative: ComplexFn | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def inverse_derivative(self, w):
        """Derivative of the inverse map, ``1 / T'(T^{-1}(w))``."""
        return 1.0 / self.derivative(self.inverse(w))

    def second(self, z):
        if self.second_derivative is not None:
            return self.second_derivative(z)
        h = 1e-5 * np.maximum(1.0, np.abs(z))
        return (self.derivative(z + h) - self.derivative(z - h)) / (2 * h)

    def asymptotic_residuals(self, radii=(10.0, 100.0, 1000.0), n=64) -> np.ndarray:
        """``max |T(z) - beta z - beta_tilde| * |z|`` on circles of the given radii.

        For a map satisfying the normalisation these products stay bounded.
        The normalisation is checked, not enforced, for user-supplied maps.
        """
        theta = 2 * np.pi * np.arange(n) / n
        out = []
        for rad in radii:
            z = rad * np.exp(1j * theta)
            out.append(np.max(np.abs(self.forward(z) - self.beta * z - self.beta_tilde)) * rad)
        return np.asarray(out)


def unit_disk_map() -> ConformalMap:
    """Identity map: the body is the closed unit disk."""

    def ident(z):
        return np.asarray(z, dtype=np.complex128) + 0j

    def one(z):
        return np.ones_like(np.asarray(z, dtype=np.complex128))

    def zero(z):
        return np.zeros_like(np.asarray(z, dtype=np.complex128))

    return ConformalMap(ident, one, ident, 1.0, 0j, zero, name="disk")


def joukowski_family_map(a: float) -> ConformalMap:
    """Map whose inverse is ``w -> w + a/w``; the body is an ellipse.

    The ellipse has semi-axes ``1 + a`` (along x1) and ``1 - a``.
    """
    a = float(a)
    if not 0.0 <= a < 1.0:
        raise ValueError(f"joukowski parameter must satisfy 0 <= a < 1, got {a}")

    def forward(z):
        z = np.asarray(z, dtype=np.complex128)
        s = np.sqrt(z * z - 4 * a)
        w1 = 0.5 * (z + s)
        w2 = 0.5 * (z - s)
        big = np.where(np.abs(w1) >= np.abs(w2), w1, w2)
        # larger root computed without cancellation, return it directly
        return big

    def inverse(w):
        w = np.asarray(w, dtype=np.complex128)
        return w + a / w

    def derivative(z):
        w = forward(z)
        return 1.0 / (1.0 - a / (w * w))

    def second_derivative(z):
        w = forward(z)
        fp = 1.0 - a / (w * w)
        return -(2 * a / w**3) / fp**3

    return ConformalMap(
        forward, derivative, inverse, 1.0, 0j, second_derivative,
        name="joukowski", params={"a": a},
    )


def map_from_name(shape: str, **params) -> ConformalMap:
    """Build a shipped map from its configuration name."""
    if shape == "disk":
        return unit_disk_map()
    if shape == "joukowski":
        return joukowski_family_map(params.get("a", 0.5))
    raise ValueError(f"unknown shape {shape!r} (expected 'disk' or 'joukowski')")


@dataclass(frozen=True)
class BodyGeometry:
    """The reference body scaled by ``epsilon`` about the origin.

    Every evaluation delegates to the unscaled map:
    ``T_eps(z) = T(z / eps)``.
    """

    map: ConformalMap
    epsilon: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def is_disk(self) -> bool:
        return self.map.name == "disk"

    def forward(self, z):
        return self.map.forward(np.asarray(z, dtype=np.complex128) / self.epsilon)

    def derivative(self, z):
        return self.map.derivative(np.asarray(z, dtype=np.complex128) / self.epsilon) / self.epsilon

    def second_derivative(self, z):
        return self.map.second(np.asarray(z, dtype=np.complex128) / self.epsilon) / self.epsilon**2

    def inverse(self, w):
        return self.epsilon * self.map.inverse(w)

    def inverse_derivative(self, w):
        return self.epsilon * self.map.inverse_derivative(w)

    def check_outside(self, z, what: str = "point"):
        """Return ``T_eps(z)``, raising if any point is inside the body."""
        w = self.forward(z)
        if np.any(np.abs(w) < 1.0 - INSIDE_TOL):
            raise InsideBodyError(f"{what} lies inside the body")
        return w


def laurent_coefficients(func: ComplexFn, radius: float, count: int, *,
                         n_nodes: int = 256, check_radius: float | None = None,
                         tol: float = 1e-8) -> np.ndarray:
    """Coefficients ``c_1..c_count`` of ``f(w) = sum_k c_k / w**k``.

    Computed with the trapezoid rule on ``|w| = radius``,
    ``c_k = mean(f(w_j) w_j**k)``, which is spectrally accurate.  The same
    coefficients are recomputed on a second circle; disagreement beyond
    ``tol`` raises :class:`ConvergenceError`.
    """
    if count < 1:
        raise ValueError("count must be >= 1")

    def coeffs(rad):
        w = rad * np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes)
        fw = np.asarray(func(w), dtype=np.complex128)
        if not np.all(np.isfinite(fw)):
            raise ConvergenceError("non-finite samples in Laurent quadrature")
        k = np.arange(1, count + 1)
        return (fw[None, :] * w[None, :] ** k[:, None]).mean(axis=1)

    c = coeffs(radius)
    c2 = coeffs(check_radius if check_radius is not None else 1.5 * radius)
    scale = np.maximum(1.0, np.abs(c))
    if np.any(np.abs(c - c2) > tol * scale):
        raise ConvergenceError(
            f"Laurent coefficients disagree between radii: max diff {np.max(np.abs(c - c2)):.3e}")
    return c
