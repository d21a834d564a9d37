"""Kirchhoff potentials of the rigid motions and the added-mass matrices.

For a general map the complex potential of each Kirchhoff problem is written
as ``W_i(w) = sum_{k>=1} c_k w^{-k}`` in the mapped plane.  The Neumann data
``dPhi_i/dn = K_i`` is equivalent to prescribing the stream function
``Im W_i`` on the unit circle,

    psi_1 = x_2,   psi_2 = -x_1,   psi_3 = -|x|^2 / 2,

so the coefficients are the Fourier coefficients of the boundary data
(the least-squares fit on uniform nodes).  The normal ``n`` points out of the
fluid, into the body.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike

from ._vec import to_complex, to_vec
from .conformal import BodyGeometry
from .errors import ConvergenceError

NEUMANN_TOL = 1e-8
RESIDUAL_NODES = 256
START_ORDER = 32
MAX_ORDER = 4096


@dataclass(frozen=True)
class KirchhoffSeries:
    """Laurent coefficients ``coeffs[i, k-1]`` of ``W_{i+1}`` in the mapped plane."""

    coeffs: np.ndarray
    order: int
    residual: float

    def potential(self, w):
        """``W_i(w)`` for i = 1..3, shape (3, M)."""
        inv = 1.0 / np.asarray(w)
        acc = np.zeros((3,) + inv.shape, dtype=np.complex128)
        for k in range(self.order, 0, -1):
            acc = (acc + self.coeffs[:, k - 1, None]) * inv
        return acc

    def dpotential(self, w):
        """``dW_i/dw``, shape (3, M)."""
        inv = 1.0 / np.asarray(w)
        acc = np.zeros((3,) + inv.shape, dtype=np.complex128)
        for kk in range(self.order, 0, -1):
            acc = (acc - kk * self.coeffs[:, kk - 1, None]) * inv
        return acc * inv


def boundary_stream_data(geom: BodyGeometry, n: int) -> np.ndarray:
    """Stream-function boundary data at ``n`` uniform nodes of the unit circle."""
    w = np.exp(2j * np.pi * np.arange(n) / n)
    z = geom.inverse(w)
    return np.stack([z.imag, -z.real, -0.5 * np.abs(z) ** 2])


def _coefficients(geom: BodyGeometry, order: int) -> np.ndarray:
    n = 4 * order
    g = np.fft.fft(boundary_stream_data(geom, n), axis=1) / n
    # Im(c_k w^-k) matches the e^{-ik theta} mode of psi when c_k = 2i g_{-k}
    return 2j * g[:, n - np.arange(1, order + 1)]


def neumann_residual(geom: BodyGeometry, gradients, n: int = RESIDUAL_NODES) -> float:
    """Max over ``n`` boundary nodes of ``|grad Phi_i . n - K_i|``.

    ``gradients(z)`` returns complex gradients of shape (3, n).
    """
    w = np.exp(2j * np.pi * np.arange(n) / n)
    z = geom.inverse(w)
    tangent = geom.inverse_derivative(w) * 1j * w
    normal = 1j * tangent / np.abs(tangent)
    g = gradients(z)
    dn = (g * np.conj(normal)).real
    k = np.stack([normal.real, normal.imag, (1j * z * np.conj(normal)).real])
    return float(np.max(np.abs(dn - k)))


@lru_cache(maxsize=64)
def kirchhoff_series(geom: BodyGeometry) -> KirchhoffSeries:
    """Solve the three Kirchhoff problems by Laurent series, doubling the
    truncation order until the Neumann residual is below tolerance."""
    order = START_ORDER
    while order <= MAX_ORDER:
        series = KirchhoffSeries(_coefficients(geom, order), order, np.inf)
        res = neumann_residual(geom, lambda z: _series_gradients(geom, series, z))
        if res < NEUMANN_TOL:
            return KirchhoffSeries(series.coeffs, order, res)
        order *= 2
    raise ConvergenceError(f"Kirchhoff Laurent solve did not converge (residual {res:.2e})")


def _series_gradients(geom, series, z):
    w = geom.check_outside(z)
    dw = series.dpotential(w) * geom.derivative(z)[None, :]
    return np.conj(dw)


def _disk_values_gradients(geom: BodyGeometry, z):
    # Phi^1 = (-x_1, -x_2)/|x|^2 = Re(-1/z, -i/z), scaled by eps * Phi^1(x/eps)
    eps = geom.epsilon
    geom.check_outside(z)
    zeta = z / eps
    vals = np.stack([eps * (-1.0 / zeta).real, eps * (-1j / zeta).real, np.zeros(z.shape)])
    d = np.stack([1.0 / zeta**2, 1j / zeta**2, np.zeros(z.shape, dtype=np.complex128)])
    return vals, np.conj(d)


def kirchhoff_gradients_c(geom: BodyGeometry, z, method: str = "auto") -> np.ndarray:
    """Complex-encoded gradients of the three potentials at ``z``, shape (3, M)."""
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    if method == "auto":
        method = "closed" if geom.is_disk else "laurent"
    if method == "closed":
        if not geom.is_disk:
            raise ValueError("closed-form Kirchhoff potentials exist only for the disk")
        return _disk_values_gradients(geom, z)[1]
    return _series_gradients(geom, kirchhoff_series(geom), z)


def kirchhoff_all(geom: BodyGeometry, x: ArrayLike, method: str = "auto"):
    """Values (3, ...) and gradients (3, ..., 2) of all three potentials."""
    zc = np.asarray(to_complex(x))
    shape = zc.shape
    z = zc.reshape(-1)
    if method == "auto":
        method = "closed" if geom.is_disk else "laurent"
    if method == "closed":
        if not geom.is_disk:
            raise ValueError("closed-form Kirchhoff potentials exist only for the disk")
        vals, grads = _disk_values_gradients(geom, z)
    else:
        series = kirchhoff_series(geom)
        w = geom.check_outside(z)
        vals = series.potential(w).real
        grads = _series_gradients(geom, series, z)
    return vals.reshape((3,) + shape), to_vec(grads).reshape((3,) + shape + (2,))


def kirchhoff(geom: BodyGeometry, i: int, x: ArrayLike, method: str = "auto"):
    """Kirchhoff potential ``Phi_i`` (i = 1, 2, 3) and its gradient at ``x``."""
    if i not in (1, 2, 3):
        raise ValueError("Kirchhoff index must be 1, 2 or 3")
    vals, grads = kirchhoff_all(geom, x, method)
    return vals[i - 1], grads[i - 1]


# ---------------------------------------------------------------------------
# added mass


@dataclass(frozen=True)
class AddedMass:
    m1: np.ndarray
    m2: np.ndarray
    total: np.ndarray


def _added_mass_quadrature(geom: BodyGeometry, n_theta: int, n_r: int, radius: float) -> np.ndarray:
    # Dirichlet integrals are conformally invariant: integrate over 1 < |w| < R
    # with the substitution t = 1/|w| (Gauss-Legendre) and trapezoid in angle.
    nodes, weights = np.polynomial.legendre.leggauss(n_r)
    t0, t1 = 1.0 / radius, 1.0
    t = 0.5 * (t1 - t0) * nodes + 0.5 * (t1 + t0)
    wt = 0.5 * (t1 - t0) * weights
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    rho = 1.0 / t
    w = (rho[:, None] * np.exp(1j * theta[None, :])).reshape(-1)
    z = geom.inverse(w)
    jac = np.abs(geom.inverse_derivative(w)) ** 2
    g = kirchhoff_gradients_c(geom, z)
    # area element rho d rho d theta = t^-3 dt d theta
    area = (wt / t**3)[:, None] * np.full(n_theta, 2 * np.pi / n_theta)[None, :]
    weight = area.reshape(-1) * jac
    m = np.einsum("am,bm,m->ab", g.real, g.real, weight) + np.einsum("am,bm,m->ab", g.imag, g.imag, weight)
    series = kirchhoff_series(geom)
    k = np.arange(1, series.order + 1)
    c = series.coeffs
    tail = np.pi * np.einsum("k,ak,bk->ab", k * radius ** (-2.0 * k), c, np.conj(c)).real
    m = m + tail
    return 0.5 * (m + m.T)


def added_mass_series(geom: BodyGeometry) -> np.ndarray:
    """Added-mass matrix from the Laurent coefficients,
    ``pi * sum_k k Re(c_ak conj(c_bk))`` (exact for the truncated series)."""
    series = kirchhoff_series(geom)
    k = np.arange(1, series.order + 1)
    m = np.pi * np.einsum("k,ak,bk->ab", k.astype(float), series.coeffs, np.conj(series.coeffs)).real
    return 0.5 * (m + m.T)


def added_mass(geom: BodyGeometry, m: float, J0: float, *, n_theta: int = 128, n_r: int = 48,
               radius: float = 50.0, tol: float = 1e-6) -> AddedMass:
    """Inertia matrices ``M1 = diag(m, m, eps^2 J0)``, ``M2`` and their sum.

    ``M2`` is integrated over the fluid on a polar grid of the mapped plane
    truncated at ``radius`` plus the analytic far-field tail; the integral is
    repeated at doubled resolution and must agree to ``tol``.
    """
    if not (m > 0 and J0 > 0):
        raise ValueError("mass and moment of inertia must be positive")
    m2 = _added_mass_quadrature(geom, n_theta, n_r, radius)
    m2_fine = _added_mass_quadrature(geom, 2 * n_theta, 2 * n_r, radius)
    scale = max(1.0, float(np.max(np.abs(m2_fine))))
    if np.max(np.abs(m2 - m2_fine)) > tol * scale:
        raise ConvergenceError("added-mass quadrature did not converge")
    m1 = np.diag([m, m, geom.epsilon**2 * J0])
    return AddedMass(m1, m2_fine, m1 + m2_fine)
