"""Velocity-from-vorticity machinery for atomic (vortex blob) vorticity.

Vorticity is carried by a finite set of blobs.  A blob of zero core is a
point vortex; a positive core ``delta`` replaces ``|x - x_j|**2`` by
``max(|x - x_j|**2, delta**2)`` in the plane kernel (Krasny-style cutoff).

Internally points are complex numbers; the public functions accept and
return 2-vectors (shape ``(2,)`` or ``(M, 2)``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ._vec import to_complex, to_vec
from .conformal import BodyGeometry
from .errors import SingularityError

TWO_PI = 2.0 * np.pi
#: evaluation closer than this to a zero-core blob is an error
SINGULAR_DIST = 1e-14


@dataclass(frozen=True)
class VortexBlob:
    position: tuple[float, float]
    strength: float
    core: float = 0.0

    def __post_init__(self):
        if self.core < 0:
            raise ValueError("blob core must be nonnegative")


class VorticityField:
    """Immutable collection of vortex blobs.

    Stored as arrays: ``z`` (complex positions), ``strengths`` and ``cores``.
    """

    __slots__ = ("z", "strengths", "cores")

    def __init__(self, positions: ArrayLike = (), strengths: ArrayLike = (),
                 cores: ArrayLike | float = 0.0):
        pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        gam = np.asarray(strengths, dtype=np.float64).reshape(-1)
        if pos.shape[0] != gam.shape[0]:
            raise ValueError("positions and strengths must have the same length")
        core = np.broadcast_to(np.asarray(cores, dtype=np.float64), gam.shape).copy()
        if np.any(core < 0):
            raise ValueError("blob cores must be nonnegative")
        z = pos[:, 0] + 1j * pos[:, 1]
        for arr in (z, gam, core):
            arr.flags.writeable = False
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "strengths", gam)
        object.__setattr__(self, "cores", core)

    def __setattr__(self, name, value):
        raise AttributeError("VorticityField is immutable")

    @classmethod
    def from_blobs(cls, blobs: Iterable[VortexBlob]) -> "VorticityField":
        blobs = list(blobs)
        return cls([b.position for b in blobs], [b.strength for b in blobs],
                   [b.core for b in blobs])

    @classmethod
    def empty(cls) -> "VorticityField":
        return cls()

    def __len__(self) -> int:
        return self.strengths.shape[0]

    def __repr__(self) -> str:
        return f"VorticityField(n={len(self)}, total_strength={self.total_strength:g})"

    @property
    def positions(self) -> np.ndarray:
        return to_vec(self.z)

    @property
    def blobs(self) -> list[VortexBlob]:
        return [VortexBlob((float(p.real), float(p.imag)), float(g), float(c))
                for p, g, c in zip(self.z, self.strengths, self.cores)]

    @property
    def total_strength(self) -> float:
        return float(np.sum(self.strengths))

    @property
    def support_radius(self) -> float:
        """Largest blob distance from the origin (0 for an empty field)."""
        return float(np.max(np.abs(self.z))) if len(self) else 0.0

    def center_of_vorticity(self) -> np.ndarray:
        return to_vec(np.sum(self.strengths * self.z))

    def moved(self, z_new) -> "VorticityField":
        """Same blobs at new (complex) positions."""
        return VorticityField(to_vec(z_new), self.strengths, self.cores)

    def with_strengths(self, strengths) -> "VorticityField":
        return VorticityField(self.positions, strengths, self.cores)


def _eval_points(x: ArrayLike):
    """Return (complex flat array, restore function)."""
    z = np.asarray(to_complex(x))
    shape = z.shape

    def restore(vel_c):
        return to_vec(np.asarray(vel_c).reshape(shape))

    return z.reshape(-1), restore


# ---------------------------------------------------------------------------
# plane kernel


def plane_velocity(z_eval, z_src, gam, core, exclude_diagonal=False) -> np.ndarray:
    """Complex velocity at ``z_eval`` induced by plane point vortices.

    ``sum_j gam_j * i (z - z_j) / (2 pi max(|z - z_j|^2, core_j^2))``.
    With ``exclude_diagonal`` the evaluation points are the sources
    themselves and the self-term ``j = k`` is dropped.
    """
    z_eval = np.asarray(z_eval, dtype=np.complex128).reshape(-1)
    if len(z_src) == 0:
        return np.zeros(z_eval.shape, dtype=np.complex128)
    dz = z_eval[:, None] - np.asarray(z_src)[None, :]
    r2 = dz.real**2 + dz.imag**2
    core2 = np.asarray(core)[None, :] ** 2
    if exclude_diagonal:
        np.fill_diagonal(r2, np.inf)
    bad = (r2 < SINGULAR_DIST**2) & (core2 == 0.0)
    if np.any(bad):
        raise SingularityError("velocity evaluated at a point vortex with zero core")
    denom = TWO_PI * np.maximum(r2, core2)
    return np.sum(np.asarray(gam)[None, :] * 1j * dz / denom, axis=1)


def biot_savart_plane(field: VorticityField, x: ArrayLike) -> np.ndarray:
    """Full-plane Biot-Savart velocity of ``field`` at ``x``."""
    z, restore = _eval_points(x)
    return restore(plane_velocity(z, field.z, field.strengths, field.cores))


def H_plane(x: ArrayLike) -> np.ndarray:
    """The plane kernel ``x^perp / (2 pi |x|^2)``."""
    z, restore = _eval_points(x)
    if np.any(np.abs(z) < SINGULAR_DIST):
        raise SingularityError("plane kernel evaluated at the origin")
    return restore(1j / (TWO_PI * np.conj(z)))


# ---------------------------------------------------------------------------
# exterior domain: Green's functions and the harmonic field


def _reflect(w):
    return w / (w.real**2 + w.imag**2)


def green_dirichlet(geom: BodyGeometry, x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """Dirichlet Green's function of the fluid domain (vanishes on the body)."""
    zx, zy = np.asarray(to_complex(x)), np.asarray(to_complex(y))
    tx = geom.check_outside(zx)
    ty = geom.check_outside(zy)
    return np.log(np.abs(tx - ty) / (np.abs(tx - _reflect(ty)) * np.abs(ty))) / TWO_PI


def stream_harmonic(geom: BodyGeometry, x: ArrayLike) -> np.ndarray:
    """Stream function ``ln|T_eps(x)| / 2 pi`` of the harmonic field."""
    return np.log(np.abs(geom.check_outside(to_complex(x)))) / TWO_PI


def green_hydrodynamic(geom: BodyGeometry, x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """``G(x, y) + Psi_H(x) + Psi_H(y)`` from its closed form."""
    zx, zy = np.asarray(to_complex(x)), np.asarray(to_complex(y))
    tx = geom.check_outside(zx)
    ty = geom.check_outside(zy)
    return np.log(np.abs(tx - ty) * np.abs(tx) / np.abs(tx - _reflect(ty))) / TWO_PI


def hydrodynamic_regular_diagonal(geom: BodyGeometry, x: ArrayLike) -> np.ndarray:
    """``lim_{y->x} G_H(x, y) - ln|x - y| / 2 pi``.

    This is the renormalised self-energy density of a point vortex at ``x``.
    """
    z = np.asarray(to_complex(x))
    t = geom.check_outside(z)
    return np.log(np.abs(geom.derivative(z)) * np.abs(t) / np.abs(t - _reflect(t))) / TWO_PI


def _harmonic_conj(geom: BodyGeometry, z) -> np.ndarray:
    """``H_1 - i H_2 = T'(z) / (2 pi i T(z))`` (holomorphic)."""
    t = geom.check_outside(z)
    return geom.derivative(z) / (2j * np.pi * t)


def harmonic_field(geom: BodyGeometry, x: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """Harmonic field with unit circulation and its stream function.

    Returns ``(H_eps(x), Psi_H(x))``.
    """
    z, restore = _eval_points(x)
    hc = _harmonic_conj(geom, z)
    stream = (np.log(np.abs(geom.forward(z))) / TWO_PI).reshape(np.shape(to_complex(x)))
    return restore(np.conj(hc)), stream


# ---------------------------------------------------------------------------
# exterior Biot-Savart


def exterior_velocity(geom: BodyGeometry, z_eval, z_src, gam, core,
                      exclude_diagonal=False) -> np.ndarray:
    """Complex velocity ``sum_j gam_j grad^perp_x G(x, x_j)``.

    The direct singular part of each term is the (core-regularised) plane
    kernel; the remainder, which includes the image, is smooth and is
    evaluated analytically through ``T_eps`` and its derivatives.  With
    ``exclude_diagonal`` the evaluation points are the sources and each
    blob's direct term is dropped while its image is kept.
    """
    z_eval = np.asarray(z_eval, dtype=np.complex128).reshape(-1)
    z_src = np.asarray(z_src, dtype=np.complex128).reshape(-1)
    if z_src.size == 0:
        return np.zeros(z_eval.shape, dtype=np.complex128)
    gam = np.asarray(gam, dtype=np.float64)
    tx = geom.check_outside(z_eval)
    tp = geom.derivative(z_eval)
    ts = geom.check_outside(z_src, "vortex blob")
    direct = plane_velocity(z_eval, z_src, gam, core, exclude_diagonal)

    dz = z_eval[:, None] - z_src[None, :]
    dt = tx[:, None] - ts[None, :]
    near = np.abs(dz) < 1e-7 * np.maximum(geom.epsilon, np.abs(z_src))[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        remainder = tp[:, None] / dt - 1.0 / dz
    if np.any(near):
        # T'(x)/(T(x)-T(y)) - 1/(x-y) -> T''(y) / (2 T'(y)) as x -> y
        limit = geom.second_derivative(z_src) / (2.0 * geom.derivative(z_src))
        remainder = np.where(near, np.broadcast_to(limit[None, :], remainder.shape), remainder)
    image = tp[:, None] / (tx[:, None] - _reflect(ts)[None, :])
    smooth = np.sum(gam[None, :] * 1j * np.conj(remainder - image), axis=1) / TWO_PI
    return direct + smooth


def biot_savart_exterior(geom: BodyGeometry, field: VorticityField, x: ArrayLike) -> np.ndarray:
    """Exterior Biot-Savart velocity ``K_eps[omega](x)`` (tangent to the body)."""
    z, restore = _eval_points(x)
    return restore(exterior_velocity(geom, z, field.z, field.strengths, field.cores))


def biot_savart_hydrodynamic(geom: BodyGeometry, field: VorticityField, x: ArrayLike) -> np.ndarray:
    """``K_eps[omega] + alpha H_eps``: zero circulation around the body."""
    z, restore = _eval_points(x)
    vel = exterior_velocity(geom, z, field.z, field.strengths, field.cores)
    vel = vel + field.total_strength * np.conj(_harmonic_conj(geom, z))
    return restore(vel)


# ---------------------------------------------------------------------------
# full velocity decomposition


def _velocity_c(geom, field, ell, r, gamma, z, exclude_diagonal=False):
    from .potentials import kirchhoff_gradients_c

    vel = exterior_velocity(geom, z, field.z, field.strengths, field.cores, exclude_diagonal)
    vel = vel + (gamma + field.total_strength) * np.conj(_harmonic_conj(geom, z))
    ell = np.asarray(ell, dtype=np.float64)
    if ell[0] != 0.0 or ell[1] != 0.0 or r != 0.0:
        g = kirchhoff_gradients_c(geom, z)
        vel = vel + ell[0] * g[0] + ell[1] * g[1] + r * g[2]
    return vel


def velocity_total(geom: BodyGeometry, field: VorticityField, ell: Sequence[float], r: float,
                   gamma: float, x: ArrayLike) -> np.ndarray:
    """Body-frame fluid velocity with vorticity ``field``, solid velocity
    ``(ell, r)`` and circulation ``gamma`` around the body."""
    z, restore = _eval_points(x)
    return restore(_velocity_c(geom, field, ell, r, gamma, z))


def velocity_at_blobs(geom: BodyGeometry, field: VorticityField, ell: Sequence[float], r: float,
                      gamma: float) -> np.ndarray:
    """Velocity at each blob with that blob's own direct term removed.

    The blob's image (and its share of ``alpha H_eps``) is retained.
    """
    if len(field) == 0:
        return np.zeros((0, 2))
    return to_vec(_velocity_c(geom, field, ell, r, gamma, field.z, exclude_diagonal=True))
