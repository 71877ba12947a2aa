"""Field theory of a rotating quasi-1D ring.

Covers the co-rotating spacetime metric, the anisotropic dispersion of the
two counter-propagating modes, mode normalization and atom-field coupling
constants, and a quadrature check of the conserved mode inner product.

Units default to hbar = eps0 = c = 1. The symbol Omega is overloaded in the
literature; here ``omega_rot`` is the angular speed of the ring and
``omega_atom`` the atomic transition frequency. The coupling prefactor is read
as the atomic frequency (it comes from the momentum matrix element).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class RingGeometry:
    radius: float
    circumference: float
    cross_section: float
    mode_index: int
    omega_rot: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        if self.circumference <= 0 or self.cross_section <= 0:
            raise DomainError("circumference and cross-section must be positive")
        if abs(self.linear_speed) >= self.c:
            raise DomainError(f"|v_R| = {abs(self.linear_speed)} must be below c = {self.c}")

    @classmethod
    def circular(cls, radius, cross_section, mode_index, omega_rot=0.0, c=1.0):
        """Ring with circumference 2*pi*R (the O(v^2/c^2) length correction is ignored)."""
        return cls(radius, 2 * np.pi * radius, cross_section, mode_index, omega_rot, c)

    @property
    def volume(self):
        return self.circumference * self.cross_section

    @property
    def wavenumber(self):
        return 2 * np.pi * self.mode_index / self.circumference

    @property
    def linear_speed(self):
        return self.omega_rot * self.radius

    @property
    def rest_frequency(self):
        return self.c * abs(self.wavenumber)

    @property
    def rotation_detuning(self):
        """Delta = -v_R |k|, the shift of the k+ mode."""
        return -self.linear_speed * abs(self.wavenumber)


@dataclass(frozen=True)
class MetricTensor:
    contravariant: np.ndarray
    covariant: np.ndarray
    x: float
    y: float


@dataclass(frozen=True)
class DipoleConfig:
    dipole_moment: np.ndarray
    polarization: np.ndarray
    tangent: np.ndarray
    electron_mass: float = 1.0
    charge: float = 1.0
    position: float = 0.0
    atol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        for name in ("dipole_moment", "polarization", "tangent"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if abs(np.linalg.norm(self.polarization) - 1) > self.atol:
            raise DomainError("polarization must be a unit vector")
        if abs(np.linalg.norm(self.tangent) - 1) > self.atol:
            raise DomainError("tangent must be a unit vector")
        if abs(self.polarization @ self.tangent) > self.atol:
            raise DomainError("polarization must be transverse to the ring tangent")


def metric_at(x, y, omega_rot, c=1.0):
    """Metric of the frame co-rotating about z, in coordinates (ct, x, y, z)."""
    wx = omega_rot * x / c
    wy = omega_rot * y / c
    upper = np.array(
        [
            [-1.0, -wy, wx, 0.0],
            [-wy, 1.0 - wy * wy, wx * wy, 0.0],
            [wx, wx * wy, 1.0 - wx * wx, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    lower = np.array(
        [
            [-1.0 + wx * wx + wy * wy, -wy, wx, 0.0],
            [-wy, 1.0, 0.0, 0.0],
            [wx, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return MetricTensor(upper, lower, float(x), float(y))


def dispersion(k, v_R, c=1.0):
    """Frequencies (omega_plus, omega_minus) of the k+ = |k| and k- = -|k| modes.

    omega_pm = (c -+ v_R)|k| = omega0 +- Delta with omega0 = c|k|, Delta = -v_R|k|.
    """
    if abs(v_R) >= c:
        raise DomainError(f"|v_R| = {abs(v_R)} must be below c = {c}")
    ak = abs(k)
    return (c - v_R) * ak, (c + v_R) * ak


def branch_frequency(k, v_R, c=1.0):
    """Positive-frequency branch for a signed wavenumber: omega_k = c|k| - v_R k."""
    if abs(v_R) >= c:
        raise DomainError(f"|v_R| = {abs(v_R)} must be below c = {c}")
    return c * abs(k) - v_R * k


def dispersion_residual(omega, k, v_R, c=1.0):
    """Left-hand side of omega^2 + 2 v_R k omega - (c^2 - v_R^2) k^2 = 0."""
    return omega**2 + 2 * v_R * k * omega - (c**2 - v_R**2) * k**2


def normalization_constant(k, volume, hbar=1.0, eps0=1.0, c=1.0):
    if k == 0:
        raise DomainError("the k = 0 mode is excluded")
    if volume <= 0:
        raise DomainError("volume must be positive")
    return np.sqrt(hbar / (2 * eps0 * volume * c * abs(k)))


def coupling_strength(dipole: DipoleConfig, omega_atom, k, volume, hbar=1.0, eps0=1.0, c=1.0):
    """Complex atom-mode coupling g; its modulus is the gauge-fixed real coupling."""
    zbar = normalization_constant(k, volume, hbar, eps0, c)
    projection = dipole.dipole_moment @ dipole.polarization
    return 1j * omega_atom * projection * zbar * np.exp(1j * k * dipole.position)


def xi_correction(dipole: DipoleConfig, v_R, omega_rot):
    """Coefficient of the sigma_y term produced by v_R . P."""
    return -(dipole.electron_mass * v_R * omega_rot / dipole.charge) * (
        dipole.dipole_moment @ dipole.tangent
    )


def _mode(k, v_R, zbar, c, s, t):
    w = branch_frequency(k, v_R, c)
    return zbar * np.exp(1j * (k * s - w * t)), w


def mode_overlap(
    k,
    q,
    v_R,
    length,
    zbar_k,
    zbar_q=None,
    *,
    c=1.0,
    pol_k=(1.0, 0.0),
    pol_q=(1.0, 0.0),
    t=0.0,
    conjugate=True,
    n_points=4096,
):
    """Integrate the conserved density bilinear of two ring modes over one period.

    With ``conjugate`` the first mode enters complex-conjugated (the inner
    product); otherwise both enter as is (the term that must vanish).
    The density is (A.d0B - B.d0A) - (v_R/c)(A.dsB - B.dsA) with d0 = d/(c dt).
    Trapezoid rule on a periodic integrand, so convergence is spectral.
    """
    if zbar_q is None:
        zbar_q = zbar_k
    s = np.linspace(0.0, length, n_points, endpoint=False)
    ds = length / n_points
    pol = float(np.dot(pol_q, pol_k))
    if pol == 0.0:
        return 0j

    a_k, w_k = _mode(k, v_R, zbar_k, c, s, t)
    a_q, w_q = _mode(q, v_R, zbar_q, c, s, t)
    dt_k, ds_k = -1j * w_k / c * a_k, 1j * k * a_k
    dt_q, ds_q = -1j * w_q / c * a_q, 1j * q * a_q
    if conjugate:
        a_q, dt_q, ds_q = a_q.conj(), dt_q.conj(), ds_q.conj()

    beta = v_R / c
    density = (a_q * dt_k - a_k * dt_q) - beta * (a_q * ds_k - a_k * ds_q)
    return pol * density.sum() * ds


def overlap_closed_form(k, q, v_R, length, zbar_k, c=1.0, same_polarization=True):
    """Closed form of the conjugated overlap: -(2i|Z|^2 L / c)(omega_k + v_R k) delta_kq."""
    if k != q or not same_polarization:
        return 0j
    return -2j * abs(zbar_k) ** 2 * length / c * (branch_frequency(k, v_R, c) + v_R * k)
