"""Physical parameters and Jaynes-Cummings Hamiltonians of the rotating ring."""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import UnsupportedConfigurationError
from .field import RingGeometry
from .hilbert import HilbertConfig, Operators

# Reference operating point, in units of the rest frequency.
OPERATING_POINT = dict(omega0=1.0, omega_atom=1.0, g=1e-4, gamma=0.5e-4, drive_amp=0.05e-4)


@dataclass(frozen=True)
class PhysicalParams:
    """Model constants with hbar = 1.

    The drive enters through its detuning from the atom, drive_detuning =
    omega_atom - omega_drive. Everything in the drive frame depends only on
    detunings of order g, so they are stored directly instead of being
    recovered from two numbers of order one.
    """

    omega0: float = 1.0
    omega_atom: float = 1.0
    delta: float = 0.0
    g: float = 1e-4
    xi: float = 0.0
    gamma: float = 0.5e-4
    drive_amp: float = 0.05e-4
    drive_detuning: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.g < 0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        if self.drive_amp < 0:
            raise ValueError(f"drive_amp must be non-negative, got {self.drive_amp}")

    @classmethod
    def operating_point(cls, delta=0.0, drive_detuning=0.0, **overrides):
        return cls(**{**OPERATING_POINT, "delta": delta, "drive_detuning": drive_detuning, **overrides})

    @classmethod
    def from_geometry(cls, geometry: RingGeometry, **kwargs):
        """Take omega0 = c|k| and Delta = -v_R|k| from a ring geometry."""
        kwargs.setdefault("omega0", geometry.rest_frequency)
        return cls(delta=geometry.rotation_detuning, **kwargs)

    def replace(self, **changes):
        return replace(self, **changes)

    def with_detuning(self, drive_detuning):
        return replace(self, drive_detuning=drive_detuning)

    def as_dict(self):
        return asdict(self)

    @property
    def omega_plus(self):
        return self.omega0 + self.delta

    @property
    def omega_minus(self):
        return self.omega0 - self.delta

    @property
    def drive_freq(self):
        return self.omega_atom - self.drive_detuning

    @property
    def mode_detunings(self):
        """(omega_plus - omega_d, omega_minus - omega_d)."""
        offset = (self.omega0 - self.omega_atom) + self.drive_detuning
        return offset + self.delta, offset - self.delta

    @property
    def is_resonant(self):
        return self.omega_atom == self.omega0


def _ops(h, ops, sigma_y_convention="pauli"):
    if ops is not None:
        return ops
    return Operators(h, sigma_y_convention)


def _coupling(p, o):
    photons = o.a_plus + o.a_minus
    return p.g * (o.sigma_plus @ photons + o.sigma_minus @ photons.conj().T)


def jc_hamiltonian(p: PhysicalParams, h: HilbertConfig, ops: Operators | None = None, sigma_y_convention="pauli"):
    o = _ops(h, ops, sigma_y_convention)
    H = (
        0.5 * p.omega_atom * o.sigma_z
        + p.omega_plus * o.n_plus
        + p.omega_minus * o.n_minus
        + _coupling(p, o)
    )
    if p.xi:
        H = H + p.xi * o.sigma_y
    return H


def drive_hamiltonian(p: PhysicalParams, t, h: HilbertConfig, ops: Operators | None = None):
    """Lab-frame drive of the k+ mode at time t."""
    o = _ops(h, ops)
    phase = np.exp(1j * p.drive_freq * t)
    return p.drive_amp * (phase * o.a_plus + np.conj(phase) * o.a_plus.conj().T)


def frame_generator(h: HilbertConfig, ops: Operators | None = None):
    """sigma_z/2 + n+ + n-; the drive-frame Hamiltonian moves along it as the detuning changes."""
    o = _ops(h, ops)
    return 0.5 * o.sigma_z + o.n_plus + o.n_minus


def rotating_frame_hamiltonian(p: PhysicalParams, h: HilbertConfig, ops: Operators | None = None, drive=True):
    """Time-independent Hamiltonian in the frame co-rotating with the drive."""
    if p.xi != 0:
        raise UnsupportedConfigurationError(
            "the sigma_y term is not invariant under the drive-frame rotation; set xi = 0"
        )
    o = _ops(h, ops)
    w_plus, w_minus = p.mode_detunings
    H = (
        0.5 * p.drive_detuning * o.sigma_z
        + w_plus * o.n_plus
        + w_minus * o.n_minus
        + _coupling(p, o)
    )
    if drive and p.drive_amp:
        H = H + p.drive_amp * (o.a_plus + o.a_plus.conj().T)
    return H
