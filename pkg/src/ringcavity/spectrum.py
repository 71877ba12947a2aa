"""Ground state and single-excitation eigensystem of the ring JC model."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedConfigurationError
from .model import PhysicalParams

# Basis order of the one-excitation block: |e,0,0>, |g,1,0>, |g,0,1>.
SINGLE_EXCITATION_BASIS = (("e", 0, 0), ("g", 1, 0), ("g", 0, 1))


@dataclass(frozen=True)
class EigenTriple:
    """One-excitation levels sorted ascending as (E-, E0, E+).

    ``states[:, j]`` is the eigenvector for ``energies[j]``.
    """

    energies: np.ndarray
    states: np.ndarray
    delta_g: float
    method: str

    @property
    def e_minus(self):
        return self.energies[0]

    @property
    def e_zero(self):
        return self.energies[1]

    @property
    def e_plus(self):
        return self.energies[2]


def _require_no_xi(p):
    if p.xi != 0:
        raise UnsupportedConfigurationError("the one-excitation block is closed only for xi = 0")


def single_excitation_matrix(p: PhysicalParams):
    _require_no_xi(p)
    half = 0.5 * p.omega_atom
    return np.array(
        [
            [half, p.g, p.g],
            [p.g, p.omega_plus - half, 0.0],
            [p.g, 0.0, p.omega_minus - half],
        ]
    )


def _fix_phase(vecs):
    # First (near-)largest component positive, so closed-form and numeric vectors
    # compare directly; near-ties such as the two photon entries of the dark state
    # are resolved by basis order.
    out = np.array(vecs, dtype=float)
    for j in range(out.shape[1]):
        mag = np.abs(out[:, j])
        i = int(np.flatnonzero(mag >= mag.max() * (1 - 1e-6))[0])
        if out[i, j] < 0:
            out[:, j] *= -1
    return out


def eigen_resonant(p: PhysicalParams):
    _require_no_xi(p)
    if not p.is_resonant:
        raise UnsupportedConfigurationError(
            "closed-form levels need omega_atom == omega0; use eigen_numeric"
        )
    g, d = p.g, p.delta
    dg = np.sqrt(d * d + 2 * g * g)
    half = 0.5 * p.omega_atom

    def bright(sign):
        s = d + sign * dg
        return np.array([g * s, 0.5 * s * s, g * g])

    dark = np.array([d, -g, g])
    raw = np.column_stack([bright(-1), dark, bright(+1)])
    norms = np.linalg.norm(raw, axis=0)
    if np.any(norms == 0):
        raise DomainError("closed-form eigenvectors are undefined at g = 0; use eigen_numeric")
    return EigenTriple(
        energies=np.array([half - dg, half, half + dg]),
        states=_fix_phase(raw / norms),
        delta_g=dg,
        method="closed-form",
    )


def eigen_numeric(p: PhysicalParams):
    vals, vecs = np.linalg.eigh(single_excitation_matrix(p))
    return EigenTriple(
        energies=vals,
        states=_fix_phase(vecs),
        delta_g=np.sqrt(p.delta**2 + 2 * p.g**2),
        method="numeric",
    )


def ground_energy(p: PhysicalParams):
    _require_no_xi(p)
    return -0.5 * p.omega_atom
