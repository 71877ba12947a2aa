"""Truncated Fock-space operators on atom (x) mode+ (x) mode-.

Slot order is fixed: atom, then the k+ mode, then the k- mode. The atom basis
is (|g>, |e>), so the composite index of |g, 0, 0> is 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SLOTS = ("atom", "plus", "minus")
ATOM_LEVELS = {"g": 0, "e": 1}


@dataclass(frozen=True)
class HilbertConfig:
    n_max: int = 5

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError(f"n_max must be an integer >= 1, got {self.n_max}")

    @property
    def mode_dim(self):
        return self.n_max + 1

    @property
    def total_dim(self):
        return 2 * self.mode_dim**2

    def slot_dim(self, slot):
        if slot == "atom":
            return 2
        if slot in ("plus", "minus"):
            return self.mode_dim
        raise ValueError(f"unknown slot {slot!r}; expected one of {SLOTS}")

    def index(self, atom, n_plus, n_minus):
        """Composite index of |atom, n_plus, n_minus>; atom is 'g'/'e' or 0/1."""
        a = ATOM_LEVELS.get(atom, atom)
        if a not in (0, 1) or not (0 <= n_plus <= self.n_max and 0 <= n_minus <= self.n_max):
            raise DomainError(f"state ({atom}, {n_plus}, {n_minus}) outside the truncated space")
        return (a * self.mode_dim + n_plus) * self.mode_dim + n_minus


def annihilation(n_max):
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be an integer >= 1, got {n_max}")
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def sigma_minus():
    """|g><e| in the (g, e) basis."""
    return np.array([[0, 1], [0, 0]], dtype=complex)


def sigma_plus():
    return sigma_minus().T.copy()


def sigma_z():
    return np.diag([-1.0, 1.0]).astype(complex)


def sigma_x():
    return sigma_plus() + sigma_minus()


def sigma_y(convention="pauli"):
    """sigma_y with ``convention='pauli'`` (standard, [sz, sx] = 2i sy) or 'literal'.

    The 'literal' form is i[sz, sx] as written, which equals -2 times the
    Pauli matrix. It only multiplies the xi term, which vanishes for a
    transverse dipole.
    """
    pauli = -1j * (sigma_plus() - sigma_minus())
    if convention == "pauli":
        return pauli
    if convention == "literal":
        sz, sx = sigma_z(), sigma_x()
        return 1j * (sz @ sx - sx @ sz)
    raise ValueError(f"unknown sigma_y convention {convention!r}")


def embed(op, slot, config: HilbertConfig):
    op = np.asarray(op)
    d = config.slot_dim(slot)
    if op.shape != (d, d):
        raise ValueError(f"operator of shape {op.shape} does not fit slot {slot!r} (dim {d})")
    eye2, eyem = np.eye(2), np.eye(config.mode_dim)
    factors = {"atom": [op, eyem, eyem], "plus": [eye2, op, eyem], "minus": [eye2, eyem, op]}[slot]
    return np.kron(np.kron(factors[0], factors[1]), factors[2]).astype(complex)


def basis_state(config: HilbertConfig, atom, n_plus=0, n_minus=0):
    psi = np.zeros(config.total_dim, dtype=complex)
    psi[config.index(atom, n_plus, n_minus)] = 1.0
    return psi


def projector(psi):
    psi = np.asarray(psi)
    return np.outer(psi, psi.conj())


class Operators:
    """Embedded operator set for one truncation, built once and reused."""

    def __init__(self, config: HilbertConfig, sigma_y_convention="pauli"):
        self.config = config
        a = annihilation(config.n_max)
        self.identity = np.eye(config.total_dim, dtype=complex)
        self.a_plus = embed(a, "plus", config)
        self.a_minus = embed(a, "minus", config)
        self.sigma_minus = embed(sigma_minus(), "atom", config)
        self.sigma_plus = embed(sigma_plus(), "atom", config)
        self.sigma_z = embed(sigma_z(), "atom", config)
        self.sigma_x = embed(sigma_x(), "atom", config)
        self.sigma_y = embed(sigma_y(sigma_y_convention), "atom", config)
        self.n_plus = self.a_plus.conj().T @ self.a_plus
        self.n_minus = self.a_minus.conj().T @ self.a_minus


def excitation_number(config: HilbertConfig, convention="literal"):
    """Excitation-number operator.

    'literal' is sigma_z + n+ + n-. It does not commute with the
    JC coupling (sigma_z jumps by 2 when one photon is exchanged); the
    conserved charge is 'projector', sigma+ sigma- + n+ + n-.
    """
    ops = Operators(config)
    photons = ops.n_plus + ops.n_minus
    if convention == "literal":
        return ops.sigma_z + photons
    if convention == "projector":
        return ops.sigma_plus @ ops.sigma_minus + photons
    raise ValueError(f"unknown excitation-number convention {convention!r}")
