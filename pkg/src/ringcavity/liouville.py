"""Lindblad master equation in superoperator form.

Vectorization is column-stacking: vec(A X B) = (B^T kron A) vec(X), and
index i + j*dim holds rho[i, j]. The generator reproduces

    drho/dt = i[rho, H] + sum_a gamma_a (a rho a^+ - {a^+ a, rho}/2).

Superoperators are scipy CSR matrices; a Lindblad generator on the 72-dim
composite space has about 5e4 nonzeros out of 2.7e7 entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateSteadyStateError, DomainError, StepSizeError
from .hilbert import HilbertConfig, Operators
from .model import PhysicalParams, frame_generator, rotating_frame_hamiltonian

# Dense SVD is used to count stationary states only below this superoperator size.
DENSE_NULLSPACE_LIMIT = 2500


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = math.isqrt(v.size)
    return v.reshape(dim, dim, order="F")


def commutator_superoperator(H):
    """Superoperator of rho -> i[rho, H]."""
    H = sp.csr_matrix(H)
    eye = sp.identity(H.shape[0], dtype=complex, format="csr")
    return 1j * (sp.kron(H.T, eye) - sp.kron(eye, H))


def dissipator(c, rate=1.0):
    c = sp.csr_matrix(c)
    eye = sp.identity(c.shape[0], dtype=complex, format="csr")
    cdc = (c.conj().T @ c).tocsr()
    return rate * (sp.kron(c.conj(), c) - 0.5 * sp.kron(eye, cdc) - 0.5 * sp.kron(cdc.T, eye))


def liouvillian(H, gamma, collapse=()):
    """Lindblad generator for Hamiltonian H and collapse operators with rate(s) gamma."""
    H = np.asarray(H) if not sp.issparse(H) else H
    dim = H.shape[0]
    if H.shape != (dim, dim):
        raise ValueError(f"Hamiltonian must be square, got {H.shape}")
    rates = np.broadcast_to(np.asarray(gamma, dtype=float), (len(collapse),))
    L = commutator_superoperator(H)
    for c, rate in zip(collapse, rates):
        if c.shape != (dim, dim):
            raise ValueError(f"collapse operator of shape {c.shape} does not match dim {dim}")
        if rate:
            L = L + dissipator(c, rate)
    return sp.csr_matrix(L)


def _constrained(L):
    """Replace the rho[0, 0] row of L by the trace functional."""
    N = L.shape[0]
    dim = math.isqrt(N)
    keep = np.ones(N)
    keep[0] = 0.0
    trace_row = sp.csr_matrix(
        (np.ones(dim), (np.zeros(dim, dtype=int), np.arange(dim) * (dim + 1))), shape=(N, N)
    )
    return (sp.diags(keep) @ sp.csr_matrix(L) + trace_row).tocsc()


def null_space_dimension(L, rtol=1e-10):
    """Number of stationary directions of L, by dense SVD (small systems only)."""
    dense = L.toarray() if sp.issparse(L) else np.asarray(L)
    s = np.linalg.svd(dense, compute_uv=False)
    if s[0] == 0:
        return dense.shape[0]
    return int(np.sum(s <= rtol * s[0]))


def _factor(A, L):
    try:
        return spla.splu(A, permc_spec="COLAMD")
    except RuntimeError:
        null_dim = null_space_dimension(L) if L.shape[0] <= DENSE_NULLSPACE_LIMIT else None
        raise DegenerateSteadyStateError(null_dim) from None


@dataclass
class SteadyStateInfo:
    method: str
    iterations: int
    residual: float


def steady_state(L, preconditioner=None, tol=1e-13, return_info=False):
    """Stationary density matrix of L with unit trace.

    Without ``preconditioner`` the trace-constrained system is factorized
    directly. With one (a nearby generator, e.g. the undriven one) GMRES is
    run on the constrained system preconditioned by the factorized nearby
    system; this is much cheaper because the undriven generator splits into
    small excitation sectors. Falls back to the direct solve if GMRES stalls.
    """
    L = sp.csr_matrix(L)
    N = L.shape[0]
    dim = math.isqrt(N)
    if dim * dim != N:
        raise ValueError(f"superoperator size {N} is not a square")
    A = _constrained(L)
    b = np.zeros(N, dtype=complex)
    b[0] = 1.0

    x, method, iterations = None, "direct", 0
    if preconditioner is not None:
        lu = _factor(_constrained(preconditioner), preconditioner)
        M = spla.LinearOperator((N, N), matvec=lu.solve, dtype=complex)
        count = [0]

        def _tick(_):
            count[0] += 1

        x, status = spla.gmres(
            A, b, M=M, rtol=tol, atol=0.0, restart=60, maxiter=10,
            callback=_tick, callback_type="pr_norm",
        )
        iterations = count[0]
        method = "gmres"
        if status != 0 or np.linalg.norm(A @ x - b) > 1e3 * tol:
            x = None
    if x is None:
        x = _factor(A, L).solve(b)
        method = "direct"

    rho = unvec(x, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    if return_info:
        info = SteadyStateInfo(method, iterations, float(np.linalg.norm(L @ vec(rho))))
        return rho, info
    return rho


def superoperator_norm(L):
    """Frobenius norm, used as the scale for residual checks."""
    return float(spla.norm(L)) if sp.issparse(L) else float(np.linalg.norm(L))


def steady_state_residual(L, rho):
    return float(np.linalg.norm(L @ vec(rho)))


def expectation(rho, O):
    rho, O = np.asarray(rho), np.asarray(O)
    if rho.shape != O.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs operator {O.shape}")
    return complex(np.einsum("ij,ji->", rho, O))


def output_current(n_bar, gamma):
    """Mean output photon flux gamma * n_bar through a port with a_out = a_in + sqrt(gamma) a."""
    n_bar = np.asarray(n_bar, dtype=float)
    if np.any(n_bar < 0):
        raise DomainError("photon number must be non-negative")
    out = gamma * n_bar
    return float(out) if out.ndim == 0 else out


def density_diagnostics(rho):
    """Deviation from Hermiticity, trace error and smallest eigenvalue."""
    rho = np.asarray(rho)
    return {
        "hermiticity": float(np.max(np.abs(rho - rho.conj().T))),
        "trace_error": float(abs(np.trace(rho) - 1)),
        "min_eigenvalue": float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]),
    }


def time_evolve(L, rho0, t_final, dt, trace_tol=1e-6):
    """Classical RK4 integration of vec(rho)' = L vec(rho) up to t_final."""
    L = sp.csr_matrix(L)
    rho0 = np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]
    if t_final <= 0:
        return rho0.copy()
    steps = max(1, math.ceil(t_final / dt - 1e-12))
    h = t_final / steps
    x = vec(rho0).copy()
    tr0 = np.trace(rho0)
    diag = np.arange(dim) * (dim + 1)
    for _ in range(steps):
        k1 = L @ x
        k2 = L @ (x + 0.5 * h * k1)
        k3 = L @ (x + 0.5 * h * k2)
        k4 = L @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        drift = abs(x[diag].sum() - tr0)
        if not drift <= trace_tol:
            raise StepSizeError(f"trace drifted by {drift:.3e} (dt = {h:.3e}); reduce dt")
    return unvec(x, dim)


class DriveFrameModel:
    """Drive-frame generators for one parameter set, reusable across drive detunings.

    The drive-frame Hamiltonian is affine in the drive detuning with slope
    sigma_z/2 + n+ + n-, so the generator at any detuning is assembled from
    three precomputed superoperators.
    """

    def __init__(self, p: PhysicalParams, h: HilbertConfig):
        self.params = p.with_detuning(0.0)
        self.hilbert = h
        self.ops = Operators(h)
        collapse = [self.ops.a_plus, self.ops.a_minus]
        gamma = self.params.gamma
        H0 = rotating_frame_hamiltonian(self.params, h, self.ops, drive=False)
        self.undriven = liouvillian(H0, gamma, collapse)
        self.drive = commutator_superoperator(
            self.params.drive_amp * (self.ops.a_plus + self.ops.a_plus.conj().T)
        )
        self.slope = commutator_superoperator(frame_generator(h, self.ops))

    def generators(self, drive_detuning):
        """(driven, undriven) generators at the given detuning."""
        undriven = (self.undriven + drive_detuning * self.slope).tocsr()
        return (undriven + self.drive).tocsr(), undriven

    def solve(self, drive_detuning, return_info=False):
        L, P = self.generators(drive_detuning)
        return steady_state(L, preconditioner=P, return_info=return_info)

    def photon_numbers(self, rho):
        return (
            expectation(rho, self.ops.n_plus).real,
            expectation(rho, self.ops.n_minus).real,
        )


def steady_photon_numbers(p: PhysicalParams, h: HilbertConfig | None = None):
    """<a+^ a+>, <a-^ a-> in the drive-frame steady state."""
    model = DriveFrameModel(p, h or HilbertConfig())
    return model.photon_numbers(model.solve(p.drive_detuning))
