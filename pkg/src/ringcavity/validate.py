"""Self-checks run by ``ringcavity validate``.

Each suite returns a SuiteResult; the CLI exits non-zero if any fails.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import field
from .hilbert import HilbertConfig, Operators, basis_state, projector
from .liouville import (
    DriveFrameModel,
    density_diagnostics,
    expectation,
    liouvillian,
    steady_state_residual,
    superoperator_norm,
    time_evolve,
)
from .model import PhysicalParams, jc_hamiltonian, rotating_frame_hamiltonian
from .moments import n_closed_full, solve_moments
from .spectrum import eigen_numeric, eigen_resonant

SUITES = (
    "metric_inverse",
    "overlap_quadrature",
    "hermiticity",
    "lindblad_trace",
    "oracle_equivalence",
    "truncation_convergence",
)
# Names accepted by the fault-injection hook (negative controls in the tests).
FAULTS = ("hermiticity",)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str
    seconds: float = 0.0


def _result(name, worst, tol, detail, start):
    return SuiteResult(name, bool(worst <= tol), float(worst), tol, detail, time.perf_counter() - start)


def metric_inverse(points=1000, seed=0, omega_rot=0.1, c=1.0, tol=1e-12):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    # keep Omega r / c < 1 so the frame stays inside the light cylinder
    r = rng.uniform(0, 0.99 * c / abs(omega_rot), points)
    phi = rng.uniform(0, 2 * np.pi, points)
    worst = 0.0
    for x, y in zip(r * np.cos(phi), r * np.sin(phi)):
        m = field.metric_at(x, y, omega_rot, c)
        worst = max(worst, np.max(np.abs(m.contravariant @ m.covariant - np.eye(4))))
    return _result("metric_inverse", worst, tol, f"{points} random points", start)


def overlap_quadrature(max_index=5, speeds=(0.0, 0.01, 0.1), length=2 * np.pi, tol=1e-6):
    start = time.perf_counter()
    zbar = 0.3
    worst = 0.0
    for n in range(1, max_index + 1):
        k = 2 * np.pi * n / length
        for v in speeds:
            for kk in (k, -k):
                got = field.mode_overlap(kk, kk, v, length, zbar)
                want = field.overlap_closed_form(kk, kk, v, length, zbar)
                worst = max(worst, abs(got - want) / abs(want))
    return _result("overlap_quadrature", worst, tol, f"|n| <= {max_index}, v_R/c in {speeds}", start)


def hermiticity(p: PhysicalParams, n_max=5, fault=None, tol=1e-12):
    start = time.perf_counter()
    h = HilbertConfig(n_max)
    ops = Operators(h)
    hams = [jc_hamiltonian(p, h, ops)]
    if p.xi == 0:
        hams.append(rotating_frame_hamiltonian(p, h, ops))
    if fault == "hermiticity":
        bad = hams[0].copy()
        bad[0, 1] += 1e-3 * max(p.g, 1.0)
        hams[0] = bad
    worst = max(float(np.max(np.abs(H - H.conj().T))) for H in hams)
    scale = max(float(np.max(np.abs(H))) for H in hams)
    return _result("hermiticity", worst / scale, tol, f"{len(hams)} Hamiltonians, n_max={n_max}", start)


def lindblad_trace(p: PhysicalParams, n_max=5, tol=1e-10):
    """Steady-state structure at the +sqrt(2) g probe, the undriven ground state, and free decay."""
    start = time.perf_counter()
    h = HilbertConfig(n_max)
    model = DriveFrameModel(p, h)
    L, _ = model.generators(np.sqrt(2) * p.g)
    rho = model.solve(np.sqrt(2) * p.g)
    diag = density_diagnostics(rho)
    checks = {
        "residual": steady_state_residual(L, rho) / superoperator_norm(L),
        "trace": diag["trace_error"],
        "hermiticity": diag["hermiticity"],
        # positivity is allowed 1e-8 of slack; rescale so one tolerance applies
        "positivity": max(0.0, -diag["min_eigenvalue"]) * tol / 1e-8,
    }

    undriven = DriveFrameModel(p.replace(drive_amp=0.0), h)
    rho0 = undriven.solve(0.0)
    ground = projector(basis_state(h, "g", 0, 0))
    checks["ground"] = float(np.max(np.abs(rho0 - ground)))

    # free decay of one photon in an empty cavity: <n>(t) = exp(-gamma t)
    empty = p.replace(g=0.0, drive_amp=0.0, drive_detuning=0.0, delta=0.0, omega_atom=p.omega0)
    ops = Operators(HilbertConfig(1))
    Ld = liouvillian(rotating_frame_hamiltonian(empty, HilbertConfig(1), ops), p.gamma, [ops.a_plus, ops.a_minus])
    start_state = projector(basis_state(HilbertConfig(1), "g", 1, 0))
    t = 1.0 / p.gamma
    rho_t = time_evolve(Ld, start_state, t, dt=0.02 / p.gamma)
    rate = -np.log(expectation(rho_t, ops.n_plus).real) / t
    checks["decay_rate"] = abs(rate - p.gamma) / p.gamma * tol / 1e-6

    worst_name = max(checks, key=checks.get)
    detail = ", ".join(f"{k}={v:.2e}" for k, v in checks.items())
    return _result("lindblad_trace", checks[worst_name], tol, detail, start)


def oracle_equivalence(p: PhysicalParams, tol=1e-8):
    start = time.perf_counter()
    g = p.g
    worst = 0.0
    for d in np.linspace(-1e-5, 1e-5, 5):
        for W in np.linspace(-2 * np.sqrt(2) * g, 2 * np.sqrt(2) * g, 5):
            q = p.replace(delta=d, drive_detuning=W, xi=0.0)
            sol = solve_moments(q)
            plus, minus = n_closed_full(q)
            worst = max(
                worst,
                abs(sol.n_plus - plus) / max(abs(plus), 1e-300),
                abs(sol.n_minus - minus) / max(abs(minus), 1e-300) if minus else abs(sol.n_minus),
            )
    eig_err = 0.0
    if p.is_resonant and p.g > 0:
        for d in (0.0, 1e-5, 1e-4, 5e-4):
            q = p.replace(delta=d, xi=0.0)
            eig_err = max(eig_err, np.max(np.abs(eigen_resonant(q).energies - eigen_numeric(q).energies)))
    detail = f"moments vs closed form on 5x5 grid: {worst:.2e}; eigenvalues: {eig_err:.2e}"
    return _result("oracle_equivalence", max(worst, eig_err / 1e-12 * tol), tol, detail, start)


def truncation_convergence(p: PhysicalParams, n_max=5, extra=3, tol=1e-6):
    start = time.perf_counter()
    probes = np.sqrt(2) * p.g * np.array([-1.0, 0.0, 1.0])
    low = DriveFrameModel(p, HilbertConfig(n_max))
    high = DriveFrameModel(p, HilbertConfig(n_max + extra))
    worst = 0.0
    for W in probes:
        a = np.array(low.photon_numbers(low.solve(W)))
        b = np.array(high.photon_numbers(high.solve(W)))
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))))
    return _result("truncation_convergence", worst, tol, f"n_max {n_max} -> {n_max + extra}", start)


def run_all(p: PhysicalParams, n_max=5, fault=None, only=None):
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    p_frame = p.replace(xi=0.0)
    runners = {
        "metric_inverse": lambda: metric_inverse(),
        "overlap_quadrature": lambda: overlap_quadrature(),
        "hermiticity": lambda: hermiticity(p, n_max, fault),
        "lindblad_trace": lambda: lindblad_trace(p_frame, n_max),
        "oracle_equivalence": lambda: oracle_equivalence(p_frame),
        "truncation_convergence": lambda: truncation_convergence(p_frame, n_max),
    }
    names = SUITES if only is None else [s for s in SUITES if s in only]
    return [runners[name]() for name in names]
