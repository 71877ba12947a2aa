import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from conftest import random_density, random_hermitian
from ringcavity.errors import DegenerateSteadyStateError, DomainError, StepSizeError
from ringcavity.hilbert import HilbertConfig, Operators, basis_state, projector
from ringcavity.liouville import (
    DriveFrameModel,
    commutator_superoperator,
    density_diagnostics,
    dissipator,
    expectation,
    liouvillian,
    null_space_dimension,
    output_current,
    steady_photon_numbers,
    steady_state,
    steady_state_residual,
    superoperator_norm,
    time_evolve,
    unvec,
    vec,
)
from ringcavity.model import PhysicalParams, rotating_frame_hamiltonian

H2 = HilbertConfig(2)
OPS2 = Operators(H2)


def frame_liouvillian(p, h=H2, ops=None):
    ops = ops or Operators(h)
    return liouvillian(rotating_frame_hamiltonian(p, h, ops), p.gamma, [ops.a_plus, ops.a_minus])


def apply(L, rho):
    return unvec(L @ vec(rho))


def test_vectorization_is_column_stacking(rng):
    A, X, B = (rng.normal(size=(3, 3)) for _ in range(3))
    assert np.allclose(vec(A @ X @ B), np.kron(B.T, A) @ vec(X))
    assert np.array_equal(unvec(vec(X)), X)
    assert vec(X)[1] == X[1, 0]


def test_generator_reproduces_master_equation(rng):
    H = random_hermitian(rng, 4)
    c = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = random_density(rng, 4)
    L = liouvillian(H, 0.3, [c])
    want = 1j * (rho @ H - H @ rho) + 0.3 * (c @ rho @ c.conj().T - 0.5 * (c.conj().T @ c @ rho + rho @ c.conj().T @ c))
    assert np.allclose(apply(L, rho), want, atol=1e-12)


def test_zero_generator():
    L = liouvillian(np.zeros((3, 3)), 0.0, [np.eye(3)])
    assert L.nnz == 0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        liouvillian(np.eye(3), 1.0, [np.eye(2)])
    with pytest.raises(ValueError):
        liouvillian(np.ones((2, 3)), 1.0, [])


@given(st.integers(0, 2**31), st.floats(-3e-4, 3e-4), st.floats(0, 1e-4))
def test_lindblad_output_hermitian_and_traceless(seed, W, E):
    rng = np.random.default_rng(seed)
    p = PhysicalParams.operating_point(drive_detuning=W, drive_amp=E, delta=1e-5)
    L = frame_liouvillian(p, ops=OPS2)
    rho = random_density(rng, H2.total_dim)
    out = apply(L, rho)
    scale = superoperator_norm(L)
    assert abs(np.trace(out)) <= 1e-12 * scale
    assert np.max(np.abs(out - out.conj().T)) <= 1e-12 * scale
    # traceless Hermitian inputs stay traceless
    x = random_hermitian(rng, H2.total_dim)
    x -= np.trace(x) / H2.total_dim * np.eye(H2.total_dim)
    assert abs(np.trace(apply(L, x))) <= 1e-12 * scale * np.linalg.norm(x)


def test_free_cavity_decay_rate():
    p = PhysicalParams.operating_point(g=0.0, drive_amp=0.0)
    L = frame_liouvillian(p)
    one = projector(basis_state(H2, "g", 1, 0))
    rate = expectation(apply(L, one), OPS2.n_plus).real
    assert rate == pytest.approx(-p.gamma, rel=1e-12)
    for atom in ("g", "e"):
        vac = projector(basis_state(H2, atom, 0, 0))
        assert np.max(np.abs(apply(L, vac))) == 0


def test_undriven_steady_state_is_ground(ref_params):
    rho = steady_state(frame_liouvillian(ref_params.replace(drive_amp=0.0)))
    assert np.max(np.abs(rho - projector(basis_state(H2, "g", 0, 0)))) < 1e-10


@pytest.mark.parametrize("W", [-np.sqrt(2) * 1e-4, 0.0, 0.7e-4, np.sqrt(2) * 1e-4])
@pytest.mark.parametrize("delta", [0.0, 1e-5])
def test_steady_state_structure_fig2(W, delta):
    h = HilbertConfig(5)
    model = DriveFrameModel(PhysicalParams.operating_point(delta=delta), h)
    L, P = model.generators(W)
    rho, info = model.solve(W, return_info=True)
    assert steady_state_residual(L, rho) <= 1e-10 * superoperator_norm(L)
    d = density_diagnostics(rho)
    assert d["trace_error"] <= 1e-10
    assert d["hermiticity"] <= 1e-10
    assert d["min_eigenvalue"] >= -1e-8
    assert info.method == "gmres"


def test_preconditioned_and_direct_solves_agree():
    p = PhysicalParams.operating_point(delta=1e-5)
    model = DriveFrameModel(p, HilbertConfig(3))
    L, _ = model.generators(1e-4)
    direct, info = steady_state(L, return_info=True)
    assert info.method == "direct"
    assert np.max(np.abs(direct - model.solve(1e-4))) < 1e-10


def test_spot_value_at_centre(ref_params):
    n_plus, n_minus = steady_photon_numbers(ref_params)
    assert n_plus == pytest.approx(ref_params.drive_amp**2 / ref_params.gamma**2, rel=1e-2)


def test_unique_steady_state_small_system(ref_params):
    assert null_space_dimension(frame_liouvillian(ref_params.replace(drive_detuning=1e-4), HilbertConfig(1))) == 1


def test_degenerate_steady_state_detected():
    # two decoupled copies of a decaying qubit: two stationary states
    c = np.zeros((4, 4))
    c[0, 1] = 1.0
    c[2, 3] = 1.0
    L = liouvillian(np.zeros((4, 4)), 1.0, [c])
    with pytest.raises(DegenerateSteadyStateError) as err:
        steady_state(L)
    assert err.value.null_dim >= 2


def test_expectation_examples(rng):
    rho = random_density(rng, H2.total_dim)
    assert expectation(rho, OPS2.identity) == pytest.approx(1.0)
    assert expectation(projector(basis_state(H2, "g", 1, 0)), OPS2.n_plus) == 1
    assert abs(expectation(rho, random_hermitian(rng, H2.total_dim)).imag) < 1e-12
    with pytest.raises(ValueError):
        expectation(rho, np.eye(3))


def test_output_current():
    assert output_current(0.0, 0.5e-4) == 0
    assert output_current(0.01, 0.5e-4) == pytest.approx(5e-7)
    cur = output_current(np.array([0.02, 0.01]), 0.3)
    assert cur[0] / cur[1] == pytest.approx(2.0)
    with pytest.raises(DomainError):
        output_current(-1e-3, 1.0)


def test_time_evolve_identity_generator(rng):
    rho = random_density(rng, 3)
    assert np.allclose(time_evolve(sp.csr_matrix((9, 9)), rho, 5.0, 0.1), rho)


def test_time_evolve_photon_decay():
    p = PhysicalParams.operating_point(g=0.0, drive_amp=0.0)
    L = frame_liouvillian(p, HilbertConfig(1))
    ops = Operators(HilbertConfig(1))
    rho0 = projector(basis_state(HilbertConfig(1), "g", 1, 0))
    for t in (0.5 / p.gamma, 1.0 / p.gamma, 3.0 / p.gamma):
        n = expectation(time_evolve(L, rho0, t, dt=0.02 / p.gamma), ops.n_plus).real
        assert n == pytest.approx(np.exp(-p.gamma * t), abs=1e-6)
        assert -np.log(n) / t == pytest.approx(p.gamma, rel=1e-6)


def test_time_evolve_reaches_steady_state():
    p = PhysicalParams.operating_point()
    h = HilbertConfig(3)
    model = DriveFrameModel(p, h)
    W = np.sqrt(2) * p.g
    L, _ = model.generators(W)
    rho_t = time_evolve(L, projector(basis_state(h, "g", 0, 0)), 1.5e6, dt=500.0)
    diff = rho_t - model.solve(W)
    assert 0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum() < 1e-6


def test_time_evolve_rejects_unstable_step():
    L = liouvillian(np.zeros((2, 2)), 1.0, [np.array([[0, 1.0], [0, 0]])])
    # a non-trace-preserving perturbation drives the trace away
    bad = L + sp.identity(4, format="csr") * 0.5
    with pytest.raises(StepSizeError):
        time_evolve(bad, np.diag([0.0, 1.0]), 10.0, 0.5)


def test_commutator_and_dissipator_pieces(rng):
    H = random_hermitian(rng, 3)
    rho = random_density(rng, 3)
    assert np.allclose(apply(commutator_superoperator(H), rho), 1j * (rho @ H - H @ rho))
    c = np.diag([1.0, 0.0, 0.0])
    assert abs(np.trace(apply(dissipator(c, 2.0), rho))) < 1e-14
