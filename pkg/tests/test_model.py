import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringcavity.errors import UnsupportedConfigurationError
from ringcavity.field import RingGeometry
from ringcavity.hilbert import HilbertConfig, Operators, excitation_number
from ringcavity.model import (
    PhysicalParams,
    drive_hamiltonian,
    frame_generator,
    jc_hamiltonian,
    rotating_frame_hamiltonian,
)

H2 = HilbertConfig(2)
small = st.floats(-3e-4, 3e-4)
params = st.builds(
    PhysicalParams.operating_point,
    delta=small,
    drive_detuning=small,
    g=st.floats(0, 3e-4),
    drive_amp=st.floats(0, 1e-4),
)


def element(H, h, bra, ket):
    return H[h.index(*bra), h.index(*ket)]


def test_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(gamma=0.0)
    with pytest.raises(ValueError):
        PhysicalParams(g=-1e-4)
    with pytest.raises(ValueError):
        PhysicalParams(drive_amp=-1.0)


def test_derived_frequencies():
    p = PhysicalParams.operating_point(delta=1e-5, drive_detuning=2e-5)
    assert p.omega_plus == 1 + 1e-5 and p.omega_minus == 1 - 1e-5
    assert p.drive_freq == pytest.approx(1 - 2e-5, abs=1e-16)
    wp, wm = p.mode_detunings
    assert wp == pytest.approx(3e-5, rel=1e-12) and wm == pytest.approx(1e-5, rel=1e-12)


def test_from_geometry():
    ring = RingGeometry(1.0, 2 * np.pi, 0.1, mode_index=1, omega_rot=-1e-5)
    p = PhysicalParams.from_geometry(ring, g=1e-4)
    assert p.delta == pytest.approx(1e-5)
    assert p.omega0 == pytest.approx(1.0)


def test_decoupled_hamiltonian_is_diagonal():
    p = PhysicalParams.operating_point(g=0.0, delta=1e-5)
    H = jc_hamiltonian(p, H2)
    assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
    assert element(H, H2, ("e", 0, 0), ("e", 0, 0)) == pytest.approx(0.5)


def test_ground_state_is_eigenvector():
    p = PhysicalParams.operating_point(delta=3e-5)
    H = jc_hamiltonian(p, H2)
    assert H[0, 0] == pytest.approx(-0.5)
    assert np.count_nonzero(H[:, 0]) == 1


def test_single_excitation_matrix_elements():
    p = PhysicalParams.operating_point(delta=2e-5)
    H = jc_hamiltonian(p, H2)
    assert element(H, H2, ("e", 0, 0), ("g", 1, 0)) == pytest.approx(p.g)
    assert element(H, H2, ("e", 0, 0), ("g", 0, 1)) == pytest.approx(p.g)
    diff = element(H, H2, ("g", 1, 0), ("g", 1, 0)) - element(H, H2, ("g", 0, 1), ("g", 0, 1))
    assert diff.real == pytest.approx(2 * p.delta, rel=1e-9)


@given(params, st.floats(-5, 5))
def test_hamiltonians_hermitian(p, t):
    for H in (jc_hamiltonian(p, H2), rotating_frame_hamiltonian(p, H2), drive_hamiltonian(p, t, H2),
              jc_hamiltonian(p.replace(xi=2e-5), H2)):
        assert np.max(np.abs(H - H.conj().T)) <= 1e-14


def test_drive_hamiltonian():
    o = Operators(H2)
    assert not np.any(drive_hamiltonian(PhysicalParams.operating_point(drive_amp=0.0), 1.3, H2))
    p = PhysicalParams.operating_point()
    assert np.allclose(drive_hamiltonian(p, 0.0, H2), p.drive_amp * (o.a_plus + o.a_plus.T))
    # acts on the + mode only
    Hd = drive_hamiltonian(p, 0.7, H2)
    for op in (o.sigma_z, o.a_minus, o.n_minus):
        assert np.allclose(Hd @ op, op @ Hd)


def test_identity_frame_matches_lab_hamiltonian():
    # omega_d = 0 means drive_detuning = omega_atom
    p = PhysicalParams.operating_point(delta=1e-5, drive_amp=0.0, drive_detuning=1.0)
    assert np.allclose(rotating_frame_hamiltonian(p, H2), jc_hamiltonian(p, H2), atol=1e-15)


def test_full_resonance_leaves_only_coupling():
    p = PhysicalParams.operating_point()
    o = Operators(H2)
    H = rotating_frame_hamiltonian(p, H2, o)
    coupling = p.g * (o.sigma_plus @ (o.a_plus + o.a_minus) + o.sigma_minus @ (o.a_plus + o.a_minus).T)
    assert np.allclose(H, coupling + p.drive_amp * (o.a_plus + o.a_plus.T), atol=1e-18)


def test_frame_detunings():
    W, d = 3e-5, 1e-5
    p = PhysicalParams.operating_point(delta=d, drive_detuning=W)
    H = rotating_frame_hamiltonian(p, H2, drive=False)
    assert element(H, H2, ("g", 1, 0), ("g", 1, 0)).real + 0.5 * W == pytest.approx(W + d, rel=1e-9)
    assert element(H, H2, ("g", 0, 1), ("g", 0, 1)).real + 0.5 * W == pytest.approx(W - d, rel=1e-9)


@given(params, small)
def test_frame_hamiltonian_affine_in_detuning(p, W):
    o = Operators(H2)
    lhs = rotating_frame_hamiltonian(p.with_detuning(W), H2, o)
    rhs = rotating_frame_hamiltonian(p.with_detuning(0.0), H2, o) + W * frame_generator(H2, o)
    assert np.max(np.abs(lhs - rhs)) < 1e-18


def test_xi_rejected_in_frame():
    with pytest.raises(UnsupportedConfigurationError):
        rotating_frame_hamiltonian(PhysicalParams.operating_point(xi=1e-6), H2)


@given(params)
def test_undriven_frame_hamiltonian_conserves_excitations(p):
    H = rotating_frame_hamiltonian(p, H2, drive=False)
    N = excitation_number(H2, "projector")
    assert np.max(np.abs(N @ H - H @ N)) < 1e-12


def test_modes_degenerate_at_rest():
    p = PhysicalParams.operating_point()
    assert p.omega_plus == p.omega_minus
