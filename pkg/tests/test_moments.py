import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from ringcavity.analysis import default_grid
from ringcavity.errors import SingularSystemError
from ringcavity.moments import (
    _scaled,
    _terms_general,
    _terms_resonant,
    closed_form_terms,
    closure_sigma_z,
    moment_system,
    n_closed_full,
    n_weak_drive,
    slope_closed_form,
    slope_weak_drive,
    solve_moments,
)
from ringcavity.model import PhysicalParams

G = 1e-4
detunings = st.floats(-5e-4, 5e-4)
deltas = st.floats(-2e-4, 2e-4)


def test_undriven_fixed_point():
    sol = solve_moments(PhysicalParams.operating_point(drive_amp=0.0, drive_detuning=1e-4, delta=1e-5))
    assert sol.sigma_z == pytest.approx(-1.0, abs=1e-14)
    for name in ("alpha_plus", "alpha_minus", "S_plus", "S_minus", "Z_plus", "Z_minus", "sigma_minus"):
        assert getattr(sol, name) == 0


def test_decoupled_driven_cavity():
    p = PhysicalParams.operating_point(g=0.0, delta=2e-5, drive_detuning=3e-5)
    sol = solve_moments(p)
    assert sol.sigma_z == pytest.approx(-1, abs=1e-14)
    w_plus = p.mode_detunings[0]
    assert sol.alpha_plus == pytest.approx(-p.drive_amp / (w_plus - 0.5j * p.gamma), rel=1e-12)
    assert sol.alpha_minus == 0
    assert n_closed_full(p)[1] == 0


@given(detunings, deltas)
def test_linear_system_residual(W, d):
    sol = solve_moments(PhysicalParams.operating_point(delta=d, drive_detuning=W))
    assert sol.residual < 1e-12


def test_system_shape():
    A, b = moment_system(PhysicalParams.operating_point())
    assert A.shape == (15, 15) and b.shape == (15,)


def test_singular_system_reported():
    # g = 0 and W = 0 leave <sigma_-> undetermined even with <sigma_z> pinned
    with pytest.raises(SingularSystemError) as err:
        solve_moments(PhysicalParams.operating_point(g=0.0, drive_detuning=0.0))
    assert err.value.condition_number > 1e13


def test_closed_form_matches_linear_system_on_grid(ref_params):
    worst = 0.0
    for d in np.linspace(-1e-5, 1e-5, 5):
        for W in np.linspace(-2 * np.sqrt(2) * G, 2 * np.sqrt(2) * G, 5):
            p = ref_params.replace(delta=d, drive_detuning=W)
            sol = solve_moments(p)
            n_plus, n_minus = n_closed_full(p)
            worst = max(worst, abs(sol.n_plus - n_plus) / n_plus, abs(sol.n_minus - n_minus) / n_minus)
    assert worst < 1e-8


@given(detunings, deltas, st.floats(0.99, 1.01), st.floats(0, 2e-5))
def test_closed_form_matches_linear_system_anywhere(W, d, wa, E):
    p = PhysicalParams.operating_point(delta=d, drive_detuning=W, omega_atom=wa, drive_amp=E)
    try:
        sol = solve_moments(p)
    except SingularSystemError:
        assume(False)
    n_plus, n_minus = n_closed_full(p)
    assert sol.n_plus == pytest.approx(n_plus, rel=1e-8, abs=1e-300)
    assert sol.n_minus == pytest.approx(n_minus, rel=1e-8, abs=1e-300)
    assert sol.sigma_z == pytest.approx(closure_sigma_z(p), rel=1e-10)


def test_dropping_the_numerator_correction_costs_accuracy(ref_params):
    # the E^2-order numerator term is what brings the closed form to the oracle
    p = ref_params.replace(drive_detuning=np.sqrt(2) * G, delta=1e-5)
    exact = solve_moments(p).n_plus
    rough = n_closed_full(p, include_correction=False)[0]
    assert 1e-8 < abs(rough - exact) / exact < 1e-2


@given(st.floats(-3e-4, 3e-4), st.floats(-1e-4, 1e-4))
def test_weak_drive_limit(W, d):
    p = PhysicalParams.operating_point(delta=d, drive_detuning=W, drive_amp=1e-9)
    full, weak = np.array(n_closed_full(p)), np.array(n_weak_drive(p))
    assert np.allclose(full, weak, rtol=1e-6)


@given(st.floats(-3e-4, 3e-4), deltas)
def test_uncoupled_cavity_lorentzian(W, d):
    p = PhysicalParams.operating_point(g=0.0, delta=d, drive_detuning=W)
    n_plus, n_minus = n_weak_drive(p)
    w_plus = p.mode_detunings[0]
    assert n_plus == pytest.approx(p.drive_amp**2 / (w_plus**2 + p.gamma**2 / 4), rel=1e-12)
    assert n_minus == 0
    # the general formula agrees away from its removable 0/0 point
    if abs(W) > 1e-6:
        M, _, F, _ = _terms_resonant(_scaled(p.replace(g=1e-300), W))
        assert 4 * (p.drive_amp / p.gamma) ** 2 * M / F == pytest.approx(n_plus, rel=1e-9)


def test_spot_value(ref_params):
    n_plus, n_minus = n_weak_drive(ref_params)
    assert n_plus == pytest.approx(0.01, rel=1e-12)
    assert n_minus == pytest.approx(0.01, rel=1e-12)


def test_symmetry_at_rest(ref_params):
    grid = default_grid(G)
    n_plus, n_minus = n_weak_drive(ref_params, grid)
    assert np.max(np.abs(n_plus - n_plus[::-1])) <= 1e-12 * n_plus.max()
    assert np.max(np.abs(n_minus - n_minus[::-1])) <= 1e-12 * n_minus.max()


def test_rotation_breaks_plus_symmetry_only(ref_params):
    grid = default_grid(G)
    n_plus, n_minus = n_weak_drive(ref_params.replace(delta=1e-5), grid)
    assert np.max(np.abs(n_minus - n_minus[::-1])) <= 1e-12 * n_minus.max()
    assert np.max(np.abs(n_plus - n_plus[::-1])) > 1e-3 * n_plus.max()


@given(st.floats(0, 5e-4), deltas, st.floats(1e-6, 1e-3), st.floats(1e-6, 5e-4))
def test_F_positive_and_even(W, d, gam, g):
    p = PhysicalParams.operating_point(delta=d, gamma=gam, g=g)
    F1 = closed_form_terms(p, W, scaled=True).F
    F2 = closed_form_terms(p, -W, scaled=True).F
    assert F1 > 0
    assert F1 == pytest.approx(F2, rel=1e-13)


@given(detunings, deltas)
def test_general_terms_reduce_to_resonant(W, d):
    v = _scaled(PhysicalParams.operating_point(delta=d), W)
    M1, D1, F1, G1 = _terms_resonant(v)
    M2, D2, F2, G2 = _terms_general(v)
    assert M1 == pytest.approx(M2, rel=1e-10, abs=1e-12)
    assert D1 == pytest.approx(D2, rel=1e-14)
    assert F1 == pytest.approx(F2, rel=1e-10)
    # G is a difference of large terms; compare on the scale of its parts
    scale = (v["gamma"] ** 2 + 4 * (v["W"] ** 2 + v["delta"] ** 2 + 2 * v["g"] ** 2)) ** 3
    assert abs(G1 - G2) <= 1e-10 * scale


def _F_minima(d, gamma=0.5e-4):
    p = PhysicalParams.operating_point(delta=d, gamma=gamma)
    grid = default_grid(G)
    F = closed_form_terms(p, grid, scaled=True).F
    idx = [i for i in range(1, grid.size - 1) if F[i] < F[i - 1] and F[i] <= F[i + 1]]
    return grid, grid[idx]


@pytest.mark.parametrize("d", [0.0, 1e-5, -1e-5])
def test_three_minima_of_F_small_rotation(d):
    grid, mins = _F_minima(d)
    step = grid[1] - grid[0]
    dg = np.sqrt(d * d + 2 * G * G)
    assert len(mins) == 3
    assert np.all(np.abs(mins - np.array([-dg, 0.0, dg])) <= step)


@pytest.mark.xfail(strict=True, reason="at gamma = g/2 the minima of F sit about 1.6 grid steps inside +-Delta_g once Delta ~ g")
def test_three_minima_of_F_large_rotation():
    grid, mins = _F_minima(1e-4)
    step = grid[1] - grid[0]
    dg = np.sqrt(1e-8 + 2 * G * G)
    assert np.all(np.abs(mins - np.array([-dg, 0.0, dg])) <= step)


def test_slope_closed_form_value(ref_params):
    assert slope_closed_form(ref_params) == pytest.approx(1097.0868847500374, rel=1e-12)
    assert slope_closed_form(ref_params.replace(drive_amp=2 * ref_params.drive_amp)) == pytest.approx(4 * slope_closed_form(ref_params))
    assert slope_closed_form(ref_params.replace(drive_amp=0.0)) == 0


def _finite_difference(p, h=1e-7):
    W = np.sqrt(2) * p.g
    up = n_weak_drive(p.replace(delta=h, drive_detuning=W))[0]
    down = n_weak_drive(p.replace(delta=-h, drive_detuning=W))[0]
    return (up - down) / (2 * h)


def test_weak_drive_slope_matches_finite_difference(ref_params):
    assert _finite_difference(ref_params) == pytest.approx(slope_weak_drive(ref_params), rel=1e-6)
    assert slope_weak_drive(ref_params) == pytest.approx(-slope_closed_form(ref_params) / 4, rel=1e-14)


@pytest.mark.xfail(strict=True, reason="the exact derivative of 4E^2 M/F at sqrt(2) g is -1/4 of the closed-form slope")
def test_closed_form_slope_matches_finite_difference(ref_params):
    assert _finite_difference(ref_params) == pytest.approx(slope_closed_form(ref_params), rel=0.02)


def test_slope_needs_resonance(ref_params):
    with pytest.raises(ValueError):
        slope_closed_form(ref_params.replace(omega0=1.001))


def test_closure_flags_unphysical_sigma_z():
    # dropping third-order moments can push <sigma_z> below -1; flagged, not rejected
    sol = solve_moments(PhysicalParams.operating_point(drive_detuning=2.1e-4))
    assert sol.sigma_z < -1
    assert not sol.physical
    assert solve_moments(PhysicalParams.operating_point()).physical


def test_scale_invariance():
    p = PhysicalParams.operating_point(delta=1e-5, drive_detuning=1.3e-4)
    q = p.replace(g=1.0, gamma=0.5, drive_amp=0.05, delta=0.1, drive_detuning=1.3)
    assert np.allclose(n_closed_full(p), n_closed_full(q), rtol=1e-10)
    assert np.allclose(n_weak_drive(p), n_weak_drive(q), rtol=1e-10)
