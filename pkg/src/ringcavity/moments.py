"""Weak-drive moment closure for the driven ring cavity.

Steady-state equations for alpha_pm = <a_pm>, S_pm = <sigma_z a_pm>,
Z_pm = <sigma_+ a_pm>, s = <sigma_->, and <sigma_z>, with third-order
moments such as <sigma_z a^+ a> dropped. The system is linear and is solved
two ways: numerically as a 15x15 real system (``solve_moments``) and by
closed-form elimination (``n_closed_full``).

All frequencies are divided by a common scale, max(g, gamma), before
evaluation; photon numbers are invariant under that rescaling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystemError
from .model import PhysicalParams

UNKNOWNS = ("alpha_plus", "alpha_minus", "S_plus", "S_minus", "Z_plus", "Z_minus", "sigma_minus")


@dataclass(frozen=True)
class MomentSolution:
    alpha_plus: complex
    alpha_minus: complex
    S_plus: complex
    S_minus: complex
    Z_plus: complex
    Z_minus: complex
    sigma_minus: complex
    sigma_z: float
    residual: float
    condition: float

    @property
    def n_plus(self):
        return abs(self.alpha_plus) ** 2

    @property
    def n_minus(self):
        return abs(self.alpha_minus) ** 2

    @property
    def physical(self):
        """False when the closure has produced |<sigma_z>| > 1."""
        return -1.0 <= self.sigma_z <= 1.0


@dataclass(frozen=True)
class ClosedFormTerms:
    M: float
    D: float
    F: float
    G: float


def _scale(p):
    return max(p.g, p.gamma)


def _scaled(p, detuning=None):
    s = _scale(p)
    det = p.drive_detuning if detuning is None else np.asarray(detuning, dtype=float)
    offset = (p.omega0 - p.omega_atom) / s
    d = p.delta / s
    W = det / s
    return dict(
        g=p.g / s, gamma=p.gamma / s, E=p.drive_amp / s, delta=d, W=W,
        wp=offset + W + d, wm=offset + W - d,
    )


def moment_system(p: PhysicalParams):
    """Real 15x15 system (matrix, rhs) in rescaled units.

    Columns are (Re, Im) of the seven complex unknowns in ``UNKNOWNS`` order,
    then <sigma_z>. Rows are (Re, Im) of the seven complex equations, then
    Im Z+ + Im Z- = 0.
    """
    if p.xi != 0:
        raise ValueError("the moment closure requires xi = 0")
    v = _scaled(p)
    g, gam, E, W, wp, wm = v["g"], v["gamma"], v["E"], v["W"], v["wp"], v["wm"]
    ap, am, Sp, Sm, Zp, Zm, s = range(7)

    def k(w):
        return -1j * (w - 0.5j * gam)

    # (coefficients on x_j, coefficients on conj(x_j), coefficient on sigma_z, constant)
    equations = [
        ({ap: k(wp), s: -1j * g}, {}, 0, -1j * E),
        ({am: k(wm), s: -1j * g}, {}, 0, 0),
        ({Sp: k(wp), s: 1j * g}, {}, -1j * E, 0),
        ({Sm: k(wm), s: 1j * g}, {}, 0, 0),
        ({Zp: k(wp - W)}, {s: -1j * E}, -0.5j * g, -0.5j * g),
        ({Zm: k(wm - W)}, {}, -0.5j * g, -0.5j * g),
        ({s: -1j * W, Sp: 1j * g, Sm: 1j * g}, {}, 0, 0),
    ]
    A = np.zeros((15, 15))
    rhs = np.zeros(15)
    for row, (lin, conj, sz, const) in enumerate(equations):
        for part, take in ((0, np.real), (1, np.imag)):
            r = 2 * row + part
            for j, c in lin.items():
                A[r, 2 * j] += take(c)
                A[r, 2 * j + 1] += take(1j * c)
            for j, c in conj.items():
                A[r, 2 * j] += take(c)
                A[r, 2 * j + 1] += take(-1j * c)
            A[r, 14] += take(sz)
            rhs[r] = -take(const)
    A[14, 2 * Zp + 1] = 1.0
    A[14, 2 * Zm + 1] = 1.0
    return A, rhs


def solve_moments(p: PhysicalParams, max_condition=1e13):
    """Solve the closure. At g = 0 the atom decouples and <sigma_z> is pinned to -1."""
    A, rhs = moment_system(p)
    if p.g == 0:
        pin = np.zeros((1, 15))
        pin[0, 14] = 1.0
        A, rhs = np.vstack([A, pin]), np.append(rhs, -1.0)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > max_condition:
        raise SingularSystemError(cond)
    x = np.linalg.solve(A, rhs) if A.shape[0] == 15 else np.linalg.lstsq(A, rhs, rcond=None)[0]
    residual = np.linalg.norm(A @ x - rhs) / max(np.linalg.norm(rhs), np.finfo(float).tiny)
    z = x[:14:2] + 1j * x[1:14:2]
    return MomentSolution(*z, sigma_z=float(x[14]), residual=float(residual), condition=float(cond))


def _linear_response(v):
    """Complex pieces of the E -> 0 solution: kappa_pm and the common denominator."""
    half = 0.5j * v["gamma"]
    kp, km = v["wp"] - half, v["wm"] - half
    den = v["W"] * kp * km - v["g"] ** 2 * (kp + km)
    return kp, km, den


def _terms_general(v):
    g, gam, d, W, wp, wm = v["g"], v["gamma"], v["delta"], v["W"], v["wp"], v["wm"]
    M = 4 * (g**2 - W * wm) ** 2 + gam**2 * W**2
    D = gam**2 + 4 * d**2
    F = (
        gam**4 * W**2
        + 4 * gam**2 * (2 * g**4 + (wp * W - g**2) ** 2 + (wm * W - g**2) ** 2)
        + 16 * (W * wp * wm - g**2 * (wp + wm)) ** 2
    )
    # G from eliminating <sigma_z>: 1 + 4E^2 G/(F D) = -1/<sigma_z>.
    kp, km, den = _linear_response(v)
    up, um = wp - W, wm - W
    Dp, Dm = gam**2 + 4 * up**2, gam**2 + 4 * um**2
    X = np.imag(np.conj(km) * den * (up + 0.5j * gam))
    G = -16 * D * Dm * X / (gam * (Dp + Dm))
    return M, D, F, G


def _terms_resonant(v):
    g, gam, d, W = v["g"], v["gamma"], v["delta"], v["W"]
    M = 4 * (g**2 - W * (W - d)) ** 2 + gam**2 * W**2
    D = gam**2 + 4 * d**2
    F = (
        gam**4 * W**2
        + 8 * gam**2 * (2 * g**4 + W**4 - 2 * g**2 * W**2 + d**2 * W**2)
        + 16 * W**2 * (2 * g**2 - W**2 + d**2) ** 2
    )
    wm = W - d
    a = 2 * g**2 - W**2
    G = (
        16 * d**2 * (a * wm**2 + 2 * g**2 * W * d)
        + gam**4 * a
        + 4 * gam**2 * (a * d**2 + a * wm**2 + 2 * g**2 * W * d)
    )
    return M, D, F, G


def closed_form_terms(p: PhysicalParams, detuning=None, scaled=False):
    """M, D, F, G polynomials.

    At omega_atom == omega0 these are the standard resonant polynomials. Off
    resonance F carries the general last term 16[W w+ w- - g^2 (w+ + w-)]^2
    and G is taken from the elimination of <sigma_z>; both reduce to the
    resonant forms when the atom is resonant. With ``scaled`` the terms are
    returned in units of the internal frequency scale.
    """
    v = _scaled(p, detuning)
    M, D, F, G = (_terms_resonant if p.is_resonant else _terms_general)(v)
    if not scaled:
        s = _scale(p)
        M, D, F, G = M * s**4, D * s**2, F * s**6, G * s**6
    return ClosedFormTerms(M, D, F, G)


def n_weak_drive(p: PhysicalParams, detuning=None):
    """Leading-order photon numbers (4 E^2 M / F, 16 E^2 g^4 / F).

    At g = 0 both M and F carry a factor W^2 from the decoupled atom; the
    empty-cavity Lorentzian is returned directly so W = 0 is not 0/0.
    """
    v = _scaled(p, detuning)
    if p.g == 0:
        E, gam = v["E"], v["gamma"]
        n_plus = E**2 / (v["wp"] ** 2 + 0.25 * gam**2)
        return n_plus, np.zeros_like(n_plus)
    M, _, F, _ = (_terms_resonant if p.is_resonant else _terms_general)(v)
    E, g = v["E"], v["g"]
    return 4 * E**2 * M / F, 16 * E**2 * g**4 / F


def n_closed_full(p: PhysicalParams, detuning=None, include_correction=True):
    """|alpha_pm|^2 of the closure in closed form.

    n+ = 4E^2 [M F D^2 + C] / (F D + 4E^2 G)^2 and
    n- = 16 E^2 g^4 F D^2 / (F D + 4E^2 G)^2, where
    C = E^2 G [2 F D Re(w) + 4 E^2 G] / |kappa+|^2 with
    w = kappa+ (W kappa- - g^2) / den. C is O(E^2) relative to the leading
    term; ``include_correction=False`` drops it.
    """
    v = _scaled(p, detuning)
    M, D, F, G = (_terms_resonant if p.is_resonant else _terms_general)(v)
    E, g = v["E"], v["g"]
    denom = (F * D + 4 * E**2 * G) ** 2
    n_minus = 16 * E**2 * g**4 * F * D**2 / denom
    lead = M * F * D**2
    if include_correction:
        kp, km, den = _linear_response(v)
        w = kp * (v["W"] * km - g**2) / den
        lead = lead + E**2 * G * (2 * F * D * np.real(w) + 4 * E**2 * G) / np.abs(kp) ** 2
    return 4 * E**2 * lead / denom, n_minus


def closure_sigma_z(p: PhysicalParams, detuning=None):
    """<sigma_z> of the closure in closed form: -F D / (F D + 4 E^2 G)."""
    v = _scaled(p, detuning)
    _, D, F, G = (_terms_resonant if p.is_resonant else _terms_general)(v)
    return -F * D / (F * D + 4 * v["E"] ** 2 * G)


def slope_closed_form(p: PhysicalParams):
    """64 sqrt(2) g E^2 / (gamma^2 (gamma^2 + 8 g^2)), the reference dn+/dDelta at W = sqrt(2) g."""
    if not p.is_resonant:
        raise ValueError("the slope formula assumes omega_atom == omega0")
    g, gam, E = p.g, p.gamma, p.drive_amp
    return 64 * np.sqrt(2) * g * E**2 / (gam**2 * (gam**2 + 8 * g**2))


def slope_weak_drive(p: PhysicalParams):
    """Exact dn+/dDelta of 4 E^2 M / F at W = sqrt(2) g, Delta = 0: -16 sqrt(2) g E^2 / (gamma^2 (gamma^2 + 8 g^2))."""
    if not p.is_resonant:
        raise ValueError("the slope formula assumes omega_atom == omega0")
    g, gam, E = p.g, p.gamma, p.drive_amp
    return -16 * np.sqrt(2) * g * E**2 / (gam**2 * (gam**2 + 8 * g**2))
