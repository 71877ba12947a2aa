"""Spectral sweeps, peak finding, rotation sensitivity and solver cross-checks."""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .hilbert import HilbertConfig
from .liouville import DriveFrameModel, output_current
from .moments import n_weak_drive, slope_closed_form, slope_weak_drive
from .model import PhysicalParams

METHODS = ("analytic", "numeric", "both")
MODES = ("plus", "minus")


class SweepPointError(RuntimeError):
    def __init__(self, index, detuning, cause):
        self.index = index
        self.detuning = detuning
        self.cause = cause
        super().__init__(f"sweep point {index} (detuning {detuning:.6g}) failed: {cause}")


@dataclass(frozen=True)
class Peak:
    position: float
    height: float
    mode: str
    method: str
    index: int  # grid node of the raw maximum


@dataclass
class SweepResult:
    grid: np.ndarray
    params: PhysicalParams
    n_plus_analytic: np.ndarray | None = None
    n_minus_analytic: np.ndarray | None = None
    n_plus_numeric: np.ndarray | None = None
    n_minus_numeric: np.ndarray | None = None
    n_max: int | None = None
    failures: list = field(default_factory=list)
    peaks: list = field(default_factory=list)

    @property
    def methods(self):
        out = []
        if self.n_plus_analytic is not None:
            out.append("analytic")
        if self.n_plus_numeric is not None:
            out.append("numeric")
        return tuple(out)

    def curve(self, mode, method):
        return getattr(self, f"n_{mode}_{method}")

    def currents(self, method):
        return (
            output_current(np.clip(self.curve("plus", method), 0, None), self.params.gamma),
            output_current(np.clip(self.curve("minus", method), 0, None), self.params.gamma),
        )


def default_grid(g, points=401, span=3.0):
    """Grid over [-span*sqrt(2) g, span*sqrt(2) g] that is exactly symmetric about 0."""
    if points < 3 or points % 2 == 0:
        raise ValueError("points must be odd and >= 3 so the grid contains 0")
    half = points // 2
    right = span * np.sqrt(2) * g * np.arange(half + 1) / half
    return np.concatenate([-right[:0:-1], right])


def symmetric_grid(limit, points):
    half = points // 2
    right = limit * np.arange(half + 1) / half
    return np.concatenate([-right[:0:-1], right])


def _numeric_curves(p, grid, n_max, threads):
    model = DriveFrameModel(p, HilbertConfig(n_max))
    n_plus = np.full(grid.shape, np.nan)
    n_minus = np.full(grid.shape, np.nan)
    failures = []

    def work(i):
        try:
            rho = model.solve(float(grid[i]))
            return i, model.photon_numbers(rho), None
        except Exception as exc:  # recorded per point, re-raised by the caller if strict
            return i, None, exc

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(grid.size)))
    else:
        results = [work(i) for i in range(grid.size)]
    for i, values, exc in results:
        if exc is None:
            n_plus[i], n_minus[i] = values
        else:
            failures.append((i, float(grid[i]), repr(exc)))
    return n_plus, n_minus, failures


def sweep(p: PhysicalParams, grid=None, methods="analytic", n_max=5, threads=1, strict=True):
    """Steady photon numbers across drive detunings.

    ``methods`` is 'analytic', 'numeric', 'both' or an iterable of the first two.
    Numeric failures are collected in ``failures``; with ``strict`` the first
    one is raised as SweepPointError.
    """
    if p.xi != 0:
        raise ValueError("sweeps are defined in the drive frame, which requires xi = 0")
    grid = default_grid(p.g if p.g > 0 else p.gamma) if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    wanted = _method_set(methods)

    result = SweepResult(grid=grid, params=p.with_detuning(0.0))
    if "analytic" in wanted:
        result.n_plus_analytic, result.n_minus_analytic = (
            np.broadcast_to(x, grid.shape).astype(float) for x in n_weak_drive(p, grid)
        )
    if "numeric" in wanted:
        n_plus, n_minus, failures = _numeric_curves(p, grid, n_max, threads)
        result.n_plus_numeric, result.n_minus_numeric = n_plus, n_minus
        result.n_max = n_max
        result.failures = failures
        if strict and failures:
            i, det, cause = failures[0]
            raise SweepPointError(i, det, cause)
    result.peaks = find_peaks(result, warn=False)
    return result


def _method_set(methods):
    if isinstance(methods, str):
        if methods not in METHODS:
            raise ValueError(f"unknown method {methods!r}; expected one of {METHODS}")
        return {"analytic", "numeric"} if methods == "both" else {methods}
    out = set(methods)
    if not out:
        raise ValueError("at least one method is required")
    bad = out - {"analytic", "numeric"}
    if bad:
        raise ValueError(f"unknown methods {sorted(bad)}")
    return out


def locate_peaks(x, y):
    """Interior local maxima with three-point parabolic refinement.

    Returns (refined position, refined height, grid index) tuples sorted by
    position. A flat top is reported once, at its left edge, and only if the
    curve falls again after it.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    out = []
    for i in range(1, len(y) - 1):
        if not y[i] > y[i - 1]:
            continue
        j = i
        while j + 1 < len(y) and y[j + 1] == y[i]:
            j += 1
        if j + 1 == len(y) or y[j + 1] > y[i]:
            continue
        xs, ys = x[i - 1 : i + 2], y[i - 1 : i + 2]
        a, b, c = np.polyfit(xs - x[i], ys, 2)
        if a < 0:
            dx = -b / (2 * a)
            dx = float(np.clip(dx, xs[0] - x[i], xs[2] - x[i]))
            out.append((x[i] + dx, a * dx * dx + b * dx + c, i))
        else:
            out.append((x[i], y[i], i))
    return out


def find_peaks(result: SweepResult, expected=3, warn=True):
    peaks = []
    for method in result.methods:
        for mode in MODES:
            found = locate_peaks(result.grid, result.curve(mode, method))
            if warn and len(found) < expected:
                warnings.warn(
                    f"{method} n_{mode}: found {len(found)} peaks, expected {expected} "
                    "(overdamped spectra merge peaks)",
                    stacklevel=2,
                )
            peaks.extend(Peak(pos, h, mode, method, i) for pos, h, i in found)
    return peaks


def peaks_of(result: SweepResult, mode, method="analytic"):
    return [pk for pk in result.peaks if pk.mode == mode and pk.method == method]


@dataclass(frozen=True)
class SensitivityCurve:
    delta_grid: np.ndarray
    heights: np.ndarray
    fitted_slope: float
    intercept: float
    fit_residual: float
    fit_window: tuple
    closed_form_slope: float
    weak_drive_slope: float
    method: str

    @property
    def relative_difference(self):
        scale = max(abs(self.closed_form_slope), np.finfo(float).tiny)
        return abs(self.fitted_slope - self.closed_form_slope) / scale


def default_delta_grid(omega_atom=1.0, points=21, limit=5e-6):
    return symmetric_grid(limit * omega_atom, points)


def sensitivity_curve(p: PhysicalParams, delta_grid=None, method="analytic", n_max=5, fit_points=11):
    """Height of n+ at drive detuning sqrt(2) g versus rotation detuning.

    The probe detuning stays fixed while Delta varies. A straight line is
    fitted by least squares through the central ``fit_points`` samples.
    """
    if not p.is_resonant:
        raise ValueError("the sensitivity protocol assumes omega_atom == omega0")
    grid = default_delta_grid(p.omega_atom) if delta_grid is None else np.asarray(delta_grid, dtype=float)
    probe = np.sqrt(2) * p.g
    if method == "analytic":
        heights = np.array([n_weak_drive(p.replace(delta=d, drive_detuning=probe))[0] for d in grid])
    elif method == "numeric":
        h = HilbertConfig(n_max)
        heights = []
        for d in grid:
            model = DriveFrameModel(p.replace(delta=d), h)
            heights.append(model.photon_numbers(model.solve(probe))[0])
        heights = np.array(heights)
    else:
        raise ValueError(f"unknown method {method!r}")

    order = np.argsort(np.abs(grid), kind="stable")[: min(fit_points, grid.size)]
    sel = np.sort(order)
    xs, ys = grid[sel], heights[sel]
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    return SensitivityCurve(
        delta_grid=grid,
        heights=heights,
        fitted_slope=float(slope),
        intercept=float(intercept),
        fit_residual=resid,
        fit_window=(float(xs.min()), float(xs.max())),
        closed_form_slope=float(slope_closed_form(p)),
        weak_drive_slope=float(slope_weak_drive(p)),
        method=method,
    )


@dataclass(frozen=True)
class PathComparison:
    max_rel_error_plus: float
    max_rel_error_minus: float
    worst_index_plus: int
    worst_index_minus: int
    worst_detuning_plus: float
    worst_detuning_minus: float
    weak_drive: bool
    tolerance: float

    @property
    def max_rel_error(self):
        return max(self.max_rel_error_plus, self.max_rel_error_minus)

    @property
    def within_tolerance(self):
        return self.max_rel_error <= self.tolerance

    @property
    def closure_breakdown(self):
        return not self.within_tolerance


def relative_errors(numeric, analytic, floor=1e-12):
    numeric, analytic = np.asarray(numeric), np.asarray(analytic)
    return np.abs(numeric - analytic) / np.maximum(np.abs(analytic), floor)


def compare_sweep(result: SweepResult, tolerance=0.01, floor=1e-12):
    if set(result.methods) != {"analytic", "numeric"}:
        raise ValueError("comparison needs a sweep with both methods")
    errs = {
        mode: relative_errors(result.curve(mode, "numeric"), result.curve(mode, "analytic"), floor)
        for mode in MODES
    }
    ip, im = int(np.argmax(errs["plus"])), int(np.argmax(errs["minus"]))
    p = result.params
    return PathComparison(
        max_rel_error_plus=float(errs["plus"][ip]),
        max_rel_error_minus=float(errs["minus"][im]),
        worst_index_plus=ip,
        worst_index_minus=im,
        worst_detuning_plus=float(result.grid[ip]),
        worst_detuning_minus=float(result.grid[im]),
        weak_drive=p.drive_amp <= p.gamma / 5,
        tolerance=tolerance,
    )


def compare_paths(p: PhysicalParams, grid=None, n_max=5, threads=1, tolerance=0.01):
    """Largest relative gap between Lindblad <a^+ a> and the weak-drive closed form."""
    return compare_sweep(sweep(p, grid, "both", n_max=n_max, threads=threads), tolerance)
