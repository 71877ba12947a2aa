"""Run configuration: a YAML file with nested sections, overridable from the CLI.

Layout (every key optional)::

    physical:  {omega0, omega_atom, g, gamma, drive_amp, xi}
    rotation:  {delta} | {v_R, k} | {omega_rot, radius, mode_index, circumference}, plus c
    hilbert:   {n_max}
    sweep:     {detuning_min, detuning_max, points}
    slope:     {delta_limit, points, fit_points}
    method:    analytic | numeric | both
    threads:   1
    output:    {path, format}

Precedence: built-in defaults < file < command-line flags. A rotation flag on
the command line (--delta) replaces the whole rotation section of the file.
With no rotation given, delta = 0.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np
import yaml

from .errors import ConfigError, DomainError
from .field import RingGeometry
from .model import OPERATING_POINT, PhysicalParams
from .analysis import default_delta_grid, default_grid, symmetric_grid

FORMATS = ("csv", "structured")
ROTATION_FORMS = {
    "delta": ("delta",),
    "velocity": ("v_R", "k"),
    "geometry": ("omega_rot", "radius", "mode_index", "circumference"),
}


def _num(section, name, value, kind=float):
    if value is None:
        return None
    if isinstance(value, bool):
        raise ConfigError(f"{section}.{name}", f"expected a number, got {value!r}")
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{name}", f"expected a number, got {value!r}") from None
    if kind is int and out != float(value):
        raise ConfigError(f"{section}.{name}", f"expected an integer, got {value!r}")
    if kind is float and not math.isfinite(out):
        raise ConfigError(f"{section}.{name}", f"must be finite, got {value!r}")
    return out


def _section(cls, name, raw, kinds):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(name, f"expected a mapping, got {type(raw).__name__}")
    known = {f.name for f in fields(cls)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{name}.{key}", "unknown key")
    values = {}
    for key, value in raw.items():
        kind = kinds.get(key, float)
        values[key] = value if kind is str else _num(name, key, value, kind)
    return cls(**values)


@dataclass(frozen=True)
class PhysicalSection:
    omega0: float | None = None
    omega_atom: float | None = None
    g: float = OPERATING_POINT["g"]
    gamma: float = OPERATING_POINT["gamma"]
    drive_amp: float = OPERATING_POINT["drive_amp"]
    xi: float = 0.0


@dataclass(frozen=True)
class RotationSection:
    delta: float | None = None
    v_R: float | None = None
    k: float | None = None
    omega_rot: float | None = None
    radius: float | None = None
    mode_index: int | None = None
    circumference: float | None = None
    c: float = 1.0

    def form(self):
        given = {name: [getattr(self, key) is not None for key in keys] for name, keys in ROTATION_FORMS.items()}
        partial = [n for n, flags in given.items() if any(flags) and not all(flags)]
        if partial:
            keys = ROTATION_FORMS[partial[0]]
            missing = [k for k in keys if getattr(self, k) is None]
            raise ConfigError(f"rotation.{missing[0]}", f"the {partial[0]} form needs all of {keys}")
        full = [n for n, flags in given.items() if all(flags)]
        if len(full) > 1:
            raise ConfigError("rotation", f"give exactly one of the forms {full}, not several")
        return full[0] if full else None

    def resolve(self):
        """(Delta, derived omega0 or None)."""
        form = self.form()
        if form is None:
            return 0.0, None
        if form == "delta":
            return self.delta, None
        if self.c <= 0:
            raise ConfigError("rotation.c", "must be positive")
        try:
            if form == "velocity":
                if self.k == 0:
                    raise ConfigError("rotation.k", "the k = 0 mode is excluded")
                if abs(self.v_R) >= self.c:
                    raise ConfigError("rotation.v_R", f"|v_R| must be below c = {self.c}")
                return -self.v_R * abs(self.k), self.c * abs(self.k)
            ring = RingGeometry(self.radius, self.circumference, 1.0, self.mode_index, self.omega_rot, self.c)
        except DomainError as exc:
            raise ConfigError("rotation", str(exc)) from None
        if self.mode_index == 0:
            raise ConfigError("rotation.mode_index", "the n = 0 mode is excluded")
        return ring.rotation_detuning, ring.rest_frequency


@dataclass(frozen=True)
class SweepSection:
    detuning_min: float | None = None
    detuning_max: float | None = None
    points: int = 401


@dataclass(frozen=True)
class SlopeSection:
    delta_limit: float = 5e-6
    points: int = 21
    fit_points: int = 11


@dataclass(frozen=True)
class OutputSection:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    physical: PhysicalSection = field(default_factory=PhysicalSection)
    rotation: RotationSection = field(default_factory=RotationSection)
    n_max: int = 5
    sweep: SweepSection = field(default_factory=SweepSection)
    slope: SlopeSection = field(default_factory=SlopeSection)
    method: str = "analytic"
    threads: int = 1
    output: OutputSection = field(default_factory=OutputSection)

    def __post_init__(self):
        self.validate()

    def validate(self):
        ph = self.physical
        if not ph.gamma > 0:
            raise ConfigError("physical.gamma", f"must be positive, got {ph.gamma}")
        if ph.g < 0:
            raise ConfigError("physical.g", f"must be non-negative, got {ph.g}")
        if ph.drive_amp < 0:
            raise ConfigError("physical.drive_amp", f"must be non-negative, got {ph.drive_amp}")
        for name in ("omega0", "omega_atom"):
            value = getattr(ph, name)
            if value is not None and not value > 0:
                raise ConfigError(f"physical.{name}", f"must be positive, got {value}")
        self.rotation.form()
        if self.n_max < 1:
            raise ConfigError("hilbert.n_max", f"must be >= 1, got {self.n_max}")
        if self.threads < 1:
            raise ConfigError("threads", f"must be >= 1, got {self.threads}")
        if self.method not in ("analytic", "numeric", "both"):
            raise ConfigError("method", f"expected analytic, numeric or both, got {self.method!r}")
        if self.output.format not in FORMATS:
            raise ConfigError("output.format", f"expected one of {FORMATS}, got {self.output.format!r}")
        sw = self.sweep
        if sw.points < 1:
            raise ConfigError("sweep.points", "must be >= 1")
        if (sw.detuning_min is None) != (sw.detuning_max is None):
            raise ConfigError("sweep", "give both detuning_min and detuning_max or neither")
        if sw.detuning_min is not None:
            if sw.points > 1 and not sw.detuning_min < sw.detuning_max:
                raise ConfigError("sweep.detuning_max", "must exceed detuning_min")
        sl = self.slope
        if not sl.delta_limit > 0:
            raise ConfigError("slope.delta_limit", "must be positive")
        if sl.points < 2 or not 2 <= sl.fit_points <= sl.points:
            raise ConfigError("slope.fit_points", "need 2 <= fit_points <= points")

    # parsing and serialization

    @classmethod
    def from_dict(cls, raw):
        raw = dict(raw or {})
        known = {"physical", "rotation", "hilbert", "sweep", "slope", "method", "threads", "output"}
        for key in raw:
            if key not in known:
                raise ConfigError(key, "unknown section")
        method = raw.get("method", "analytic")
        if isinstance(method, (list, tuple)):
            method = _method_from_list(method)
        elif not isinstance(method, str) or not method:
            raise ConfigError("method", "at least one method is required")
        hilbert = raw.get("hilbert") or {}
        if not isinstance(hilbert, dict) or set(hilbert) - {"n_max"}:
            raise ConfigError("hilbert", "only n_max is recognised")
        return cls(
            physical=_section(PhysicalSection, "physical", raw.get("physical"), {}),
            rotation=_section(RotationSection, "rotation", raw.get("rotation"), {"mode_index": int}),
            n_max=_num("hilbert", "n_max", hilbert.get("n_max", 5), int),
            sweep=_section(SweepSection, "sweep", raw.get("sweep"), {"points": int}),
            slope=_section(SlopeSection, "slope", raw.get("slope"), {"points": int, "fit_points": int}),
            method=method,
            threads=_num("config", "threads", raw.get("threads", 1), int),
            output=_section(OutputSection, "output", raw.get("output"), {"path": str, "format": str}),
        )

    def to_dict(self):
        def clean(section):
            return {k: v for k, v in asdict(section).items() if v is not None}

        return {
            "physical": clean(self.physical),
            "rotation": clean(self.rotation),
            "hilbert": {"n_max": self.n_max},
            "sweep": clean(self.sweep),
            "slope": clean(self.slope),
            "method": self.method,
            "threads": self.threads,
            "output": clean(self.output),
        }

    def dump(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=False)

    @classmethod
    def loads(cls, text):
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError("config", f"not valid YAML: {exc}") from None
        if raw is not None and not isinstance(raw, dict):
            raise ConfigError("config", "top level must be a mapping")
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.loads(fh.read())
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None

    def replace(self, **changes):
        return replace(self, **changes)

    # resolution

    def params(self) -> PhysicalParams:
        ph = self.physical
        delta, derived = self.rotation.resolve()
        omega0 = ph.omega0
        if derived is not None:
            if omega0 is not None and not math.isclose(omega0, derived, rel_tol=1e-12):
                raise ConfigError("physical.omega0", f"conflicts with {derived!r} derived from the rotation section")
            omega0 = derived
        omega0 = OPERATING_POINT["omega0"] if omega0 is None else omega0
        omega_atom = omega0 if ph.omega_atom is None else ph.omega_atom
        return PhysicalParams(
            omega0=omega0, omega_atom=omega_atom, delta=delta, g=ph.g, xi=ph.xi,
            gamma=ph.gamma, drive_amp=ph.drive_amp,
        )

    def grid(self):
        sw = self.sweep
        if sw.detuning_min is None:
            g = self.physical.g if self.physical.g > 0 else self.physical.gamma
            if sw.points % 2 == 1 and sw.points >= 3:
                return default_grid(g, sw.points)
            lim = 3 * np.sqrt(2) * g
            return np.linspace(-lim, lim, sw.points)
        if sw.points == 1:
            return np.array([sw.detuning_min])
        if sw.detuning_min == -sw.detuning_max and sw.points % 2 == 1:
            return symmetric_grid(sw.detuning_max, sw.points)
        return np.linspace(sw.detuning_min, sw.detuning_max, sw.points)

    def delta_grid(self):
        sl = self.slope
        if sl.points % 2 == 1:
            return default_delta_grid(1.0, sl.points, sl.delta_limit)
        return np.linspace(-sl.delta_limit, sl.delta_limit, sl.points)


def _method_from_list(items):
    items = set(items)
    if not items:
        raise ConfigError("method", "at least one method is required")
    if items - {"analytic", "numeric", "both"}:
        raise ConfigError("method", f"unknown methods {sorted(items - {'analytic', 'numeric', 'both'})}")
    if "both" in items or items == {"analytic", "numeric"}:
        return "both"
    return items.pop()
