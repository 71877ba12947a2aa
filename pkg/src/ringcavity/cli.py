"""Command-line front end: ``ringcavity {eigen,sweep,slope,validate}``.

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure,
3 validation-suite failure.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .analysis import SweepPointError, sensitivity_curve, sweep
from .config import OutputSection, RotationSection, RunConfig
from .errors import (
    ConfigError,
    DegenerateSteadyStateError,
    DomainError,
    SingularSystemError,
    StepSizeError,
    UnsupportedConfigurationError,
)
from .spectrum import eigen_numeric, eigen_resonant, ground_energy, SINGLE_EXCITATION_BASIS
from . import validate as validation

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VALIDATION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="YAML run configuration")
    parent.add_argument("--out", help="output file (default: stdout)")
    parent.add_argument("--format", choices=("csv", "structured"))
    parent.add_argument("--method", help="analytic, numeric or both")
    parent.add_argument("--n-max", type=int, help="photon cutoff per mode")
    parent.add_argument("--threads", type=int, help="worker threads for numeric sweeps")
    for flag in ("--g", "--gamma", "--drive-amp", "--delta", "--omega0", "--omega-atom"):
        parent.add_argument(flag, type=float)
    parent.add_argument(
        "--omega-drive-detuning-range",
        metavar="MIN,MAX[,POINTS]",
        help="sweep range of the drive detuning; write as --omega-drive-detuning-range=-3e-4,3e-4,401",
    )
    parent.add_argument("--inject-fault", choices=validation.FAULTS, help=argparse.SUPPRESS)
    return parent


def build_parser():
    parser = _Parser(prog="ringcavity", description="Two-mode JC model of an atom in a rotating ring cavity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    parent = _common()
    sub.add_parser("eigen", parents=[parent], help="ground and one-excitation levels")
    sub.add_parser("sweep", parents=[parent], help="steady photon numbers versus drive detuning")
    sub.add_parser("slope", parents=[parent], help="side-peak height versus rotation detuning")
    sub.add_parser("validate", parents=[parent], help="run the self-check suites")
    return parser


def _parse_range(text):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) not in (2, 3):
        raise ConfigError("--omega-drive-detuning-range", "expected MIN,MAX or MIN,MAX,POINTS")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        points = int(parts[2]) if len(parts) == 3 else None
    except ValueError:
        raise ConfigError("--omega-drive-detuning-range", f"cannot parse {text!r}") from None
    return lo, hi, points


def resolve_config(args):
    """Defaults, then the --config file, then individual flags."""
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    physical = {}
    for name in ("g", "gamma", "drive_amp", "omega0", "omega_atom"):
        value = getattr(args, name)
        if value is not None:
            physical[name] = value
    changes = {}
    if physical:
        changes["physical"] = cfg.physical.__class__(**{**cfg.physical.__dict__, **physical})
    if args.delta is not None:
        changes["rotation"] = RotationSection(delta=args.delta, c=cfg.rotation.c)
    if args.method is not None:
        if not args.method.strip():
            raise ConfigError("--method", "at least one method is required")
        changes["method"] = args.method
    if args.n_max is not None:
        changes["n_max"] = args.n_max
    if args.threads is not None:
        changes["threads"] = args.threads
    if args.out is not None or args.format is not None:
        out = cfg.output
        changes["output"] = out.__class__(
            path=args.out if args.out is not None else out.path,
            format=args.format if args.format is not None else out.format,
        )
    if args.omega_drive_detuning_range is not None:
        lo, hi, points = _parse_range(args.omega_drive_detuning_range)
        changes["sweep"] = cfg.sweep.__class__(
            detuning_min=lo, detuning_max=hi, points=points if points is not None else cfg.sweep.points
        )
    return cfg.replace(**changes) if changes else cfg


def _fmt(x):
    x = float(x) + 0.0  # no negative zeros in output
    return "nan" if math.isnan(x) else repr(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return None if math.isnan(x) else float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _recorded(cfg):
    # the destination is not part of the run; leaving it out keeps files byte-identical
    return cfg.replace(output=OutputSection(format=cfg.output.format))


def _header(command, cfg):
    lines = [f"# ringcavity {__version__} {command}", "# resolved config:"]
    lines += [f"#   {line}" for line in _recorded(cfg).dump().splitlines()]
    return lines


def _emit(text, cfg):
    if cfg.output.path:
        with open(cfg.output.path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(command, cfg, columns, rows, meta_lines, structured):
    if cfg.output.format == "structured":
        doc = {"command": command, "version": __version__, "config": _recorded(cfg).to_dict(), **structured}
        return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for line in _header(command, cfg):
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")
    for line in meta_lines:
        buf.write(line + "\n")
    return buf.getvalue()


def cmd_eigen(cfg: RunConfig):
    p = cfg.params()
    if p.is_resonant and p.g > 0:
        eig = eigen_resonant(p)
    else:
        print("notice: closed form needs omega_atom == omega0 and g > 0; using numeric diagonalization",
              file=sys.stderr)
        eig = eigen_numeric(p)
    scalars = [
        ("E_G", ground_energy(p)),
        ("E_minus", eig.e_minus),
        ("E_zero", eig.e_zero),
        ("E_plus", eig.e_plus),
        ("delta_g", eig.delta_g),
    ]
    rows = [(name, _fmt(v)) for name, v in scalars] + [("method", eig.method)]
    labels = ("minus", "zero", "plus")
    basis = ["|%s,%d,%d>" % b for b in SINGLE_EXCITATION_BASIS]
    for j, level in enumerate(labels):
        for i, b in enumerate(basis):
            rows.append((f"amplitude_{level}_{b}", _fmt(eig.states[i, j])))
    structured = {
        "method": eig.method,
        "levels": dict(scalars),
        "basis": basis,
        "states": {level: eig.states[:, j] for j, level in enumerate(labels)},
    }
    _emit(_render("eigen", cfg, ("quantity", "value"), rows, [], structured), cfg)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig):
    p = cfg.params()
    grid = cfg.grid()
    result = sweep(p, grid, cfg.method, n_max=cfg.n_max, threads=cfg.threads, strict=False)
    methods = result.methods
    columns, data = ["omega_drive_detuning"], [grid]
    for method in methods:
        for mode in ("plus", "minus"):
            columns.append(f"n_{mode}_{method}")
            data.append(result.curve(mode, method))
    current_from = "numeric" if "numeric" in methods else "analytic"
    cur_plus, cur_minus = result.currents(current_from)
    columns += ["current_plus", "current_minus"]
    data += [cur_plus, cur_minus]
    rows = list(zip(*data))

    meta = [f"# currents: gamma * n from the {current_from} path", "# peaks: method,mode,position,height,grid_index"]
    meta += [f"# peak,{pk.method},{pk.mode},{_fmt(pk.position)},{_fmt(pk.height)},{pk.index}" for pk in result.peaks]
    if result.failures:
        meta.append("# failures: grid_index,detuning,error")
        meta += [f"# failure,{i},{_fmt(d)},{msg}" for i, d, msg in result.failures]
    structured = {
        "columns": {name: col for name, col in zip(columns, data)},
        "current_source": current_from,
        "peaks": [pk.__dict__ for pk in result.peaks],
        "failures": [dict(index=i, detuning=d, error=msg) for i, d, msg in result.failures],
    }
    _emit(_render("sweep", cfg, columns, rows, meta, structured), cfg)
    if result.failures:
        print(f"error: {len(result.failures)} sweep point(s) failed, first at index {result.failures[0][0]}",
              file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_slope(cfg: RunConfig):
    p = cfg.params()
    if not p.is_resonant:
        raise UnsupportedConfigurationError("the slope protocol needs omega_atom == omega0")
    methods = ("analytic", "numeric") if cfg.method == "both" else (cfg.method,)
    grid = cfg.delta_grid()
    curves = {
        m: sensitivity_curve(p, grid, method=m, n_max=cfg.n_max, fit_points=cfg.slope.fit_points) for m in methods
    }
    first = curves[methods[0]]
    columns = ["delta"] + [f"height_{m}" for m in methods]
    rows = list(zip(grid, *(curves[m].heights for m in methods)))
    meta = [f"# closed_form_slope,{_fmt(first.closed_form_slope)}",
            f"# weak_drive_slope,{_fmt(first.weak_drive_slope)}"]
    for m, c in curves.items():
        meta += [
            f"# fitted_slope,{m},{_fmt(c.fitted_slope)}",
            f"# relative_difference,{m},{_fmt(c.relative_difference)}",
            f"# fit_residual,{m},{_fmt(c.fit_residual)}",
            f"# fit_window,{m},{_fmt(c.fit_window[0])},{_fmt(c.fit_window[1])}",
        ]
    structured = {
        "closed_form_slope": first.closed_form_slope,
        "weak_drive_slope": first.weak_drive_slope,
        "delta": grid,
        "curves": {
            m: dict(heights=c.heights, fitted_slope=c.fitted_slope, relative_difference=c.relative_difference,
                    fit_residual=c.fit_residual, fit_window=c.fit_window)
            for m, c in curves.items()
        },
    }
    _emit(_render("slope", cfg, columns, rows, meta, structured), cfg)
    return EXIT_OK


def cmd_validate(cfg: RunConfig, fault=None):
    results = validation.run_all(cfg.params(), n_max=cfg.n_max, fault=fault)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: worst {r.worst:.3e} (tol {r.tolerance:.0e}); {r.detail}",
              file=sys.stderr)
    rows = [(r.name, str(r.passed).lower(), _fmt(r.worst), _fmt(r.tolerance), r.detail.replace(",", ";"))
            for r in results]
    structured = {"suites": [dict(name=r.name, passed=r.passed, worst=r.worst, tolerance=r.tolerance,
                                  detail=r.detail) for r in results]}
    _emit(_render("validate", cfg, ("suite", "passed", "worst", "tolerance", "detail"), rows, [], structured), cfg)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"error: validation failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {"eigen": cmd_eigen, "sweep": cmd_sweep, "slope": cmd_slope, "validate": cmd_validate}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "validate":
            return cmd_validate(cfg, fault=args.inject_fault)
        return COMMANDS[args.command](cfg)
    except (ConfigError, UnsupportedConfigurationError, DomainError) as exc:
        print(f"ringcavity {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SweepPointError, DegenerateSteadyStateError, SingularSystemError, StepSizeError) as exc:
        print(f"ringcavity {args.command}: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"ringcavity {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
