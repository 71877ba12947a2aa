"""How far the weak-drive formula is from the Lindblad steady state as the drive grows.

The gap should scale like drive_amp^2 (saturation), so gap / drive_amp^2 stays flat.
    python3 scripts/cross_check.py --points 41
"""
import argparse

from ringcavity.analysis import compare_paths, default_grid
from ringcavity.model import PhysicalParams


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--delta", type=float, default=0.0)
    args = ap.parse_args()

    base = PhysicalParams.operating_point().replace(delta=args.delta)
    grid = default_grid(base.g, args.points)
    print(f"{'drive/gamma':>12} {'max rel gap':>12} {'gap/(drive/gamma)^2':>20} {'worst at (g)':>13}")
    for frac in (0.01, 0.03, 0.1, 0.3):
        p = base.replace(drive_amp=frac * base.gamma)
        cmp = compare_paths(p, grid, n_max=args.n_max)
        worst = cmp.worst_detuning_plus if cmp.max_rel_error_plus >= cmp.max_rel_error_minus else cmp.worst_detuning_minus
        print(f"{frac:12.2f} {cmp.max_rel_error:12.4g} {cmp.max_rel_error / frac**2:20.4g} {worst / p.g:+13.3f}")


if __name__ == "__main__":
    main()
