"""Height of n+ at the +sqrt(2) g probe against rotation detuning.

Compares the fitted slope with the closed form and the exact weak-drive derivative,
then repeats for a few cavity decay rates.
    python3 scripts/sensitivity.py [--numeric]
"""
import argparse

from ringcavity.analysis import sensitivity_curve
from ringcavity.model import PhysicalParams


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--numeric", action="store_true")
    ap.add_argument("--n-max", type=int, default=5)
    args = ap.parse_args()
    method = "numeric" if args.numeric else "analytic"

    base = PhysicalParams.operating_point()
    curve = sensitivity_curve(base, method=method, n_max=args.n_max)
    print("delta,height")
    for d, h in zip(curve.delta_grid, curve.heights):
        print(f"{d:.3e},{h:.10e}")
    print()
    print(f"{'gamma/g':>8} {'closed form':>14} {'weak drive':>14} {'fitted':>14}")
    for ratio in (0.25, 0.5, 1.0, 2.0):
        p = base.replace(gamma=ratio * base.g)
        c = curve if ratio == 0.5 else sensitivity_curve(p, method=method, n_max=args.n_max)
        print(f"{ratio:8.2f} {c.closed_form_slope:14.6g} {c.weak_drive_slope:14.6g} {c.fitted_slope:14.6g}")


if __name__ == "__main__":
    main()
