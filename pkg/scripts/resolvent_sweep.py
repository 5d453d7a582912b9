"""Resolvent norm along the imaginary axis for each theta, with the N vs 2N check.

    python scripts/resolvent_sweep.py --modes 256 --lmax 1e3 --points 61
"""
import argparse
import math
import warnings

from platenet import SystemParameters, interval_spectrum
from platenet.resolvent import TruncationWarning, geometric_grid, truncation_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--thetas", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
    ap.add_argument("--modes", type=int, default=256)
    ap.add_argument("--lmin", type=float, default=1.0)
    ap.add_argument("--lmax", type=float, default=1e3)
    ap.add_argument("--points", type=int, default=61)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    grid = geometric_grid(args.lmin, args.lmax, args.points)
    print("theta,N,sup_norm,sup_norm_2N,pointwise_compared,pointwise_max_rel_diff,uncovered,"
          "max_lambda_times_norm")
    for theta in args.thetas:
        p = SystemParameters(theta=theta)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            check, coarse, _ = truncation_check(p, interval_spectrum(math.pi, args.modes), grid,
                                                workers=args.threads)
        scaled = max(s.lam * s.global_norm for s in coarse)
        print(f"{theta:g},{args.modes},{check.sweep_max:.10g},{check.sweep_max_doubled:.10g},"
              f"{check.compared},{check.max_rel_diff:.3e},{check.uncovered},{scaled:.10g}")


if __name__ == "__main__":
    main()
