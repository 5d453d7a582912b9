"""Spectral abscissa and attaining mode over a theta grid, for several truncations.

    python scripts/abscissa_vs_theta.py --modes 64 256 1024 --thetas 0 0.25 0.5 0.75 1
"""
import argparse
import math

import numpy as np

from platenet import SystemParameters, interval_spectrum, spectral_abscissa
from platenet.modal import batch_eigenvalues


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--thetas", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
    args = ap.parse_args()

    print("theta,N,abscissa,mode,last_mode_re")
    for theta in args.thetas:
        p = SystemParameters(theta=theta)
        for n in args.modes:
            spec = interval_spectrum(math.pi, n)
            a, mode = spectral_abscissa(p, spec)
            # decay rate of the last mode shows how theta shapes the high-frequency part
            last = batch_eigenvalues(p, spec.sigmas[-1:])[0].real.max()
            print(f"{theta:g},{n},{a:.12g},{mode},{last:.12g}")


if __name__ == "__main__":
    main()
