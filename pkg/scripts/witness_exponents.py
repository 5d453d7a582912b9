"""Fitted growth exponents of the witness sequences as the truncation grows.

    python scripts/witness_exponents.py --thetas 0 0.5 0.9 1 --modes 200 1024 4096
"""
import argparse
import math

from platenet import SystemParameters, interval_spectrum, witness_sequence


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--thetas", type=float, nargs="+", default=[0.0, 0.5, 0.9, 1.0])
    ap.add_argument("--modes", type=int, nargs="+", default=[200, 1024, 4096])
    ap.add_argument("--fit-decades", type=float, default=2.0)
    args = ap.parse_args()

    print("theta,N,branch,coeff_exp,coeff_r2,amplified_exp,unit_forcing_exp,max_closed_form_err")
    for theta in args.thetas:
        for n in args.modes:
            rep = witness_sequence(SystemParameters(), interval_spectrum(math.pi, n), theta, args.fit_decades)
            s = rep.summary()
            print(
                f"{theta:g},{n},{rep.branch},{rep.coefficient_fit.exponent:.6f},"
                f"{rep.coefficient_fit.r_squared:.6f},{rep.amplified_fit.exponent:.6f},"
                f"{rep.unit_forcing_fit.exponent:.6f},{s['max_closed_form_error']:.3e}"
            )


if __name__ == "__main__":
    main()
