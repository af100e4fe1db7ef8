"""Record L^p lower bounds of f(A) against the sector angle theta.

For each p and each theta above the threshold pi|1/p - 1/2| the script
writes ``||f(A)||_{p->p}`` lower bounds, ``sup_{Sigma_theta} |f|`` and their
ratio. The ratio is expected to grow as theta approaches the threshold; it is
recorded as data only.
"""

import argparse
import csv
import math
import sys

import numpy as np

from markovdil.hcalc import GeneratorData, calculus_norm_estimate, rational_bump
from markovdil.symbols import SymbolFunction, builtin_psi


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--psi", default="z8-circle")
    ap.add_argument("--p", type=float, nargs="+", default=[1.25, 1.5, 3.0, 4.0])
    ap.add_argument("--a", type=float, default=1.0, help="exponent of z^a/(1+z)^{2a}")
    ap.add_argument("--steps", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--method", choices=["random", "ascent"], default="ascent")
    args = ap.parse_args()

    psi = builtin_psi(args.psi)
    gen = GeneratorData(SymbolFunction(psi.group, psi.values.real, name=args.psi))
    f = rational_bump(args.a)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["psi", "function", "p", "threshold", "theta", "lower_bound", "hinf_norm", "ratio", "amp1", "amp2"])
    for p in args.p:
        thr = math.pi * abs(1 / p - 0.5)
        for theta in np.linspace(thr + 0.02, 0.95 * math.pi, args.steps):
            est = calculus_norm_estimate(f, gen, p, theta=float(theta), method=args.method, seed=args.seed)
            w.writerow([
                args.psi, f.name, p, f"{thr:.6f}", f"{theta:.6f}", f"{est.lower_bound:.10g}",
                f"{est.hinf_norm:.10g}", f"{est.ratio:.10g}",
                f"{est.amplification.get(1, float('nan')):.10g}", f"{est.amplification.get(2, float('nan')):.10g}",
            ])


if __name__ == "__main__":
    main()
