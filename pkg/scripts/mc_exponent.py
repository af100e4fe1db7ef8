"""Monte Carlo study of E exp(i sqrt(2) t W(b)) with ||b|| = 1.

Compares the estimate with exp(-t^2) (standard characteristic function) and
exp(-t) (the alternative exponent) over a grid of t, reporting z-scores.
"""

import argparse
import math

import numpy as np

from markovdil.gaussalg import GaussExp, GaussianSampler, mc_expectation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--t", type=float, nargs="+", default=[0.25, 0.5, 1.0, 1.5, 2.0])
    args = ap.parse_args()

    b = np.array([1.0])
    print(f"{'t':>5} {'estimate':>10} {'stderr':>9} {'exp(-t^2)':>10} {'z':>7} {'exp(-t)':>9} {'z_alt':>8}")
    for k, t in enumerate(args.t):
        est = mc_expectation(GaussExp.exp(math.sqrt(2) * t * b), GaussianSampler(1, args.n, seed=args.seed + k))
        std, alt = math.exp(-t * t), math.exp(-t)
        z = abs(est.estimate - std) / est.stderr
        za = abs(est.estimate - alt) / est.stderr
        print(f"{t:5.2f} {est.estimate.real:10.6f} {est.stderr:9.2e} {std:10.6f} {z:7.2f} {alt:9.6f} {za:8.1f}")


if __name__ == "__main__":
    main()
