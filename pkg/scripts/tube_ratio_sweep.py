#!/usr/bin/env python3
"""Brownian tube-probability ratios against the Dirichlet-energy prediction.

For a family of linear target paths φ(t) = a·t, estimates the ratio
P(sup|√κ·B − φ| < ε) / P(sup|√κ·B| < ε) by stage-wise splitting and
compares the smallest-ε value against exp(−E(φ)/κ).
"""
import argparse
import sys

import numpy as np

from looplab.brownian import brownian_om_check, path_energy


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--slopes", type=float, nargs="+",
                        default=[0.25, 0.5, 1.0])
    parser.add_argument("--kappa", type=float, default=1.0)
    parser.add_argument("--eps", type=float, nargs="+", default=[0.4, 0.3, 0.2])
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    t = np.linspace(0.0, 1.0, 1025)
    print(f"{'slope':>6} {'eps':>5} {'ratio':>9} {'predicted':>10} "
          f"{'rel.err':>8}")
    for slope in args.slopes:
        phi = slope * t
        predicted = float(np.exp(-path_energy(phi) / args.kappa))
        report = brownian_om_check(phi, kappa=args.kappa,
                                   eps_schedule=tuple(args.eps),
                                   sample_count=args.samples, seed=args.seed)
        for eps, ratio in zip(args.eps, report.details["ratios"]):
            rel = abs(ratio - predicted) / predicted
            print(f"{slope:6.2f} {eps:5.2f} {ratio:9.5f} {predicted:10.5f} "
                  f"{rel:8.2%}")
        print(f"       -> {report.summary()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
