"""Coherence of a teleported single photon versus |beta| at fixed q.

Writes the sweep CSV and prints the features of the curve: the steep rise,
the measurement-induced peak and the slow approach to (1-q)|beta|.

    python scripts/fig2_curve.py --q 0.5 --out fig2.csv
"""
import argparse

import numpy as np

from cvteleport.analytic import coherence_peak
from cvteleport.experiments import RunConfig, fig2_sweep, write_sweep


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--q", type=float, default=0.5)
    parser.add_argument("--beta-max", type=float, default=10.0)
    parser.add_argument("--steps", type=int, default=601)
    parser.add_argument("--out", default="fig2.csv")
    args = parser.parse_args()

    records = fig2_sweep(RunConfig(q=args.q, beta_max=args.beta_max, steps=args.steps).validate())
    write_sweep(args.out, records)

    beta = np.array([r.beta_re for r in records])
    coh = np.array([r.coherence_re for r in records])
    induced = coh - np.array([r.asymptote_re for r in records])
    i = int(np.argmax(induced))
    print(f"q = {args.q}: {len(records)} points -> {args.out}")
    print(f"measurement-induced term peaks at |beta| = {beta[i]:.4f} with {induced[i]:.6f}")
    if args.q > 0:
        loc, height = coherence_peak(args.q)
        print(f"closed-form peak: |beta| = {loc:.4f}, height {height:.6f}")
    print(f"{'|beta|':>8} {'C':>10} {'(1-q)|beta|':>12} {'residual':>10}")
    for x in (0.0, 0.25, 0.5, 1.0, 2.0, 5.0, args.beta_max):
        j = int(np.argmin(np.abs(beta - x)))
        print(f"{beta[j]:8.3f} {coh[j]:10.6f} {coh[j] - induced[j]:12.6f} {induced[j]:10.6f}")


if __name__ == "__main__":
    main()
