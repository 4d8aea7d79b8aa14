"""Monte Carlo statistics of the output field over sampled measurement outcomes."""
import argparse

from cvteleport.channel import TeleportParams
from cvteleport.fock import basis_state
from cvteleport.sampling import coherence_statistics, sample_outcomes


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--count", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    print(f"{'q':>5} {'accept':>7} {'|E C|':>8} {'E|C|':>8} {'Var C':>8} {'<n>':>7} {'F':>7}")
    for q in (0.0, 0.25, 0.5, 0.75, 0.9):
        p = TeleportParams(q)
        batch = sample_outcomes(p, basis_state(1), args.count, args.seed)
        s = coherence_statistics(p, basis_state(1), batch)
        print(
            f"{q:5.2f} {batch.acceptance_rate:7.3f} {abs(s.mean):8.4f} {s.mean_abs:8.4f} "
            f"{s.variance:8.4f} {s.mean_photon_number:7.3f} {s.mean_fidelity:7.3f}"
        )


if __name__ == "__main__":
    main()
