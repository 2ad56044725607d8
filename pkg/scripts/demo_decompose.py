"""Decompose a seeded random matrix and print the diagnostics and ordering.

Usage: python3 scripts/demo_decompose.py [--n 8] [--seed 0] [--kind ginibre]
"""
import argparse

import numpy as np

from specnest import EnsembleSpec, Ginibre, UpperTriangularRandom, decompose, generate


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--kind", choices=["ginibre", "upper-triangular"],
                        default="ginibre")
    args = parser.parse_args()

    kind = Ginibre(args.n) if args.kind == "ginibre" else UpperTriangularRandom(args.n)
    [T] = generate(EnsembleSpec(kind, seed=args.seed))
    result = decompose(T)

    print(f"{args.kind} {args.n}x{args.n}, seed {args.seed}")
    print("curve ordering of the eigenvalue clusters:")
    for t, mult, z in result.ordering:
        print(f"  t={t:.6f}  multiplicity={mult}  value={z.real:+.4f}{z.imag:+.4f}i")
    print("diagnostics:")
    for name, value in sorted(result.diagnostics.items()):
        print(f"  {name}: {value:.3e}")
    print(f"||N|| = {np.linalg.norm(result.N, 2):.4f}, "
          f"||Q|| = {np.linalg.norm(result.Q, 2):.4f}")


if __name__ == "__main__":
    main()
