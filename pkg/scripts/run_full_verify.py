"""Run the full acceptance battery and write the summary JSON.

Usage: python3 scripts/run_full_verify.py [--seed 7] [--out artifacts/]
"""
import argparse
import sys

from specnest import acceptance


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default=None, help="directory for acceptance.json")
    args = parser.parse_args()

    results = acceptance.run_all(seed=args.seed, out_dir=args.out)
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name} ({r.seconds:.1f}s)")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
