"""Dirac discrepancy over seeded random polynomial pairs; histogram of the lowest hbar power."""
import argparse
from collections import Counter

from heisenlab.symbolic import dirac_check, random_pairs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--show", type=int, default=3, help="print this many example reports")
    args = ap.parse_args()
    hist = Counter()
    for i, (u, v) in enumerate(random_pairs(args.count, args.seed)):
        rep = dirac_check(u, v)
        hist[rep.min_hbar_power] += 1
        if i < args.show:
            print(f"u = {u.to_text()}\nv = {v.to_text()}\nD = {rep.discrepancy.to_text() or '0'}\n")
    for power, n in sorted(hist.items(), key=lambda kv: (kv[0] is None, kv[0] or 0)):
        print(f"min hbar power {power if power is not None else 'none (D = 0)'}: {n}")


if __name__ == "__main__":
    main()
