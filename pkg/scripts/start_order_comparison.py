#!/usr/bin/env python3
"""Termination lengths under both start orders, tabulated exhaustively.

Enumerates every positive 2x2 matrix whose entries are reduced rationals
with numerator and denominator up to a bound, classifies it starting
with row scaling (N1) and with column scaling (N2), and tabulates the
(N1, N2) pairs. The largest observed |N1 - N2| over matrices that
terminate both ways is reported at the end.

Usage:
    python scripts/start_order_comparison.py [--bound B]
"""

import argparse
import itertools
from collections import Counter
from fractions import Fraction
from math import gcd

from sinkhornlab import PositiveMatrix, classify_both_orders


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bound", type=int, default=4, help="max numerator/denominator")
    args = parser.parse_args()

    values = [
        Fraction(p, q)
        for p in range(1, args.bound + 1)
        for q in range(1, args.bound + 1)
        if gcd(p, q) == 1
    ]
    pairs: Counter = Counter()
    worst = 0
    total = 0
    for a, b, c, d in itertools.product(values, repeat=4):
        comparison = classify_both_orders(PositiveMatrix(((a, b), (c, d))))
        n1 = comparison.row_first.length
        n2 = comparison.column_first.length
        pairs[(n1, n2)] += 1
        if comparison.step_difference is not None:
            worst = max(worst, comparison.step_difference)
        total += 1

    print(f"{total} matrices with entries over {len(values)} reduced rationals (bound {args.bound})")
    print(f"{'N1 (row first)':>15}  {'N2 (col first)':>15}  {'count':>8}")

    def fmt(x):
        return "inf" if x is None else str(x)

    def order(kv):
        (n1, n2), _ = kv
        big = 10**6
        return (big if n1 is None else n1, big if n2 is None else n2)

    for (n1, n2), count in sorted(pairs.items(), key=order):
        print(f"{fmt(n1):>15}  {fmt(n2):>15}  {count:>8}")
    print(f"max |N1 - N2| over doubly finite matrices: {worst}")


if __name__ == "__main__":
    main()
