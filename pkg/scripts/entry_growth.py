#!/usr/bin/env python3
"""Entry-size growth and margin decay of exact scaling iterates.

A rational matrix whose limit is irrational never terminates: its
iterates' numerators and denominators keep growing while the margins
shrink. This prints bit sizes and margin errors side by side so the
empirical convergence rate (error ratio per step) can be read off or
piped into a plotting tool.

Usage:
    python scripts/entry_growth.py [--steps N] [MATRIX ...]

MATRIX uses the inline CLI syntax ('1,3;3,4', rationals as 'p/q').
"""

import argparse

from sinkhornlab import IterationConfig, sinkhorn
from sinkhornlab.cli import read_matrix

DEFAULT_MATRICES = ["1,3;3,4", "1,2;3,4", "2,3;4,9"]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("matrices", nargs="*", default=DEFAULT_MATRICES)
    parser.add_argument("--steps", type=int, default=24)
    args = parser.parse_args()

    for text in args.matrices:
        A = read_matrix(text, exact=True)
        res = sinkhorn(A, IterationConfig(max_steps=args.steps))
        print(f"# matrix {text}  (status: {res.status.value})")
        print(f"{'step':>4}  {'bits':>5}  {'max margin err':>22}  {'err ratio':>10}")
        prev = None
        for rec in res.trace:
            err = max(rec.max_row_err, rec.max_col_err)
            ratio = float(err / prev) if prev not in (None, 0) else float("nan")
            print(f"{rec.step:>4}  {rec.max_entry_bits:>5}  {float(err):>22.16e}  {ratio:>10.6f}")
            prev = err
        print()


if __name__ == "__main__":
    main()
