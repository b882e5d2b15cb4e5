"""Normalized a_n along a geometric grid for the four limit regimes.

Prints one CSV block per case; ratios tending to 1 show strong equivalence
with the limit constant.

    python3 scripts/convergence_tables.py --n-max 1e7 --per-decade 2
"""

import argparse
import math

from sobnum.constants import limit_constant
from sobnum.verify import convergence_trace, geometric_grid

CASES = [
    ("iso", "L2", 2.0, 2.0, 2),
    ("iso", "Linf", 1.0, 2.0, 1),
    ("iso", "Linf", 2.0, 2.0, 2),
    ("mix", "L2", 1.0, 1.0, 2),
    ("mix", "L2", 1.0, 2.0, 2),
    ("mix", "Linf", 1.0, 2.0, 2),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=float, default=100)
    ap.add_argument("--n-max", type=float, default=1e6)
    ap.add_argument("--per-decade", type=int, default=2)
    args = ap.parse_args()
    grid = geometric_grid(int(args.n_min), int(args.n_max), args.per_decade)
    for kind, target, s, r, d in CASES:
        spec = limit_constant(kind, target, s, r, d)
        r_txt = "inf" if math.isinf(r) else f"{r:g}"
        print(f"# {kind}:s={s:g},r={r_txt},d={d} -> {target}  constant={spec.constant:.6g}")
        print(convergence_trace(spec, grid).to_csv(), end="")
        print()


if __name__ == "__main__":
    main()
