"""Certify every explicit bound on its reference families and write JSON reports.

    python3 scripts/certify_all.py --out reports/ --threads 4
"""

import argparse
import json
from pathlib import Path

from sobnum.constants import explicit_bound
from sobnum.verify import certify
from sobnum.weights import WeightFamily

RUNS = [
    ("prop2-upper", "iso:s=1,r=2,d=1", 15, None),
    ("prop2-lower", "iso:s=1,r=2,d=1", 19, None),
    ("prop2-upper", "iso:s=1,r=2,d=2", 221, None),
    ("prop2-lower", "iso:s=1,r=2,d=2", 298, None),
    ("cor1-upper", "iso:s=1,r=2,d=1", 15, None),
    ("cor1-upper", "iso:s=2,r=2,d=2", 221, None),
    ("cor1-lower", "iso:s=1,r=2,d=1", 19, None),
    ("cor1-lower-substituted", "iso:s=1,r=2,d=1", 19, None),
    ("cor12-upper", "mix:s=1,r=2,d=1", 28, None),
    ("cor12-lower", "mix:s=1,r=2,d=1", 89, None),
    ("cor12-upper", "mix:s=1,r=2,d=2", 729, None),
    ("cor12-lower", "mix:s=1,r=2,d=2", 7790, None),
    ("cor12b-upper", "iso:s=1,r=2,d=1", 15, 4.0),
    ("cor12b-upper", "iso:s=1,r=2,d=1", 15, 8.0),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=10_000)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path, default=None, help="directory for per-run JSON reports")
    args = ap.parse_args()
    failed = 0
    for name, fam_txt, n_min, p in RUNS:
        fam = WeightFamily.parse(fam_txt)
        cert = explicit_bound(name, fam.d, fam.s, p=p)
        rep = certify(cert, fam, (n_min, max(n_min, args.n_max)), threads=args.threads)
        failed += not rep.passed
        tag = f"{name}{'' if p is None else f'-p{p:g}'}"
        print(
            f"{'PASS' if rep.passed else 'FAIL'} {tag:28s} {fam_txt:18s} checked={rep.checked_points:5d} "
            f"skipped={len(rep.skipped):4d} min_margin={rep.min_margin:.4g}"
        )
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"{tag}_{fam_txt.replace(':', '_').replace(',', '_')}.json").write_text(json.dumps(rep.to_dict(), indent=1))
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
