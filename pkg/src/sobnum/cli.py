"""Command-line front end: ``sobnum <subcommand> FAMILY [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

from . import constants as C
from .approx import SUP_TARGETS, TargetSpace, approx_number
from .counting import DEFAULT_BUDGET, BudgetExceeded, count_leq
from .tails import DEFAULT_WIDTH, sigma, tail
from .verify import certify, convergence_trace, geometric_grid
from .weights import ISO, NotEmbeddedError, WeightFamily, check_summability

FORMATS = ("csv", "json", "plain")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    family: str
    n: str | None = None
    target: str | None = None
    q: float | None = None
    p: float | None = None
    t: float | None = None
    bound: str | None = None
    format: str = "plain"
    width: float = DEFAULT_WIDTH
    budget: int = DEFAULT_BUDGET
    threads: int = 1
    cache_dir: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        keys = cls.__dataclass_fields__.keys()
        vals = {k: getattr(ns, k) for k in keys if hasattr(ns, k)}
        vals["cache_dir"] = os.environ.get("SOBNUM_CACHE_DIR")
        return cls(**vals)


def parse_n_range(text: str) -> list[int]:
    """``n``, ``a:b`` (inclusive) or ``a:b:geometric=P``."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            pts = [int(parts[0])]
        elif len(parts) == 2:
            a, b = int(parts[0]), int(parts[1])
            if b < a:
                raise UsageError(f"empty range {text!r}")
            pts = list(range(a, b + 1))
        elif len(parts) == 3:
            key, _, per = parts[2].partition("=")
            if key != "geometric":
                raise UsageError(f"bad range option {parts[2]!r}")
            pts = geometric_grid(int(parts[0]), int(parts[1]), int(per))
        else:
            raise UsageError(f"bad n range {text!r}")
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad n range {text!r}") from None
    if pts[0] < 1:
        raise UsageError("n must be >= 1")
    return pts


def _range_bounds(text: str):
    parts = text.split(":")
    if len(parts) < 2:
        raise UsageError("certify needs a range a:b")
    pts = parse_n_range(text)
    sampling = "auto"
    if len(parts) == 3:
        sampling = ("geometric", int(parts[2].partition("=")[2]))
    return (pts[0], int(parts[1])), sampling


def _f(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _emit(fmt: str, header: list[str], rows: list[list], records=None) -> str:
    if fmt == "json":
        recs = records if records is not None else [dict(zip(header, r)) for r in rows]
        obj = recs[0] if len(recs) == 1 else recs
        return json.dumps(obj) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([_f(x) for x in r])
        return buf.getvalue()
    return "".join(" ".join(_f(x) for x in r) + "\n" for r in rows)


def _warn_unconverged(enc, n) -> None:
    if getattr(enc, "converged", True) is False:
        print(f"warning: n={n}: width {enc.width:.3g} above target within budget", file=sys.stderr)


# ------------------------------------------------------------ commands


def cmd_sigma(cfg: RunConfig) -> tuple[str, int]:
    fam = WeightFamily.parse(cfg.family)
    rows = []
    for n in parse_n_range(cfg.n):
        sv = sigma(fam, n, cfg.budget)
        rows.append([n, sv.value, sv.level])
    return _emit(cfg.format, ["n", "sigma", "level"], rows), 0


def cmd_an(cfg: RunConfig) -> tuple[str, int]:
    fam = WeightFamily.parse(cfg.family)
    target = TargetSpace.parse(cfg.target or "l2")
    rows, plain = [], []
    for n in parse_n_range(cfg.n):
        res = approx_number(fam, n, target, cfg.width, cfg.budget)
        _warn_unconverged(res.enclosure, n)
        rows.append([n, res.enclosure.lo, res.enclosure.hi, res.exact])
        # one-sided results are never shown as a value
        plain.append([n, res.enclosure.lo, res.enclosure.hi] if res.exact else [n, "<=", res.enclosure.hi])
    if cfg.format == "plain":
        return _emit("plain", [], plain), 0
    return _emit(cfg.format, ["n", "lo", "hi", "exact"], rows), 0


def cmd_count(cfg: RunConfig) -> tuple[str, int]:
    fam = WeightFamily.parse(cfg.family)
    if cfg.t is None:
        raise UsageError("count needs --t")
    N = count_leq(fam, cfg.t, cfg.budget)
    if cfg.format == "plain":
        return f"{N}\n", 0
    return _emit(cfg.format, ["t", "count"], [[cfg.t, N]]), 0


def cmd_tail(cfg: RunConfig) -> tuple[str, int]:
    fam = WeightFamily.parse(cfg.family)
    q = 2.0 if cfg.q is None else cfg.q
    rows = []
    for n in parse_n_range(cfg.n):
        if not check_summability(fam, q):
            raise NotEmbeddedError(f"sum of w(k)^-{q:g} diverges for {fam}")
        e = tail(fam, n, q, width=cfg.width, budget=cfg.budget)
        _warn_unconverged(e, n)
        rows.append([n, e.lo, e.hi, e.width, e.cutoff, e.converged])
    return _emit(cfg.format, ["n", "lo", "hi", "width", "cutoff", "converged"], rows), 0


def cmd_limit(cfg: RunConfig) -> tuple[str, int]:
    fam = WeightFamily.parse(cfg.family)
    target = TargetSpace.parse(cfg.target or "l2")
    tag = C.L2 if target.tag == "L2" else C.LINF if target.tag in SUP_TARGETS else None
    if tag is None:
        raise UsageError(f"no limit constant for target {target}")
    spec = C.limit_constant(fam.kind, tag, fam.s, fam.r, fam.d)
    grid = parse_n_range(cfg.n or "2:1000000:geometric=4")
    trace = convergence_trace(spec, grid, cfg.width, cfg.budget)
    if cfg.format == "json":
        recs = [{"n": n, "ratio": x, "ratio_lo": lo, "ratio_hi": hi} for (n, x), (lo, hi) in zip(trace.ratios, trace.bounds)]
        return json.dumps({"limit": spec.to_dict(), "ratios": recs}) + "\n", 0
    return trace.to_csv(), 0


def cmd_certify(cfg: RunConfig) -> tuple[str, int]:
    fam = WeightFamily.parse(cfg.family)
    if cfg.bound not in C.BOUND_NAMES:
        raise UsageError(f"unknown bound {cfg.bound!r}; choose from {', '.join(C.BOUND_NAMES)}")
    cert = C.explicit_bound(cfg.bound, fam.d, fam.s, p=cfg.p)
    n_range, sampling = _range_bounds(cfg.n or "")
    rep = certify(cert, fam, n_range, sampling, cfg.width, cfg.budget, cfg.threads)
    if rep.checked_points == 0:
        print(f"warning: all {len(rep.skipped)} points lie below the threshold {cert.first_n}", file=sys.stderr)
    code = 0 if rep.passed else 1
    if cfg.format == "json":
        return json.dumps(rep.to_dict()) + "\n", code
    if cfg.format == "csv":
        return rep.to_csv(), code
    verdict = "PASS" if rep.passed else "FAIL"
    mm = _f(rep.min_margin) if math.isfinite(rep.min_margin) else "n/a"
    return (
        f"{verdict} {cert.name} {fam} n={n_range[0]}:{n_range[1]} checked={rep.checked_points} "
        f"skipped={len(rep.skipped)} failures={len(rep.failures)} min_margin={mm}\n"
    ), code


def cmd_constants(cfg: RunConfig) -> tuple[str, int]:
    fam = WeightFamily.parse(cfg.family)
    out = {"family": str(fam), "volume_ball": None, "limits": [], "bounds": []}
    if not math.isinf(fam.r) or fam.kind == ISO:
        out["volume_ball"] = C.volume_ball(fam.d, fam.r)
    for tag in (C.L2, C.LINF):
        try:
            out["limits"].append(C.limit_constant(fam.kind, tag, fam.s, fam.r, fam.d).to_dict())
        except ValueError:
            pass
    if fam.r == 2:
        for name in C.BOUND_NAMES:
            try:
                cert = C.explicit_bound(name, fam.d, fam.s, p=cfg.p if name == "cor12b-upper" else None)
            except ValueError:
                continue
            if cert.family_kind == fam.kind:
                out["bounds"].append(cert.to_dict())
    return json.dumps(out) + "\n", 0


COMMANDS = {
    "sigma": cmd_sigma,
    "an": cmd_an,
    "count": cmd_count,
    "tail": cmd_tail,
    "limit": cmd_limit,
    "certify": cmd_certify,
    "constants": cmd_constants,
}


# -------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="plain")
    common.add_argument("--width", type=float, default=DEFAULT_WIDTH, help="target relative enclosure width")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration step budget")
    common.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")

    ap = argparse.ArgumentParser(prog="sobnum", description="Approximation numbers of periodic Sobolev embeddings.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("family", help="iso:s=<s>,r=<r|inf>,d=<d> or mix:...")
        return p

    add("sigma", "rearranged values sigma_n").add_argument("--n", required=True)
    p = add("an", "approximation numbers a_n")
    p.add_argument("--n", required=True)
    p.add_argument("--target", default="l2", help="l2, linf, c, wiener, b0inf1, dual-measures, dual-b, lp:<p>")
    add("count", "lattice count N(t) = #{k : w(k) <= t}").add_argument("--t", type=float, required=True)
    p = add("tail", "l_q tail of sigma")
    p.add_argument("--n", required=True)
    p.add_argument("--q", type=float, default=2.0)
    p = add("limit", "convergence of normalized a_n to the limit constant")
    p.add_argument("--target", default="l2")
    p.add_argument("--n", default=None, help="grid, default 2:1000000:geometric=4")
    p = sub.add_parser("certify", parents=[common], help="check an explicit bound over an n range")
    p.add_argument("bound", help=", ".join(C.BOUND_NAMES))
    p.add_argument("family")
    p.add_argument("--n", required=True, help="a:b or a:b:geometric=<points per decade>")
    p.add_argument("--p", type=float, default=None, help="L_p exponent for cor12b-upper")
    p = add("constants", "limit constants and explicit bounds as JSON")
    p.add_argument("--p", type=float, default=4.0)
    return ap


def run(argv=None) -> tuple[str, int]:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(ns)
    if cfg.threads < 1 or cfg.budget < 1 or not cfg.width > 0:
        raise UsageError("--threads and --budget must be >= 1 and --width > 0")
    return COMMANDS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        out, code = run(argv)
    except (ValueError, BudgetExceeded) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"sobnum: error: {msg}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
