"""Brute-force oracles, certification of explicit bounds, convergence traces."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import L2, LINF, LOWER, BoundCertificate, LimitSpec
from .counting import DEFAULT_BUDGET, BudgetExceeded
from .tails import DEFAULT_WIDTH, sigma, tail
from .weights import ISO, WeightFamily

EXHAUSTIVE_BELOW = 1024
PER_DECADE = 64


# ----------------------------------------------------------- brute force


def _direct_weights(family: WeightFamily, pts: np.ndarray) -> np.ndarray:
    """w(k) straight from the defining formula; pts has shape (m, d)."""
    a = np.abs(pts).astype(np.float64)
    s, r = family.s, family.r
    if family.kind == ISO:
        if math.isinf(r):
            return np.maximum(a.max(axis=1), 1.0) ** s
        return (1.0 + (a**r).sum(axis=1)) ** (s / r)
    if math.isinf(r):
        return np.maximum(a, 1.0).prod(axis=1) ** s
    return (1.0 + a**r).prod(axis=1) ** (s / r)


def _outside_weight(family: WeightFamily, K: int) -> float:
    """Smallest weight of any point with |k|_inf = K + 1."""
    e = np.zeros((1, family.d), dtype=np.int64)
    e[0, 0] = K + 1
    return float(_direct_weights(family, e)[0])


def brute_sigma(family: WeightFamily, n_max: int, max_points: int = 400_000_000) -> list[float]:
    """First n_max values of the rearrangement by enumerating a box and sorting.

    The box radius doubles until the points strictly lighter than every point
    outside the box number at least n_max.
    """
    d = family.d
    K = 2
    while True:
        if (2 * K + 1) ** d > max_points:
            raise BudgetExceeded(f"brute force for n_max={n_max} needs a box larger than {max_points} points")
        w_out = _outside_weight(family, K)
        ax = np.arange(-K, K + 1, dtype=np.int64)
        if d == 1:
            slabs = [_direct_weights(family, ax[:, None])]
        else:
            rest = np.stack(np.meshgrid(*([ax] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
            slabs = []
            for k1 in ax:
                pts = np.concatenate([np.full((len(rest), 1), k1), rest], axis=1)
                slabs.append(_direct_weights(family, pts))
        w = np.concatenate(slabs)
        w = np.sort(w[w < w_out])
        if len(w) >= n_max:
            return (1.0 / w[:n_max]).tolist()
        K *= 2


# --------------------------------------------------------- certification


def geometric_grid(n_min: int, n_max: int, per_decade: int = PER_DECADE) -> list[int]:
    if n_min < 1 or n_max < n_min:
        raise ValueError(f"bad range {n_min}:{n_max}")
    steps = max(1, math.ceil(per_decade * math.log10(n_max / n_min)))
    pts = {int(round(n_min * (n_max / n_min) ** (i / steps))) for i in range(steps + 1)}
    return sorted(p for p in pts | {n_min, n_max} if n_min <= p <= n_max)


def sample_points(n_min: int, n_max: int, sampling="auto") -> list[int]:
    """'all', ('geometric', points_per_decade), or 'auto' (exhaustive below 1024)."""
    if sampling == "all":
        return list(range(n_min, n_max + 1))
    if sampling == "auto":
        low = list(range(n_min, min(n_max, EXHAUSTIVE_BELOW - 1) + 1))
        high = geometric_grid(max(n_min, EXHAUSTIVE_BELOW), n_max) if n_max >= EXHAUSTIVE_BELOW else []
        return sorted(set(low) | set(high))
    kind, per = sampling
    if kind != "geometric":
        raise ValueError(f"unknown sampling {sampling!r}")
    return geometric_grid(n_min, n_max, int(per))


@dataclass
class CertificationReport:
    certificate: BoundCertificate
    family: WeightFamily
    n_range: tuple[int, int]
    checked_points: int = 0
    skipped: list[int] = field(default_factory=list)
    failures: list[tuple[int, float, float]] = field(default_factory=list)
    min_margin: float = math.inf
    rows: list[tuple[int, float, float, float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "certificate": self.certificate.to_dict(),
            "family": str(self.family),
            "range": list(self.n_range),
            "checked_points": self.checked_points,
            "skipped_points": len(self.skipped),
            "failures": [{"n": n, "lhs": a, "rhs": b} for n, a, b in self.failures],
            "min_margin": self.min_margin if math.isfinite(self.min_margin) else None,
            "passed": self.passed,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "actual_lo", "actual_hi", "bound", "margin"])
        for n, lo, hi, b, m in self.rows:
            wr.writerow([n, f"{lo:.17g}", f"{hi:.17g}", f"{b:.17g}", f"{m:.17g}"])
        return buf.getvalue()


def _check_family(cert: BoundCertificate, family: WeightFamily) -> None:
    want = (cert.family_kind, cert.r, cert.d, cert.s)
    got = (family.kind, family.r, family.d, family.s)
    if want != got:
        raise ValueError(
            f"{cert.name} was built for {cert.family_kind}:s={cert.s:g},r={cert.r:g},d={cert.d}, "
            f"not {family}"
        )


def actual_value(cert: BoundCertificate, family: WeightFamily, m: int, width=DEFAULT_WIDTH, budget=DEFAULT_BUDGET):
    """(lo, hi) of the quantity the certificate bounds, at index m."""
    if cert.target == L2:
        v = sigma(family, m, budget).value
        return v, v
    enc = tail(family, m, cert.q, width=width, budget=budget)
    return enc.lo, enc.hi


def certify(
    cert: BoundCertificate,
    family: WeightFamily,
    n_range: tuple[int, int],
    sampling="auto",
    width: float = DEFAULT_WIDTH,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> CertificationReport:
    """Check the bound at sampled n; upper bounds use hi, lower bounds use lo."""
    _check_family(cert, family)
    n_min, n_max = int(n_range[0]), int(n_range[1])
    report = CertificationReport(cert, family, (n_min, n_max))
    points = sample_points(n_min, n_max, sampling)
    first = cert.first_n
    report.skipped = [n for n in points if n < first]
    todo = [n for n in points if n >= first]

    def run(n):
        return actual_value(cert, family, n + cert.index_offset, width, budget)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            values = list(ex.map(run, todo))
    else:
        values = [run(n) for n in todo]

    for n, (lo, hi) in zip(todo, values):
        b = cert.bound(n)
        if cert.side == LOWER:
            margin, lhs, rhs = lo / b, b, lo
        else:
            margin, lhs, rhs = b / hi, hi, b
        report.rows.append((n, lo, hi, b, margin))
        report.min_margin = min(report.min_margin, margin)
        if margin < 1.0:
            report.failures.append((n, lhs, rhs))
    report.checked_points = len(todo)
    return report


# -------------------------------------------------------- convergence


@dataclass
class ConvergenceTrace:
    limit_spec: LimitSpec
    grid: list[int]
    ratios: list[tuple[int, float]]
    bounds: list[tuple[float, float]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "ratio", "ratio_lo", "ratio_hi"])
        for (n, x), (lo, hi) in zip(self.ratios, self.bounds):
            wr.writerow([n, f"{x:.17g}", f"{lo:.17g}", f"{hi:.17g}"])
        return buf.getvalue()


def convergence_trace(
    spec: LimitSpec,
    n_grid,
    width: float = DEFAULT_WIDTH,
    budget: int = DEFAULT_BUDGET,
) -> ConvergenceTrace:
    """n^rate * a_n / ((ln n)^log_exponent * constant) along n_grid."""
    grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("n grid must be strictly increasing")
    if spec.log_exponent and grid and grid[0] < 2:
        raise ValueError("grids for logarithmic limits must start at n >= 2")
    family = WeightFamily(spec.family_kind, spec.s, spec.r, spec.d)
    ratios, bounds = [], []
    for n in grid:
        if spec.target == L2:
            lo = hi = sigma(family, n, budget).value
        elif spec.target == LINF:
            enc = tail(family, n, 2.0, width=width, budget=budget)
            lo, hi = enc.lo, enc.hi
        else:
            raise ValueError(f"no limit for target {spec.target}")
        scale = n**spec.rate_exponent / (math.log(n) ** spec.log_exponent * spec.constant)
        bounds.append((lo * scale, hi * scale))
        ratios.append((n, 0.5 * (lo + hi) * scale))
    return ConvergenceTrace(spec, grid, ratios, bounds)
