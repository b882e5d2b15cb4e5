"""Non-increasing rearrangement of 1/w(k) and enclosures of its l_q tails.

The tail T_q(n) = (sum_{j >= n} sigma_j^q)^(1/q) is an infinite sum; every
routine here returns an interval that contains it.  Truncation is certified
by explicit remainder bounds, round-off is controlled by exactly rounded
(``math.fsum``) block summation and is not added to the enclosure.

Three evaluation routes:

* d = 1: direct sum over the complement of the first n points, remainder
  bracketed between two integrals;
* isotropic, d >= 2: direct sum over the box |k|_inf <= K minus the first n
  points, remainder outside the box bounded shell by shell;
* mixed, d >= 2: the full sum factorises into the d-th power of a 1-d sum,
  the first n-1 points are subtracted exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .counting import (
    DEFAULT_BUDGET,
    REL_TOL,
    BudgetExceeded,
    _orthant_float,
    box_level_counts,
    cluster_levels,
    count_levels,
    level_counts_upto,
)
from .weights import ISO, WeightFamily, require_summable, weight_of_level

DEFAULT_WIDTH = 1e-6


@dataclass(frozen=True)
class Enclosure:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"enclosure endpoints must be finite: [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class TailEnclosure(Enclosure):
    n: int = 1
    q: float = 2.0
    cutoff: int = 0
    converged: bool = True

    @property
    def rel_width(self) -> float:
        return self.width / self.hi if self.hi > 0 else 0.0


@dataclass(frozen=True)
class SigmaValue:
    n: int
    value: float
    level: float
    rank_range: tuple[int, int]
    ulevel: int | None = None


class BlockSums:
    """Range sums of a fixed array, exactly rounded and independent of query order."""

    def __init__(self, x, block: int = 4096):
        self.x = np.ascontiguousarray(x, dtype=np.float64)
        self.block = block
        self.bsum = [math.fsum(self.x[i:i + block].tolist()) for i in range(0, len(self.x), block)]

    def __len__(self):
        return len(self.x)

    def sum(self, i: int, j: int | None = None) -> float:
        n, B = len(self.x), self.block
        j = n if j is None else min(j, n)
        i = max(i, 0)
        if j <= i:
            return 0.0
        bi, bj = -(-i // B), j // B
        if bi >= bj:
            return math.fsum(self.x[i:j].tolist())
        parts = self.x[i:bi * B].tolist() + self.x[bj * B:j].tolist() + self.bsum[bi:bj]
        return math.fsum(parts)


# ------------------------------------------------------------------- sigma


def _search_level(family: WeightFamily, n: int, budget: int) -> int:
    lo, hi = 0, 1
    while count_levels(family, hi, budget) < n:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if count_levels(family, mid, budget) >= n:
            hi = mid
        else:
            lo = mid
    return hi


def sigma(family: WeightFamily, n: int, budget: int = DEFAULT_BUDGET) -> SigmaValue:
    """n-th largest element of the multiset {1/w(k) : k in Z^d}."""
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if family.integer_levels:
        U = _search_level(family, n, budget)
        first = count_levels(family, U - 1, budget) + 1
        last = count_levels(family, U, budget)
        t = weight_of_level(family, U)
        return SigmaValue(n, 1.0 / t, t, (first, last), U)
    t = 2.0
    while True:
        w, mult = _orthant_float(family, t, budget)
        vals, counts = cluster_levels(w, mult)
        cum = np.cumsum(counts)
        if cum[-1] >= n:
            i = int(np.searchsorted(cum, n))
            first = int(cum[i - 1]) + 1 if i > 0 else 1
            return SigmaValue(n, 1.0 / float(vals[i]), float(vals[i]), (first, int(cum[i])))
        t *= 2.0


def sigma_sequence(family: WeightFamily, n_max: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """sigma_1, ..., sigma_{n_max} as an array."""
    last = sigma(family, n_max, budget)
    if family.integer_levels:
        u, c = level_counts_upto(family, last.ulevel, budget)
        vals = np.array([weight_of_level(family, int(x)) for x in u])
    else:
        w, mult = _orthant_float(family, last.level, budget)
        vals, c = cluster_levels(w, mult)
    return (1.0 / np.repeat(vals, c))[:n_max]


# ---------------------------------------------------------------- 1-d sums


def _weights_1d(family: WeightFamily, m: np.ndarray) -> np.ndarray:
    """Per-coordinate weight (1 + m^r)^(s/r) (max(1, m)^s for r = inf) for m >= 0."""
    if family.integer_levels:
        r = family.int_r
        u = np.maximum(m, 1) if r is None else 1 + m.astype(np.int64) ** r
        return u.astype(np.float64) ** family.exponent
    return (1.0 + m.astype(np.float64) ** family.r) ** (family.s / family.r)


@lru_cache(maxsize=32)
def _table_1d(s: float, r: float, q: float, K: int) -> BlockSums:
    fam = WeightFamily("mix", s, r, 1)
    m = np.arange(K + 1, dtype=np.int64)
    return BlockSums(_weights_1d(fam, m) ** (-q))


def _remainder_1d(family: WeightFamily, q: float, K: int) -> tuple[float, float]:
    """Bounds on sum_{m > K} w(m)^(-q) for the 1-d weight, K >= 1."""
    a = q * family.s
    r = family.r
    # c_lo (1 + m)^s <= w(m) <= c_hi (1 + m)^s, and w(m) >= m^s
    if math.isinf(r):
        c_lo, c_hi = 0.5, 1.0
    elif r >= 1:
        c_lo, c_hi = 2.0 ** (1.0 / r - 1.0), 1.0
    else:
        c_lo, c_hi = 1.0, 2.0 ** (1.0 / r - 1.0)
    hi = min(K ** (1.0 - a), c_lo ** (-a) * (K + 1.0) ** (1.0 - a)) / (a - 1.0)
    lo = c_hi ** (-a) * (K + 2.0) ** (1.0 - a) / (a - 1.0)
    return lo, hi


def _ladder(start: int, factor: int, at_least: int) -> int:
    K = start
    while K <= at_least:
        K *= factor
    return K


def _sum_1d(family: WeightFamily, q: float, m0: int, K: int):
    """Enclosure (lo, hi) of sum_{m >= m0} w(m)^(-q) over nonnegative m, K >= m0."""
    tab = _table_1d(family.s, family.r, q, K)
    part = tab.sum(m0, K + 1)
    rlo, rhi = _remainder_1d(family, q, K)
    return part + rlo, part + rhi


def _finish(n, q, lo_q, hi_q, K, width):
    lo, hi = lo_q ** (1.0 / q), hi_q ** (1.0 / q)
    # relative below 1, absolute above
    ok = (hi - lo) <= width * min(hi, 1.0)
    return TailEnclosure(lo, hi, n=n, q=q, cutoff=K, converged=ok)


def _intersect(best, lo_q, hi_q):
    """Intersect with the previous (also valid) enclosure; keeps widths nested."""
    if best is not None:
        lo_q, hi_q = max(lo_q, best[0]), min(hi_q, best[1])
    return lo_q, max(hi_q, lo_q)


def _ties(sv: SigmaValue, n: int) -> int:
    return sv.rank_range[1] - n + 1


def _tail_1d(family, n, q, width, K0, budget):
    sv = sigma(family, n, budget)
    g_t = sv.level ** (-q)
    head = _ties(sv, n) * g_t
    m_n = (sv.rank_range[1] - 1) // 2
    K = max(K0 or 1024, 1024)
    K = _ladder(K, 8, m_n)
    best = None
    while True:
        lo1, hi1 = _sum_1d(family, q, m_n + 1, K)
        lo_q, hi_q = head + 2.0 * lo1, head + 2.0 * hi1
        lo_q, hi_q = _intersect(best, lo_q, hi_q)
        best = (lo_q, hi_q, K)
        res = _finish(n, q, lo_q, hi_q, K, width)
        if res.converged or 8 * K + 1 > budget:
            return res
        K *= 8


def _shell_poly(d: int) -> list[tuple[int, int]]:
    """(coefficient, power) with (2m+1)^d - (2m-1)^d = sum coef * m^power."""
    return [(2 * math.comb(d, j) * 2**j, j) for j in range(d) if (d - j) % 2 == 1]


@lru_cache(maxsize=32)
def _shell_table(d: int, s: float, q: float, K: int) -> BlockSums:
    m = np.arange(K + 1, dtype=np.float64)
    shell = sum(c * m**j for c, j in _shell_poly(d))
    shell[0] = 0.0
    shell[1] = 3.0**d
    with np.errstate(divide="ignore"):
        g = np.where(m > 0, np.maximum(m, 1.0) ** (-q * s), 0.0)
    return BlockSums(shell * g)


def _tail_iso_inf(family, n, q, width, K0, budget):
    """Isotropic r = inf: levels are shells |k|_inf = m, so the tail is a 1-d sum."""
    sv = sigma(family, n, budget)
    head = _ties(sv, n) * sv.level ** (-q)
    d, a = family.d, q * family.s
    K = _ladder(max(K0 or 1024, 1024), 8, sv.ulevel)
    best = None
    while True:
        part = _shell_table(d, family.s, q, K).sum(sv.ulevel + 1, K + 1)
        rlo = sum(c * (K + 1.0) ** (j + 1 - a) / (a - j - 1) for c, j in _shell_poly(d))
        rhi = sum(c * float(K) ** (j + 1 - a) / (a - j - 1) for c, j in _shell_poly(d))
        lo_q, hi_q = _intersect(best, head + part + rlo, head + part + rhi)
        best = (lo_q, hi_q)
        res = _finish(n, q, lo_q, hi_q, K, width)
        if res.converged or 8 * K + 1 > budget:
            return res
        K *= 8


@lru_cache(maxsize=16)
def _box_table(family: WeightFamily, K: int, budget: int):
    return box_level_counts(family, K, budget)


@lru_cache(maxsize=16)
def _box_sums(family: WeightFamily, q: float, K: int, budget: int) -> BlockSums:
    vals, counts, _ = _box_table(family, K, budget)
    return BlockSums(counts * vals ** (-q))


def _box_remainder(family: WeightFamily, q: float, K: int) -> float:
    """Upper bound on sum_{|k|_inf > K} w(k)^(-q) via shells |k|_inf = m, w >= m^s."""
    d, a = family.d, q * family.s
    return 2.0 * d * 3.0 ** (d - 1) * K ** (d - a) / (a - d)


def _tail_box(family, n, q, width, K0, budget):
    sv = sigma(family, n, budget)
    g_t = sv.level ** (-q)
    head = _ties(sv, n) * g_t
    rho = int(math.floor(sv.level ** (1.0 / family.s) * (1 + REL_TOL)))
    K = _ladder(max(K0 or 8, 8), 2, rho)
    d = family.d
    best = None
    while True:
        try:
            vals, _, ulev = _box_table(family, K, budget)
        except BudgetExceeded:
            if best is None:
                raise
            return _finish(n, q, best[0], best[1], best[2], width)
        sums = _box_sums(family, q, K, budget)
        if ulev is not None:
            i = int(np.searchsorted(ulev, sv.ulevel, side="right"))
        else:
            i = int(np.searchsorted(vals, sv.level * (1 + REL_TOL), side="right"))
        lo_q = head + sums.sum(i)
        hi_q = lo_q + _box_remainder(family, q, K)
        lo_q, hi_q = _intersect(best, lo_q, hi_q)
        best = (lo_q, hi_q, K)
        res = _finish(n, q, lo_q, hi_q, K, width)
        if res.converged or (2 * K + 1) ** d > budget:
            return res
        K *= 2


@lru_cache(maxsize=16)
def _cross_table(family: WeightFamily, U: int, budget: int):
    """Attained levels u <= U with counts and g-free weights (integer families)."""
    u, c = level_counts_upto(family, U, budget)
    vals = u.astype(np.float64) ** family.exponent
    return u, c, vals


@lru_cache(maxsize=16)
def _cross_sums(family: WeightFamily, q: float, U: int, budget: int) -> BlockSums:
    u, c, vals = _cross_table(family, U, budget)
    return BlockSums(c * vals ** (-q))


@lru_cache(maxsize=16)
def _cross_table_float(family: WeightFamily, t: float, budget: int):
    w, mult = _orthant_float(family, t, budget)
    return cluster_levels(w, mult)


def _excluded_mixed(family, sv, n, q, budget):
    """sum of w^-q over the first n-1 points of the rearrangement."""
    g_t = sv.level ** (-q)
    head = (n - sv.rank_range[0]) * g_t
    if family.integer_levels:
        # round the cutoff up to a power of two so nearby n share one table
        U = 1 << max(int(sv.ulevel - 1).bit_length(), 4)
        u, _, _ = _cross_table(family, U, budget)
        i = int(np.searchsorted(u, sv.ulevel, side="left"))
        return head + _cross_sums(family, q, U, budget).sum(0, i)
    vals, counts = _cross_table_float(family, sv.level, budget)
    i = int(np.searchsorted(vals, sv.level / (1 + REL_TOL), side="left"))
    return head + math.fsum((counts[:i] * vals[:i] ** (-q)).tolist())


def _tail_mixed(family, n, q, width, K0, budget):
    sv = sigma(family, n, budget)
    ties_part = _ties(sv, n) * sv.level ** (-q)
    excl = _excluded_mixed(family, sv, n, q, budget)
    d = family.d
    f1 = WeightFamily("mix", family.s, family.r, 1)
    K = max(K0 or 1024, 1024)
    best = None
    while True:
        lo1, hi1 = _sum_1d(f1, q, 1, K)
        g0 = 1.0  # w(0) = 1
        zlo, zhi = g0 + 2.0 * lo1, g0 + 2.0 * hi1
        lo_q = max(zlo**d - excl, ties_part)
        hi_q = max(zhi**d - excl, lo_q)
        lo_q, hi_q = _intersect(best, lo_q, hi_q)
        best = (lo_q, hi_q, K)
        res = _finish(n, q, lo_q, hi_q, K, width)
        if res.converged or 8 * K + 1 > budget:
            return res
        K *= 8


def tail(
    family: WeightFamily,
    n: int,
    q: float = 2.0,
    cutoff_hint: int | None = None,
    width: float = DEFAULT_WIDTH,
    budget: int = DEFAULT_BUDGET,
) -> TailEnclosure:
    """Enclosure of (sum_{j >= n} sigma_j^q)^(1/q).

    The cutoff (1-d truncation index or box radius) escalates geometrically
    until the relative width is at most ``width`` or the budget is spent; in
    the latter case the result has ``converged=False``.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    q = float(q)
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    require_summable(family, q)
    if family.d == 1:
        return _tail_1d(family, n, q, width, cutoff_hint, budget)
    if family.kind == ISO and math.isinf(family.r):
        return _tail_iso_inf(family, n, q, width, cutoff_hint, budget)
    if family.kind == ISO:
        return _tail_box(family, n, q, width, cutoff_hint, budget)
    return _tail_mixed(family, n, q, width, cutoff_hint, budget)
