"""Exact lattice point counting in weight level sets.

For integer-level families (r a positive integer or inf) all arithmetic is on
integers:

* isotropic, finite r: u = 1 + sum |k_j|^r, counted by the coordinate
  recursion C_d(b) = sum_{|m|^r <= b} C_{d-1}(b - |m|^r);
* isotropic, r = inf: u = max(1, |k|_inf), N(U) = (2U + 1)^d;
* mixed: u = prod phi(k_j) with phi(m) = 1 + |m|^r (or max(1, |m|)),
  counted by the divisor-type recursion M_d(T) = sum_m M_{d-1}(T // phi(m))
  grouped over the distinct floor values.

Non-integer r falls back to floating point enumeration with ties within a
relative tolerance of 1e-12 counted as "<=".
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .weights import ISO, WeightFamily, weight_of_level

REL_TOL = 1e-12
DEFAULT_BUDGET = 20_000_000
# keeps u**e and int64 products exact
MAX_LEVEL = 2**52


class BudgetExceeded(RuntimeError):
    """A computation would exceed the configured step/memory budget."""


# ---------------------------------------------------------------- integer roots


def iroot(b: int, r: int) -> int:
    """Largest x >= 0 with x**r <= b (b >= 0)."""
    if b < 0:
        raise ValueError("iroot of a negative number")
    if r == 1:
        return b
    if r == 2:
        return math.isqrt(b)
    x = int(round(b ** (1.0 / r)))
    while x > 0 and x**r > b:
        x -= 1
    while (x + 1) ** r <= b:
        x += 1
    return x


def iroot_array(b: np.ndarray, r: int) -> np.ndarray:
    b = np.asarray(b, dtype=np.int64)
    if r == 1:
        return b.copy()
    x = np.floor(np.power(b.astype(np.float64), 1.0 / r)).astype(np.int64)
    while True:
        up = (x + 1) ** r <= b
        if not up.any():
            break
        x += up
    while True:
        down = x**r > b
        if not down.any():
            break
        x -= down
    return x


# ------------------------------------------------------------- integer counts


@lru_cache(maxsize=1 << 18)
def _ball_count(r: int, d: int, b: int) -> int:
    """#{k in Z^d : sum |k_j|^r <= b}."""
    if b < 0:
        return 0
    if d == 1:
        return 2 * iroot(b, r) + 1
    m = np.arange(iroot(b, r) + 1, dtype=np.int64)
    rest = b - m**r
    if d == 2:
        c = 2 * iroot_array(rest, r) + 1
        return int(c[0]) + 2 * int(c[1:].sum())
    c = [_ball_count(r, d - 1, int(x)) for x in rest]
    return c[0] + 2 * sum(c[1:])


def _phi_max(r: int | None, T: int) -> int:
    """Largest m >= 0 with phi(m) <= T (T >= 1)."""
    return T if r is None else iroot(T - 1, r)


def _phi(r: int | None, m: np.ndarray) -> np.ndarray:
    return np.maximum(m, 1) if r is None else 1 + m**r


def _cross_count_1d(r: int | None, T: np.ndarray) -> np.ndarray:
    T = np.asarray(T, dtype=np.int64)
    out = np.zeros_like(T)
    ok = T >= 1
    if r is None:
        out[ok] = 2 * T[ok] + 1
    else:
        out[ok] = 2 * iroot_array(T[ok] - 1, r) + 1
    return out


@lru_cache(maxsize=1 << 18)
def _cross_count(r: int | None, d: int, T: int) -> int:
    """#{k in Z^d : prod phi(k_j) <= T}."""
    if T < 1:
        return 0
    if d == 1:
        return int(_cross_count_1d(r, np.array([T]))[0])
    m = np.arange(_phi_max(r, T) + 1, dtype=np.int64)
    quot = T // _phi(r, m)
    if d == 2:
        c = _cross_count_1d(r, quot)
        return int(c[0]) + 2 * int(c[1:].sum())
    mult = np.where(m == 0, 1, 2)
    # quot is non-increasing in m: O(sqrt T) distinct values
    vals, inv = np.unique(quot, return_inverse=True)
    wsum = np.bincount(inv, weights=mult).astype(np.int64)
    return sum(int(w) * _cross_count(r, d - 1, int(v)) for v, w in zip(vals, wsum))


class _CountCache:
    """Optional on-disk cache of exact counts, one JSON record per line."""

    def __init__(self):
        self._lock = threading.Lock()
        self._dir = None
        self._data: dict[tuple[str, int], int] = {}

    def _sync_dir(self):
        d = os.environ.get("SOBNUM_CACHE_DIR")
        if d != self._dir:
            self._dir = d
            self._data = {}
            if d:
                path = Path(d) / "counts.jsonl"
                if path.exists():
                    for line in path.read_text().splitlines():
                        try:
                            rec = json.loads(line)
                            self._data[(rec["family"], int(rec["level"]))] = int(rec["count"])
                        except (ValueError, KeyError, TypeError):
                            continue
        return d

    def get(self, fam: str, level: int):
        with self._lock:
            if not self._sync_dir():
                return None
            return self._data.get((fam, level))

    def put(self, fam: str, level: int, count: int) -> None:
        with self._lock:
            d = self._sync_dir()
            if not d or (fam, level) in self._data:
                return
            self._data[(fam, level)] = count
            Path(d).mkdir(parents=True, exist_ok=True)
            with open(Path(d) / "counts.jsonl", "a") as fh:
                fh.write(json.dumps({"family": fam, "level": level, "count": count}) + "\n")


_disk_cache = _CountCache()


def _level_key(family: WeightFamily) -> str:
    # weights depend on s only through e; counts depend only on (kind, r, d)
    return f"{family.kind}:r={family.r:g},d={family.d}"


def count_cost(family: WeightFamily, U: int) -> int:
    """Rough number of inner steps (array elements) for one exact count at level U."""
    r, d = family.int_r, family.d
    if family.kind == ISO and r is None:
        return 1
    root = U if r is None else iroot(max(U - 1, 0), r) + 1
    if family.kind == ISO:
        return root ** max(d - 1, 1)
    return root * max(d - 1, 1)


def count_levels(family: WeightFamily, U: int, budget: int = DEFAULT_BUDGET) -> int:
    """#{k : u(k) <= U} for an integer-level family."""
    if not family.integer_levels:
        raise ValueError(f"{family} has no integer levels")
    U = int(U)
    if U < 1:
        return 0
    if U > MAX_LEVEL:
        raise BudgetExceeded(f"level {U} exceeds the exact-arithmetic range")
    r, d = family.int_r, family.d
    if family.kind == ISO and r is None:
        return (2 * U + 1) ** d
    key = _level_key(family)
    hit = _disk_cache.get(key, U)
    if hit is not None:
        return hit
    cost = count_cost(family, U)
    if cost > budget:
        raise BudgetExceeded(f"counting {family} up to level {U} needs ~{cost} steps, budget is {budget}")
    if family.kind == ISO:
        n = _ball_count(r, d, U - 1)
    else:
        n = _cross_count(r, d, U)
    _disk_cache.put(key, U, n)
    return n


def level_floor(family: WeightFamily, t: float) -> int:
    """Largest integer level U with U**e <= t (ties within REL_TOL count as <=)."""
    if t < 1:
        return 0
    x = float(t) ** (1.0 / family.exponent)
    if x > MAX_LEVEL:
        raise BudgetExceeded(f"weight {t} maps to a level beyond the exact range")
    U = math.floor(x * (1.0 + REL_TOL))
    return max(U, 0)


def count_leq(family: WeightFamily, t: float, budget: int = DEFAULT_BUDGET) -> int:
    """N(t) = #{k in Z^d : w(k) <= t}."""
    if t < 1:
        return 0
    if family.integer_levels:
        return count_levels(family, level_floor(family, t), budget)
    w, c = _orthant_float(family, t, budget)
    return int(c.sum())


# ------------------------------------------------------------- enumeration


def _expand(counts: np.ndarray):
    """Parent index and offset 0..counts[i]-1 for a ragged expansion."""
    total = int(counts.sum())
    idx = np.repeat(np.arange(len(counts)), counts)
    start = np.repeat(np.cumsum(counts) - counts, counts)
    return idx, np.arange(total, dtype=np.int64) - start


def _orthant_int(family: WeightFamily, U: int):
    """Levels and sign multiplicities of all points in the closed positive orthant with u <= U."""
    r = family.int_r
    iso = family.kind == ISO
    part = np.array([0 if iso else 1], dtype=np.int64)
    mult = np.ones(1, dtype=np.int64)
    for _ in range(family.d):
        if iso and r is not None:
            lim = iroot_array(U - 1 - part, r)
        elif iso:
            lim = np.full(len(part), U, dtype=np.int64)
        elif r is not None:
            lim = iroot_array(U // part - 1, r)
        else:
            lim = U // part
        idx, m = _expand(lim + 1)
        if iso and r is not None:
            part = part[idx] + m**r
        elif iso:
            part = np.maximum(part[idx], m)
        else:
            part = part[idx] * _phi(r, m)
        mult = mult[idx] * np.where(m > 0, 2, 1)
    levels = part + 1 if (iso and r is not None) else np.maximum(part, 1)
    return levels, mult


def _orthant_float(family: WeightFamily, t: float, budget: int = DEFAULT_BUDGET):
    """Weights and multiplicities of orthant points with w <= t(1+tol), non-integer r."""
    s, r, d = family.s, family.r, family.d
    cap = (float(t) * (1.0 + REL_TOL)) ** (r / s)
    iso = family.kind == ISO
    part = np.array([0.0 if iso else 1.0])
    mult = np.ones(1, dtype=np.int64)
    for _ in range(d):
        room = (cap - 1.0 - part) if iso else (cap / part - 1.0)
        lim = np.floor(np.power(np.maximum(room, 0.0), 1.0 / r)).astype(np.int64) + 1
        if int(lim.sum()) > budget:
            raise BudgetExceeded(f"enumerating {family} up to weight {t} exceeds budget {budget}")
        idx, m = _expand(lim + 1)
        mr = m.astype(np.float64) ** r
        part = part[idx] + mr if iso else part[idx] * (1.0 + mr)
        mult = mult[idx] * np.where(m > 0, 2, 1)
        keep = (part <= cap - 1.0) if iso else (part <= cap)
        part, mult = part[keep], mult[keep]
    w = (1.0 + part) ** (s / r) if iso else part ** (s / r)
    return w, mult


def cluster_levels(w: np.ndarray, mult: np.ndarray):
    """Sort weights and merge values equal within REL_TOL; returns (values, counts)."""
    order = np.argsort(w, kind="stable")
    w, mult = w[order], mult[order]
    if len(w) == 0:
        return w, mult.astype(np.int64)
    new = np.empty(len(w), dtype=bool)
    new[0] = True
    new[1:] = w[1:] > w[:-1] * (1.0 + REL_TOL)
    starts = np.flatnonzero(new)
    counts = np.add.reduceat(mult, starts).astype(np.int64)
    return w[starts], counts


# -------------------------------------------------------------- level tables


@dataclass(frozen=True)
class LevelTable:
    """Attained weight values up to a cutoff with exact multiplicities."""

    family: WeightFamily
    cutoff: float
    values: np.ndarray
    counts: np.ndarray
    ulevels: np.ndarray | None = None

    @property
    def levels(self) -> list[tuple[float, int]]:
        return [(float(v), int(c)) for v, c in zip(self.values, self.counts)]

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.counts)

    def __len__(self) -> int:
        return len(self.values)


def _check_budget(n_points: int, budget: int, what: str) -> None:
    if n_points > budget:
        raise BudgetExceeded(f"{what} needs {n_points} points, budget is {budget}")


def level_counts_upto(family: WeightFamily, U: int, budget: int = DEFAULT_BUDGET):
    """(ulevels, counts) for all attained integer levels u <= U."""
    U = int(U)
    if U < 1:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if family.kind == ISO and family.int_r is None:
        m = np.arange(1, U + 1, dtype=np.int64)
        d = family.d
        cnt = np.array([(2 * int(x) + 1) ** d - (2 * int(x) - 1) ** d for x in m], dtype=object)
        cnt[0] = 3**d
        return m, np.array([int(c) for c in cnt], dtype=np.int64)
    _check_budget(count_levels(family, U, budget), budget, f"level table of {family} up to level {U}")
    lv, mult = _orthant_int(family, U)
    hist = np.rint(np.bincount(lv, weights=mult, minlength=U + 1)).astype(np.int64)
    nz = np.flatnonzero(hist)
    return nz.astype(np.int64), hist[nz]


def level_multiplicities(family: WeightFamily, cutoff: float, budget: int = DEFAULT_BUDGET) -> LevelTable:
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if family.integer_levels:
        u, c = level_counts_upto(family, level_floor(family, cutoff), budget)
        vals = np.array([weight_of_level(family, int(x)) for x in u], dtype=np.float64)
        return LevelTable(family, float(cutoff), vals, c, u)
    w, mult = _orthant_float(family, cutoff, budget)
    vals, counts = cluster_levels(w, mult)
    return LevelTable(family, float(cutoff), vals, counts)


# -------------------------------------------------------- full-box histograms


def _combine_sparse(va, ca, vb, cb, chunk=4_000_000):
    """Histogram of pairwise sums of two integer-valued sparse histograms."""
    top = int(va[-1] + vb[-1])
    acc = np.zeros(top + 1, dtype=np.float64)
    rows = max(1, chunk // len(vb))
    for i in range(0, len(va), rows):
        s = (va[i:i + rows, None] + vb[None, :]).ravel()
        w = (ca[i:i + rows, None].astype(np.float64) * cb[None, :]).ravel()
        acc += np.bincount(s, weights=w, minlength=top + 1)
    nz = np.flatnonzero(acc)
    return nz.astype(np.int64), np.rint(acc[nz]).astype(np.int64)


def box_level_counts(family: WeightFamily, K: int, budget: int = DEFAULT_BUDGET):
    """Level histogram of the full box |k|_inf <= K for an isotropic family.

    Returns (values, counts, ulevels) with values the weights, ascending.
    """
    if family.kind != ISO:
        raise ValueError("box histograms are only used for isotropic families")
    d = family.d
    _check_budget((K + 1) ** d, budget, f"box of radius {K} in dimension {d}")
    m = np.arange(K + 1, dtype=np.int64)
    c1 = np.where(m > 0, 2, 1).astype(np.int64)
    r = family.int_r
    if family.integer_levels and r is None:
        u = np.arange(1, max(K, 1) + 1, dtype=np.int64)
        cnt = [3**d] + [(2 * int(x) + 1) ** d - (2 * int(x) - 1) ** d for x in u[1:]]
        cnt = np.array(cnt, dtype=np.int64)
        return u.astype(np.float64) ** family.exponent, cnt, u
    if family.integer_levels:
        v1 = m**r
        v, c = v1, c1
        for _ in range(d - 1):
            v, c = _combine_sparse(v, c, v1, c1)
        u = v + 1
        return u.astype(np.float64) ** family.exponent, c, u
    v1 = m.astype(np.float64) ** family.r
    v, c = v1, c1
    for _ in range(d - 1):
        s = (v[:, None] + v1[None, :]).ravel()
        w = (c[:, None] * c1[None, :]).ravel()
        v, inv = np.unique(s, return_inverse=True)
        c = np.bincount(inv.ravel(), weights=w).astype(np.int64)
    return (1.0 + v) ** (family.s / family.r), c, None
