import itertools
import math

import numpy as np
import pytest

from sobnum.weights import ISO, MIX, WeightFamily, check_summability

GRID = [
    WeightFamily(kind, s, r, d)
    for kind in (ISO, MIX)
    for d in (1, 2, 3)
    for s in (0.6, 1.0, 2.0)
    for r in (1.0, 2.0, math.inf)
]
SUMMABLE = [f for f in GRID if check_summability(f, 2.0)]


def ids(fams):
    return [str(f) for f in fams]


def box_weights(family, K):
    """All weights with |k|_inf <= K, from the defining formula in plain numpy."""
    ax = np.arange(-K, K + 1, dtype=np.float64)
    grids = np.meshgrid(*([np.abs(ax)] * family.d), indexing="ij")
    a = np.stack([g.ravel() for g in grids], axis=1)
    s, r = family.s, family.r
    if family.kind == ISO:
        if math.isinf(r):
            return np.maximum(a.max(axis=1), 1.0) ** s
        return (1.0 + (a**r).sum(axis=1)) ** (s / r)
    if math.isinf(r):
        return np.maximum(a, 1.0).prod(axis=1) ** s
    return (1.0 + a**r).prod(axis=1) ** (s / r)


def radius_for(family, t):
    """Box radius containing every k with w(k) <= t."""
    return int(math.floor(t ** (1.0 / family.s) * (1 + 1e-9)))


def hand_points(family, K):
    return list(itertools.product(range(-K, K + 1), repeat=family.d))


@pytest.fixture(autouse=True)
def _no_disk_cache(monkeypatch):
    monkeypatch.delenv("SOBNUM_CACHE_DIR", raising=False)
