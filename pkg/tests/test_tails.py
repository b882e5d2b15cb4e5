import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sobnum.counting import count_leq
from sobnum.tails import sigma, sigma_sequence, tail
from sobnum.weights import ISO, MIX, NotEmbeddedError, WeightFamily

from conftest import SUMMABLE, box_weights, ids

ZETA3 = 1.2020569031595942

# (family, n, q, exact value)
CLOSED = [
    (WeightFamily(ISO, 1, 1, 1), 1, 2.0, math.sqrt(math.pi**2 / 3 - 1)),
    (WeightFamily(ISO, 1, 1, 1), 2, 2.0, math.sqrt(math.pi**2 / 3 - 2)),
    (WeightFamily(ISO, 1, 1, 1), 1, 4.0, (math.pi**4 / 45 - 1) ** 0.25),
    (WeightFamily(MIX, 1, 1, 1), 4, 2.0, math.sqrt(math.pi**2 / 3 - 2.5)),
    (WeightFamily(ISO, 1, math.inf, 1), 1, 2.0, math.sqrt(1 + math.pi**2 / 3)),
    (WeightFamily(ISO, 2, math.inf, 2), 1, 2.0, math.sqrt(9 + 8 * (ZETA3 - 1))),
    (WeightFamily(ISO, 2, math.inf, 2), 10, 2.0, math.sqrt(8 * (ZETA3 - 1))),
    (WeightFamily(MIX, 1, 1, 2), 1, 2.0, math.pi**2 / 3 - 1),
    (WeightFamily(MIX, 1, math.inf, 2), 1, 2.0, 1 + math.pi**2 / 3),
]


@pytest.mark.parametrize("fam,n,q,exact", CLOSED, ids=[f"{c[0]}-n{c[1]}-q{c[2]:g}" for c in CLOSED])
def test_closed_forms(fam, n, q, exact):
    e = tail(fam, n, q)
    assert e.lo <= exact * (1 + 1e-13) and exact * (1 - 1e-13) <= e.hi
    assert e.converged
    assert e.width <= 1e-6 * max(1.0, exact)


def test_sigma_examples():
    assert sigma(WeightFamily(ISO, 1, 1, 1), 3).value == 0.5
    assert sigma(WeightFamily(ISO, 1, 2, 2), 6).value == pytest.approx(3**-0.5, rel=1e-15)
    for fam in SUMMABLE:
        assert sigma(fam, 1).value == 1.0


@pytest.mark.parametrize("fam", [WeightFamily(ISO, 2, 2, 2), WeightFamily(ISO, 2, 1, 3), WeightFamily(MIX, 1, 2, 2)], ids=str)
def test_box_sum_with_remainder(fam):
    # independent enclosure: numpy box sum plus the shell remainder bound
    K = 600 if fam.d == 2 else 80
    w = box_weights(fam, K)
    part = math.fsum((w**-2.0).tolist())
    if fam.kind == ISO:
        qs, d = 2 * fam.s, fam.d
        rem = 2 * d * 3 ** (d - 1) * K ** (d - qs) / (qs - d)
    else:
        full = math.pi  # generous: sum over Z of (1+m^2)^-1 = pi coth(pi) < 3.16
        rem = fam.d * 2 * K ** (1 - 2 * fam.s) / (2 * fam.s - 1) * (full * 1.01) ** (fam.d - 1)
    e = tail(fam, 1)
    assert e.lo**2 <= part + rem and part <= e.hi**2


@pytest.mark.parametrize("fam", SUMMABLE, ids=ids(SUMMABLE))
def test_telescoping(fam):
    for n in (1, 2, 5, 17, 60):
        a, b = tail(fam, n), tail(fam, n + 1)
        s2 = sigma(fam, n).value ** 2
        lo, hi = a.lo**2 - b.hi**2, a.hi**2 - b.lo**2
        slack = 1e-12 * a.hi**2
        assert lo - slack <= s2 <= hi + slack


@pytest.mark.parametrize("fam", SUMMABLE, ids=ids(SUMMABLE))
def test_monotone_in_n_and_q(fam):
    prev = math.inf
    for n in (1, 2, 3, 10, 50, 300):
        e = tail(fam, n)
        assert e.lo <= prev
        prev = e.hi
    if 4 * fam.s > (fam.d if fam.kind == ISO else 1):
        for n in (1, 7):
            assert tail(fam, n, 4.0).lo <= tail(fam, n, 2.0).hi


@pytest.mark.parametrize("fam", SUMMABLE, ids=ids(SUMMABLE))
def test_sigma_non_increasing(fam):
    seq = sigma_sequence(fam, 500)
    assert np.all(np.diff(seq) <= 0)
    assert seq[-1] < seq[0]


@pytest.mark.parametrize("fam", [WeightFamily(ISO, 1, 1, 2), WeightFamily(MIX, 1, 1, 2), WeightFamily(ISO, 2, math.inf, 2)], ids=str)
def test_sigma_rank_consistency(fam):
    for n in range(1, 200, 7):
        sv = sigma(fam, n)
        assert sv.value == 1.0 / sv.level
        first, last = sv.rank_range
        assert first <= n <= last
        assert count_leq(fam, sv.level) == last
        assert count_leq(fam, sv.level * (1 - 1e-9)) == first - 1


@pytest.mark.parametrize("fam", [WeightFamily(ISO, 2, 1, 2), WeightFamily(MIX, 1, 2, 2), WeightFamily(ISO, 1, 2, 1)], ids=str)
def test_ties_do_not_matter(fam):
    # every n inside a block of tied values sees the same value; tails drop by sigma^2 per step
    sv = sigma(fam, 20)
    first, last = sv.rank_range
    ref = tail(fam, first)
    for n in range(first, last + 1):
        e = tail(fam, n)
        drop = (n - first) * sv.value**2
        assert e.lo**2 <= ref.hi**2 - drop + 1e-12 and ref.lo**2 - drop - 1e-12 <= e.hi**2


@pytest.mark.parametrize("fam", [WeightFamily(ISO, 1, 2, 1), WeightFamily(ISO, 2, 2, 2), WeightFamily(MIX, 0.6, 1, 2)], ids=str)
def test_width_shrinks_with_budget(fam):
    widths = [tail(fam, 5, width=1e-300, budget=b).width for b in (10_000, 100_000, 1_000_000)]
    assert widths[0] >= widths[1] >= widths[2]


def test_not_embedded():
    with pytest.raises(NotEmbeddedError):
        tail(WeightFamily(ISO, 1, 2, 2), 1)
    with pytest.raises(NotEmbeddedError):
        tail(WeightFamily(MIX, 0.5, 2, 3), 1)


def test_unconverged_flag():
    e = tail(WeightFamily(ISO, 2, 2, 2), 3, width=1e-15, budget=5_000)
    assert not e.converged and e.lo <= e.hi


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10_000))
def test_one_dimensional_against_zeta(n):
    # iso s=1 r=1 d=1: sigma_1 = 1, sigma_{2m}=sigma_{2m+1}=1/(m+1)
    fam = WeightFamily(ISO, 1, 1, 1)
    head = sum(1.0 / (((j // 2) + 1) ** 2) for j in range(1, n))
    exact = math.sqrt(max(math.pi**2 / 3 - 1 - head, 0.0))
    e = tail(fam, n)
    assert e.lo * (1 - 1e-9) <= exact <= e.hi * (1 + 1e-9)
