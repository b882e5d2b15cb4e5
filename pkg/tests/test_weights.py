import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sobnum.tails import tail
from sobnum.weights import (
    ISO,
    MIX,
    NotEmbeddedError,
    WeightFamily,
    check_summability,
    eval_weight,
    require_summable,
)

from conftest import GRID, box_weights, ids

families = st.builds(
    WeightFamily,
    st.sampled_from([ISO, MIX]),
    st.sampled_from([0.6, 1.0, 1.5, 2.0, 3.0]),
    st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]),
    st.integers(1, 4),
)


def vec(fam, data):
    return data.draw(st.lists(st.integers(-30, 30), min_size=fam.d, max_size=fam.d))


def test_examples():
    assert eval_weight(WeightFamily(ISO, 2, 2, 2), (1, 1)) == 3.0
    assert eval_weight(WeightFamily(MIX, 1, 2, 2), (1, 2)) == pytest.approx(math.sqrt(10), rel=1e-15)
    for f in GRID:
        assert eval_weight(f, (0,) * f.d) == 1.0


def test_summability_examples():
    assert not check_summability(WeightFamily(ISO, 1, 2, 3), 2)
    assert check_summability(WeightFamily(MIX, 0.6, 2, 100), 2)
    assert check_summability(WeightFamily(ISO, 1, 2, 1), 4)
    with pytest.raises(NotEmbeddedError):
        require_summable(WeightFamily(ISO, 1, 2, 2), 2)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        eval_weight(WeightFamily(ISO, 1, 2, 2), (1,))


@pytest.mark.parametrize("bad", [(ISO, 0, 2, 1), (ISO, 1, 0, 1), (MIX, 1, 2, 0), ("tri", 1, 2, 1), (ISO, -1, 2, 1)])
def test_domain(bad):
    with pytest.raises(ValueError):
        WeightFamily(*bad)


@pytest.mark.parametrize("text", ["iso:s=1,r=2", "iso:s=1,r=2,d=1.5", "cube:s=1,r=2,d=1", "iso:s=x,r=2,d=1", "iso:s=1,q=2,d=1"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        WeightFamily.parse(text)


@given(families)
def test_parse_roundtrip(fam):
    assert WeightFamily.parse(str(fam)) == fam


@given(families, st.data())
def test_at_least_one(fam, data):
    k = vec(fam, data)
    w = eval_weight(fam, k)
    assert w >= 1.0
    if not math.isinf(fam.r):
        # for r = inf every k with |k|_inf <= 1 has weight 1
        assert (w == 1.0) == (not any(k))


@given(families, st.data())
def test_symmetry(fam, data):
    k = vec(fam, data)
    perm = data.draw(st.permutations(range(fam.d)))
    signs = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=fam.d, max_size=fam.d))
    k2 = [signs[i] * k[perm[i]] for i in range(fam.d)]
    assert eval_weight(fam, k2) == pytest.approx(eval_weight(fam, k), rel=1e-14)


@given(families, st.data())
def test_monotone(fam, data):
    k = vec(fam, data)
    j = data.draw(st.integers(0, fam.d - 1))
    bigger = list(k)
    bigger[j] = (abs(k[j]) + data.draw(st.integers(0, 5)))
    assert eval_weight(fam, bigger) >= eval_weight(fam, k) * (1 - 1e-14)


@given(st.sampled_from([0.6, 1.0, 2.5]), st.sampled_from([1.0, 1.5, 2.0, math.inf]), st.integers(-1000, 1000))
def test_iso_equals_mixed_in_one_dimension(s, r, k):
    assert eval_weight(WeightFamily(ISO, s, r, 1), (k,)) == eval_weight(WeightFamily(MIX, s, r, 1), (k,))


@pytest.mark.parametrize("fam", [WeightFamily(ISO, 1, 2, 1), WeightFamily(MIX, 1, 2, 2), WeightFamily(ISO, 2, 2, 2), WeightFamily(MIX, 0.6, 1, 2)], ids=str)
def test_partial_sums_below_tail_bound(fam):
    hi = tail(fam, 1, 2.0).hi ** 2
    for K in range(1, 21):
        assert (box_weights(fam, K) ** -2.0).sum() <= hi * (1 + 1e-12)


@pytest.mark.parametrize("fam", [WeightFamily(ISO, 0.5, 2, 1), WeightFamily(ISO, 1, 2, 2), WeightFamily(MIX, 0.5, 1, 2)], ids=str)
def test_divergent_partial_sums_grow(fam):
    # at the critical exponent the box sums grow without bound, like log K
    sums = [(box_weights(fam, K) ** -2.0).sum() for K in (4, 16, 64)]
    assert sums[2] - sums[1] > 0.5 * (sums[1] - sums[0]) > 0
    assert not check_summability(fam, 2)
