import csv
import io
import json
import math
from dataclasses import replace

import pytest

from sobnum.constants import explicit_bound, limit_constant
from sobnum.counting import BudgetExceeded
from sobnum.tails import sigma, tail
from sobnum.verify import brute_sigma, certify, convergence_trace, geometric_grid, sample_points
from sobnum.weights import ISO, MIX, WeightFamily

from conftest import SUMMABLE, ids

ISO12 = WeightFamily(ISO, 1, 2, 1)
MIX12 = WeightFamily(MIX, 1, 2, 1)


def test_brute_examples():
    assert brute_sigma(WeightFamily(ISO, 1, 1, 1), 5) == [1, 0.5, 0.5, 1 / 3, 1 / 3]
    assert brute_sigma(WeightFamily(MIX, 1, 1, 2), 5) == [1, 0.5, 0.5, 0.5, 0.5]


def test_brute_budget():
    with pytest.raises(BudgetExceeded):
        brute_sigma(WeightFamily(ISO, 0.6, 1, 3), 10_000, max_points=10_000)


@pytest.mark.parametrize("fam", SUMMABLE, ids=ids(SUMMABLE))
def test_partial_sums_consistent(fam):
    head = math.fsum(v * v for v in brute_sigma(fam, 200))
    t1, t201 = tail(fam, 1), tail(fam, 201)
    slack = 1e-12 * t1.hi**2
    assert head + t201.lo**2 <= t1.hi**2 + slack
    assert t1.lo**2 <= head + t201.hi**2 + slack


def test_geometric_grid():
    g = geometric_grid(1000, 10**6, 2)
    assert g == [1000, 3162, 10000, 31623, 100000, 316228, 1000000]
    assert sample_points(15, 2000)[:3] == [15, 16, 17]
    assert len(sample_points(1, 10**4)) == 1023 + len(geometric_grid(1024, 10**4))


@pytest.mark.parametrize(
    "name,fam,lo,hi",
    [("prop2-upper", ISO12, 15, 10**4), ("prop2-lower", ISO12, 19, 10**4), ("cor12-upper", MIX12, 28, 10**4)],
)
def test_certify_examples(name, fam, lo, hi):
    rep = certify(explicit_bound(name, fam.d, fam.s), fam, (lo, hi))
    assert rep.passed and rep.min_margin > 1
    assert rep.checked_points > 1000 and not rep.skipped


def test_certify_skips_below_threshold():
    rep = certify(explicit_bound("prop2-upper", 1, 1), ISO12, (1, 30), sampling="all")
    assert rep.skipped == list(range(1, 15))
    assert rep.checked_points == 16
    rep = certify(explicit_bound("prop2-upper", 1, 1), ISO12, (1, 10), sampling="all")
    assert rep.checked_points == 0 and len(rep.skipped) == 10 and rep.passed


def test_certify_detects_failure():
    # sigma_n is about 2/n, so a coefficient of 1 must be caught
    bad = replace(explicit_bound("prop2-upper", 1, 1), coefficient=1.0)
    rep = certify(bad, ISO12, (15, 2000))
    assert not rep.passed and rep.min_margin < 1
    assert all(lhs > rhs for _, lhs, rhs in rep.failures)


def test_report_invariant():
    for coef in (0.5, 1.0, 2.0, 2.1, 5.0):
        c = replace(explicit_bound("prop2-upper", 1, 1), coefficient=coef)
        rep = certify(c, ISO12, (15, 3000))
        assert rep.passed == (rep.min_margin >= 1)


def test_certify_family_mismatch():
    with pytest.raises(ValueError):
        certify(explicit_bound("prop2-upper", 1, 1), WeightFamily(ISO, 1, 1, 1), (15, 20))


def test_report_serialization():
    rep = certify(explicit_bound("cor12-upper", 1, 1), MIX12, (28, 40), sampling="all")
    obj = json.loads(json.dumps(rep.to_dict()))
    assert {"certificate", "family", "range", "failures", "min_margin"} <= set(obj)
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["n", "actual_lo", "actual_hi", "bound", "margin"]
    assert len(rows) == 1 + 13
    assert float(rows[1][4]) == rep.rows[0][4]


def test_certify_threads_identical():
    cert = explicit_bound("cor1-upper", 1, 1)
    a = certify(cert, ISO12, (15, 5000), threads=1)
    b = certify(cert, ISO12, (15, 5000), threads=4)
    assert a.to_csv() == b.to_csv()


def test_convergence_examples():
    tr = convergence_trace(limit_constant(ISO, "L2", 1, 2, 1), [10**4])
    assert 0.98 <= tr.ratios[0][1] <= 1.02
    tr = convergence_trace(limit_constant(ISO, "Linf", 1, 2, 1), [10**4])
    assert 0.98 <= tr.ratios[0][1] <= 1.02
    lo, hi = tr.bounds[0]
    assert lo <= tr.ratios[0][1] <= hi


def test_convergence_trace_shape():
    spec = limit_constant(MIX, "L2", 1, 1, 2)
    tr = convergence_trace(spec, geometric_grid(100, 10**4, 4))
    assert all(x > 0 for _, x in tr.ratios)
    assert tr.grid == sorted(set(tr.grid))
    with pytest.raises(ValueError):
        convergence_trace(spec, [1, 10])
    with pytest.raises(ValueError):
        convergence_trace(spec, [10, 10])


def test_sigma_at_oracle_scale():
    fam = WeightFamily(MIX, 1, 1, 2)
    assert sigma(fam, 10**5).value == brute_sigma(fam, 10**5)[-1]
