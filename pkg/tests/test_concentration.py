import datetime as dt
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cryptohet.concentration import (
    COMPETITIVE,
    HIGH,
    MODERATE,
    classify_hhi,
    concentration_report,
    gini,
    hhi,
)
from cryptohet.errors import AllZero, NegativeValue, UnknownIndicator
from cryptohet.indicators import MarketSnapshot
from oracles import gini_mad_oracle, hhi_oracle

DAY = dt.date(2018, 12, 16)

# zero or normal floats: scaling a subnormal can underflow to an all-zero vector
nonneg = st.lists(st.one_of(st.just(0.0), st.floats(1e-200, 1e12)), min_size=1, max_size=200).filter(
    lambda v: sum(v) > 0)


class TestHHI:
    def test_monopoly(self):
        assert hhi([7.0]) == (1.0, 10000.0)

    def test_equal_four(self):
        raw, scaled = hhi([3.0] * 4)
        assert raw == pytest.approx(0.25, abs=1e-15)
        assert scaled == pytest.approx(2500, abs=1e-10)

    def test_fixture_matches_direct_sum(self):
        rng = np.random.default_rng(50)
        caps = list(np.exp(rng.normal(17, 2.5, 50)))
        assert abs(hhi(caps)[0] - hhi_oracle(caps)) < 1e-12

    def test_errors(self):
        with pytest.raises(AllZero):
            hhi([0.0, 0.0])
        with pytest.raises(AllZero):
            hhi([])
        with pytest.raises(NegativeValue):
            hhi([1.0, -2.0])

    @given(nonneg)
    def test_bounds_and_scaling(self, v):
        raw, scaled = hhi(v)
        assert 1 / len(v) - 1e-12 <= raw <= 1 + 1e-12
        assert scaled == 10000 * raw


class TestGini:
    @pytest.mark.parametrize("n", [1, 2, 3, 10, 999])
    def test_all_equal_is_zero(self, n):
        assert gini([4.2] * n) == 0.0

    @pytest.mark.parametrize("c", [1e-9, 1.0, 3.7, 1e12])
    def test_one_of_two(self, c):
        assert gini([0.0, c]) == 0.5
        assert gini([c, 0.0]) == 0.5

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 100, 3607])
    def test_one_holder(self, n):
        v = [0.0] * n
        v[n // 2] = 5.0
        assert gini(v) == (n - 1) / n

    def test_random_vectors_match_mad_oracle(self):
        rng = random.Random(3)
        for _ in range(200):
            n = rng.randint(1, 60)
            v = [rng.expovariate(1.0) * 10 ** rng.randint(-3, 6) for _ in range(n)]
            assert abs(gini(v) - gini_mad_oracle(v)) < 1e-10

    def test_errors(self):
        with pytest.raises(AllZero):
            gini([0.0])
        with pytest.raises(NegativeValue):
            gini([3.0, -0.1])

    @given(nonneg)
    def test_bounds(self, v):
        g = gini(v)
        assert 0 <= g <= (len(v) - 1) / len(v)


@given(nonneg, st.floats(1e-6, 1e6), st.randoms())
def test_scale_and_permutation_invariance(v, c, r):
    shuffled = list(v)
    r.shuffle(shuffled)
    scaled = [c * x for x in v]
    for f in (lambda x: hhi(x)[0], gini):
        base = f(v)
        assert abs(f(shuffled) - base) < 1e-12
        assert abs(f(scaled) - base) < 1e-12


@given(st.lists(st.floats(0.01, 1e6), min_size=3, max_size=100), st.randoms())
def test_merging_equal_holders_never_lowers_hhi(v, r):
    i, j = r.sample(range(len(v)), 2)
    v = list(v)
    v[j] = v[i]
    merged = [x for k, x in enumerate(v) if k not in (i, j)] + [2 * v[i]]
    assert hhi(merged)[0] >= hhi(v)[0] - 1e-15


class TestClassify:
    @pytest.mark.parametrize("x,cls", [
        (0, COMPETITIVE), (1194, COMPETITIVE), (1499.999, COMPETITIVE),
        (1500, MODERATE), (2000, MODERATE), (2500, MODERATE),
        (2500.001, HIGH), (3184, HIGH), (10000, HIGH),
    ])
    def test_thresholds(self, x, cls):
        assert classify_hhi(x) == cls


def snap(coin, **kw):
    return MarketSnapshot(coin, DAY, **kw)


class TestReport:
    def test_single_coin(self):
        (r,) = concentration_report([snap("btc", market_cap=5.0)], ["market_cap"])
        assert (r.hhi_raw, r.gini, r.hhi_class, r.n, r.skipped) == (1.0, 0.0, HIGH, 1, 0)
        assert r.hhi_scaled == 10000.0

    def test_two_equal_volume(self):
        (r,) = concentration_report([snap("a", volume_24h=9.0), snap("b", volume_24h=9.0)], ["volume_24h"])
        assert r.hhi_scaled == 5000.0 and r.gini == 0.0
        assert not r.disparity_flag

    def test_skips_absent_and_keeps_zero(self):
        snaps = [snap("a", facebook_likes=0, price=1.0), snap("b", facebook_likes=10), snap("c", price=2.0)]
        (r,) = concentration_report(snaps, ["facebook_likes"])
        assert (r.n, r.skipped) == (2, 1)
        assert r.gini == 0.5 and r.disparity_flag

    def test_unknown_indicator(self):
        with pytest.raises(UnknownIndicator):
            concentration_report([snap("a", price=1.0)], ["marketcap"])

    def test_all_zero(self):
        with pytest.raises(AllZero, match="facebook_likes"):
            concentration_report([snap("a", facebook_likes=0)], ["facebook_likes"])
