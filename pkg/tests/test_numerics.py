import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orlicz.numerics import (
    Grid,
    LogScalar,
    SeriesKind,
    TowerScalar,
    Trend,
    basel_certificate,
    classify_trend,
    e_tower,
    harmonic_certificate,
    iterated,
    log_diff_exp,
    log_expm1,
    log_sum_exp,
    tower_compare,
)

finite_logs = st.floats(min_value=-5e5, max_value=5e5, allow_nan=False)


class TestLogSumExp:
    def test_one_plus_one(self):
        assert log_sum_exp([0.0, 0.0]).log_value == pytest.approx(math.log(2), rel=1e-15)

    def test_no_overflow(self):
        assert log_sum_exp([1000.0, 1000.0]).log_value == pytest.approx(1000 + math.log(2), rel=1e-15)

    def test_singleton(self):
        assert log_sum_exp([math.log(3)]).log_value == math.log(3)

    def test_empty_is_zero(self):
        assert log_sum_exp([]).is_zero()

    def test_accepts_logscalars_and_zeros(self):
        out = log_sum_exp([LogScalar.zero(), LogScalar(2.0), -math.inf])
        assert out.log_value == 2.0

    def test_infinite_term(self):
        assert log_sum_exp([0.0, math.inf]).log_value == math.inf

    @given(st.lists(finite_logs, min_size=1, max_size=30))
    def test_order_independent(self, xs):
        a = log_sum_exp(xs).log_value
        b = log_sum_exp(list(reversed(xs))).log_value
        c = log_sum_exp(sorted(xs)).log_value
        assert a == b == c

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=20))
    def test_matches_mpmath(self, xs):
        ref = float(mpmath.log(mpmath.fsum(mpmath.exp(x) for x in xs)))
        assert log_sum_exp(xs).log_value == pytest.approx(ref, rel=1e-13, abs=1e-13)

    @given(st.lists(finite_logs, min_size=1, max_size=20))
    def test_bounded_by_max(self, xs):
        out = log_sum_exp(xs).log_value
        m = max(xs)
        assert m <= out <= m + math.log(len(xs)) + 1e-9


class TestLogDiff:
    def test_known(self):
        assert log_diff_exp(math.log(5), math.log(2)) == pytest.approx(math.log(3), rel=1e-15)

    def test_equal_gives_zero_value(self):
        assert log_diff_exp(1.0, 1.0) == -math.inf

    def test_negative_difference_rejected(self):
        with pytest.raises(ValueError):
            log_diff_exp(0.0, 1.0)

    def test_expm1_small(self):
        assert log_expm1(1e-20) == pytest.approx(math.log(1e-20), rel=1e-15)


class TestTower:
    def test_e2_below_e3(self):
        assert tower_compare(e_tower(2), e_tower(3)) == -1

    def test_normalized_comparison(self):
        # 100 normalizes to (1, ln 100 = 4.605...) and ln 100 > 4
        assert tower_compare(TowerScalar(0, 100.0), TowerScalar(1, 4.0)) == 1
        assert 100 > math.exp(4)

    @pytest.mark.parametrize("k", range(0, 9))
    def test_equal(self, k):
        assert tower_compare(e_tower(k), e_tower(k)) == 0

    def test_iterated_log(self):
        out = iterated(2, "log", e_tower(3))
        assert out.to_float() == pytest.approx(math.e, rel=1e-15)

    def test_iterated_exp(self):
        assert tower_compare(iterated(1, "exp", e_tower(2)), e_tower(3)) == 0

    def test_log_of_half(self):
        assert iterated(1, "log", 0.5).to_float() == pytest.approx(math.log(0.5))

    def test_log_of_negative(self):
        with pytest.raises(ValueError):
            iterated(2, "log", 0.5)

    def test_level_budget(self):
        with pytest.raises(OverflowError):
            TowerScalar(9, 1.0)

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            iterated(1, "sideways", 2.0)

    def test_e4_not_a_float(self):
        assert e_tower(3).to_float() == pytest.approx(float(mpmath.e ** (mpmath.e ** mpmath.e)), rel=1e-12)
        assert e_tower(4).to_float() == math.inf

    @given(st.floats(1e-3, 1e300), st.floats(1e-3, 1e300))
    def test_compare_matches_floats(self, a, b):
        expect = (a > b) - (a < b)
        ta, tb = TowerScalar.from_float(a), TowerScalar.from_float(b)
        # normalization goes through log, so near-ties may tie
        if abs(a - b) > 1e-12 * max(a, b):
            assert tower_compare(ta, tb) == expect

    @given(st.floats(1e-3, 1e300))
    def test_roundtrip(self, x):
        assert TowerScalar.from_float(x).to_float() == pytest.approx(x, rel=1e-12)

    def test_scale_beyond_floats(self):
        big = e_tower(5).scale(0.5)
        assert tower_compare(big, e_tower(4)) == 1
        # ln(e_5 / 2) = e_4 - ln 2 and e_4 is not a double, so the halving is lost
        assert tower_compare(big, e_tower(5)) <= 0


class TestSeries:
    def test_basel(self):
        v = basel_certificate(10_000)
        assert v.kind is SeriesKind.CONVERGENT
        # mpmath: zeta(2) - zeta(2, 10001)
        assert v.partial_sum == pytest.approx(1.644834071848059769806, rel=1e-14)
        assert v.partial_sum <= math.pi**2 / 6 <= v.partial_sum + v.tail_bound

    def test_harmonic(self):
        v = harmonic_certificate(10_000)
        assert v.kind is SeriesKind.DIVERGENT
        assert v.lower_bound == pytest.approx(9.787606036044382264, rel=1e-14)
        assert v.to_dict()["kind"] == SeriesKind.DIVERGENT.value


class TestTrend:
    def test_bounded(self):
        xs = np.geomspace(1, 1e8, 100)
        assert classify_trend(xs, -np.log(xs)) is Trend.BOUNDED

    def test_unbounded(self):
        xs = np.geomspace(1, 1e8, 100)
        assert classify_trend(xs, xs**0.1) is Trend.UNBOUNDED

    def test_converging_increase_is_bounded(self):
        xs = np.geomspace(1, 1e8, 100)
        assert classify_trend(xs, 0.5 - xs**-0.5) is Trend.BOUNDED

    def test_short_sample(self):
        assert classify_trend([1, 2], [0, 1]) is Trend.INCONCLUSIVE


class TestGrid:
    def test_geometric_endpoints_exact(self):
        g = Grid.geometric(1.0, 1e8, 50)
        assert g.array()[0] == 1.0 and g.array()[-1] == 1e8

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            Grid((1.0, 1.0))

    def test_tower(self):
        g = Grid.tower([1, 2, 3])
        assert np.allclose(g.array(), [math.e, math.exp(math.e), math.exp(math.exp(math.e))])

    def test_geometric_needs_positive(self):
        with pytest.raises(ValueError):
            Grid.geometric(0.0, 1.0, 5)
