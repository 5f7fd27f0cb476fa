import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orlicz import GapError, RangeError
from orlicz.admissibility import (
    AdmissibilityReport,
    IterLog,
    LogWeighted,
    PiecewiseConcave,
    Power,
    SqrtEps,
    Verdict,
    check_gap_divergence,
    check_tilde_delta,
    check_tilde_nabla,
    compose_psi,
    dyadic_gamma,
    dyadic_levels,
    eps_tower_slope,
    optimal_power_gamma,
)
from orlicz.defining import ExpIterLog, ExpLin, ExpPow, LogPow, Pow
from orlicz.numerics import Grid, SeriesKind, e_tower

GRID = Grid.geometric(1.0, 1e8, 200)


class TestTildeDelta:
    def test_model_limit(self):
        rep = check_tilde_delta(ExpPow(0.5), Power(1, 0.5), GRID)
        assert rep.verdict is Verdict.ADMISSIBLE
        assert math.exp(rep.ratio_samples[-1][1]) == pytest.approx(math.exp(0.5), abs=1e-3)
        assert rep.limit_estimate == pytest.approx(math.exp(0.5), rel=1e-6)

    def test_too_large_gauge(self):
        rep = check_tilde_delta(ExpPow(0.5), Power(1, 0.6), GRID)
        assert rep.verdict is Verdict.NON_ADMISSIBLE
        # exponent 0.5 t^0.1 to leading order at t = 1e8
        assert rep.ratio_samples[-1][1] == pytest.approx(0.5 * 1e8**0.1, rel=0.01)

    def test_pow_identity_gauge(self):
        rep = check_tilde_delta(Pow(2.0), Power(1, 1), Grid.geometric(2.0, 1e8, 100))
        assert rep.verdict is Verdict.ADMISSIBLE
        assert all(r == pytest.approx(math.log(4.0), rel=1e-12) for _, r in rep.ratio_samples)

    def test_report_dict(self):
        d = check_tilde_delta(ExpPow(0.5), Power(1, 0.5), GRID).to_dict()
        assert d["verdict"] == "admissible_evidence"
        assert d["growth_factor"] == 10.0

    def test_non_admissible_needs_growth(self):
        with pytest.raises(ValueError):
            AdmissibilityReport(0.1, [(1.0, 0.0), (10.0, 0.1), (100.0, 0.05)], Verdict.NON_ADMISSIBLE)

    @given(st.floats(0.1, 0.9), st.floats(0.25, 4.0))
    def test_optimal_limit(self, alpha, C):
        gamma = optimal_power_gamma(alpha, C)
        assert gamma(7.0) == pytest.approx(C * 7.0 ** (1 - alpha))
        t = 1e12
        lr = float(ExpPow(alpha).log_ratio(t, gamma(t)))
        # (1 + C t^-alpha)^alpha - 1 times t^alpha, then to the limit alpha C
        assert lr == pytest.approx(alpha * C, rel=5 * C * t**-alpha + 1e-9)

    def test_optimal_examples(self):
        assert optimal_power_gamma(0.5, 1) == Power(1, 0.5)
        rep = check_tilde_delta(ExpPow(0.5), optimal_power_gamma(0.5, 2), GRID)
        assert rep.limit_estimate == pytest.approx(math.e, rel=1e-5)


class TestTildeNabla:
    def test_log_weighted_holds(self):
        rep = check_tilde_nabla(ExpPow(0.5), LogWeighted(0.5, 0.1), 0.05, Grid.geometric(1e4, 1e8, 200))
        assert rep.verdict is Verdict.ADMISSIBLE
        assert rep.extra["first_failure"] is None

    def test_eta_zero_fails(self):
        rep = check_tilde_nabla(ExpPow(0.5), LogWeighted(0.5, 0.0), 0.05, Grid.geometric(1e4, 1e8, 200))
        assert rep.verdict is Verdict.NON_ADMISSIBLE or rep.extra["min_margin"] < 0
        assert rep.extra["first_failure"] is not None

    def test_exp_lin(self):
        rep = check_tilde_nabla(ExpLin(1.0), Power(1, 1), 1.0, Grid.geometric(8.0, 1e3, 50))
        assert rep.verdict is Verdict.ADMISSIBLE
        for (s, lr), (_, m) in zip(rep.ratio_samples, rep.extra["margins"]):
            assert lr == pytest.approx(s)
            assert m == pytest.approx(s - 2 * math.log(s), rel=1e-12, abs=1e-12)

    def test_bad_eps(self):
        with pytest.raises(RangeError):
            check_tilde_nabla(ExpLin(1.0), Power(1, 1), 0.0, GRID)


class TestGauges:
    def test_power_inverse(self):
        g = Power(2.0, 0.5)
        assert g.inverse(g(9.0)) == pytest.approx(9.0)

    def test_power_range(self):
        with pytest.raises(RangeError):
            Power(1, 1.5)

    def test_iterlog(self):
        g = IterLog(2, 1.5)
        assert g.floor == pytest.approx(math.exp(math.e))
        assert g(e_tower(3).to_float()) == pytest.approx(1.5 * math.e)
        assert g.inverse(g(1e6)) == pytest.approx(1e6, rel=1e-12)

    def test_eps_tower_knots(self):
        assert eps_tower_slope(e_tower(3).to_float()) == 3.0
        assert eps_tower_slope(e_tower(2).to_float()) == pytest.approx(2.0)
        assert eps_tower_slope(math.e) == pytest.approx(1.0)

    def test_sqrt_eps(self):
        t = e_tower(3).to_float()
        assert SqrtEps()(t) == pytest.approx(3 * math.sqrt(t))

    @given(st.floats(1.0, 1e6))
    def test_generic_inverse(self, y):
        g = LogWeighted(0.5, 0.1)
        y = y + float(g(g.floor))
        assert float(g(g.inverse(y))) == pytest.approx(y, rel=1e-10)

    def test_piecewise_rejects_convex(self):
        with pytest.raises(ValueError):
            PiecewiseConcave([0, 1, 2], [0, 1, 3])

    def test_piecewise_inverse(self):
        g = PiecewiseConcave([1, 2, 4], [1, 3, 4])
        for y in (0.5, 1, 2, 3.5, 10):
            assert float(g(g.inverse(y))) == pytest.approx(y)

    @given(st.floats(1.0, 1e12), st.floats(1.0, 1e12))
    def test_gauges_concave_increasing(self, a, b):
        a, b = min(a, b), max(a, b)
        m = 0.5 * (a + b)
        for g in (Power(1, 0.5), LogWeighted(0.5, 0.1), IterLog(1, 1.0)):
            lo = max(a, g.floor)
            hi = max(b, g.floor)
            mid = 0.5 * (lo + hi)
            assert float(g(hi)) >= float(g(lo))
            assert float(g(mid)) >= 0.5 * (float(g(lo)) + float(g(hi))) - 1e-9 * abs(float(g(hi)))
        del m


class TestDyadic:
    def test_exp_iterlog_levels(self):
        ns, ts = dyadic_levels(ExpIterLog(1), 40)
        np.testing.assert_allclose(ts / np.log(ts), ns * math.log(2), rtol=1e-12)

    def test_exp_iterlog_gamma(self):
        gamma, rep = dyadic_gamma(ExpIterLog(1), 60)
        assert rep.verdict is Verdict.ADMISSIBLE
        assert rep.sup_log_ratio <= math.log(4) + 1e-9
        assert np.all(np.diff(gamma.slopes) <= 1e-9)

    def test_exp_lin_gap_error(self):
        with pytest.raises(GapError):
            dyadic_gamma(ExpLin(1.0), 30)

    def test_pow_one(self):
        ns, ts = dyadic_levels(Pow(1.0), 20)
        np.testing.assert_allclose(ts, 2.0**ns, rtol=1e-12)
        _, rep = dyadic_gamma(Pow(1.0), 20)
        assert rep.verdict is Verdict.ADMISSIBLE

    def test_gap_divergence(self):
        v, gaps = check_gap_divergence(ExpIterLog(1), 40)
        assert v.kind is SeriesKind.DIVERGENT
        assert np.all(np.diff(gaps) > 0)

    def test_gaps_constant(self):
        v, gaps = check_gap_divergence(ExpLin(2.0), 30)
        assert v.kind is SeriesKind.INCONCLUSIVE
        np.testing.assert_allclose(gaps, math.log(2) / 2, rtol=1e-12)

    def test_gaps_exp_pow(self):
        ns, ts = dyadic_levels(ExpPow(0.5), 30)
        np.testing.assert_allclose(ts, (ns * math.log(2)) ** 2, rtol=1e-12)


class TestComposePsi:
    @pytest.mark.parametrize("t", [1.0, 10.0, 100.0])
    def test_h1_identity(self, t):
        psi = compose_psi(ExpPow(0.5), Power(1, 0.5))
        assert float(psi.log_value(t)) == pytest.approx(t, rel=1e-12)

    @pytest.mark.parametrize("alpha,C", [(0.5, 2.0), (0.25, 1.0), (0.6, 0.5)])
    def test_model_family(self, alpha, C):
        psi = compose_psi(ExpPow(alpha), Power(C, 1 - alpha))
        d = C ** (-alpha / (1 - alpha))
        # past gamma(floor) where no completion is involved
        for t in (50.0, 500.0):
            assert float(psi.log_value(t)) == pytest.approx(d * t ** (alpha / (1 - alpha)), rel=1e-12)

    def test_log_pow(self):
        alpha, p = 2.0, 0.5
        psi = compose_psi(LogPow(alpha), Power(1, p))
        for t in (10.0, 1e3):
            assert float(psi.log_value(t)) == pytest.approx((1 / p) ** alpha * math.log(t) ** alpha, rel=1e-12)

    def test_dilated(self):
        psi = compose_psi(ExpPow(0.5), Power(1, 0.5)).dilated(3)
        assert float(psi.log_value(5.0)) == pytest.approx(15.0)

    def test_invert(self):
        psi = compose_psi(ExpPow(0.5), Power(1, 0.5))
        assert psi.invert_log(42.0) == pytest.approx(42.0)
