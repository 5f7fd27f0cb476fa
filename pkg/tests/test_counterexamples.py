import math

import numpy as np
import pytest

from orlicz import LevelExhaustion, SearchFailure
from orlicz.admissibility import Power
from orlicz.boundary import StepFunction, modular
from orlicz.counterexamples import (
    envelope_compliance,
    prop34_build,
    thm32_envelope,
    thm42_inclusion_check,
    thm43_refute,
)
from orlicz.defining import ExpPow, build_staircase_phi
from orlicz.numerics import SeriesKind

# mpmath, 40 digits
ZETA2 = 1.644934066848226436472
BASEL_1E4 = 1.644834071848059769806
HARMONIC_1E4 = 9.787606036044382264178
HARMONIC_100 = 5.187377517639620260805


@pytest.fixture(scope="module")
def prop34():
    return prop34_build(ExpPow(0.5), Power(1, 0.6), 10_000)


class TestProp34:
    def test_modular_f(self, prop34):
        mf = prop34.modular_f
        assert BASEL_1E4 - mf.error_bound <= mf.value.value <= ZETA2
        assert mf.value.value == pytest.approx(BASEL_1E4, rel=1e-12)
        assert mf.certificate.tail_bound <= 1e-4
        assert ZETA2 - 1e-4 <= mf.value.value

    def test_product_bound(self, prop34):
        assert prop34.product_lower_bound == pytest.approx(HARMONIC_1E4, rel=1e-14)
        assert prop34.product_lower_bound >= 9.78
        assert prop34.modular_product.value.value >= prop34.product_lower_bound
        assert prop34.modular_product.certificate.kind is SeriesKind.DIVERGENT

    def test_psi_modular_equal(self, prop34):
        a, b = prop34.modular_g.value.value, prop34.modular_f.value.value
        assert abs(a - b) <= 1e-12 * b

    def test_per_level(self, prop34):
        assert prop34.extra["per_level_ok"]
        # t_n comes from a bisection onto the crossing, so equality holds to rounding
        for row in prop34.level_data:
            assert row["log_ratio"] >= math.log(row["n"]) - 1e-12

    def test_product_terms_at_least_harmonic(self, prop34):
        prev = 0.0
        for row in prop34.level_data[:200]:
            # ln phi(t_n) ~ 1e4 cancels against ln eps_n, costing a few digits
            assert row["partial_product"] - prev >= (1.0 / row["n"]) * (1 - 1e-10)
            prev = row["partial_product"]

    def test_tenth_level(self):
        rep = prop34_build(ExpPow(0.5), Power(1, 0.6), 10)
        # mpmath root of sqrt(t + t^0.6) - sqrt(t) = ln 10
        assert rep.level_data[-1]["t_n"] == pytest.approx(4313834.914861920401, rel=1e-12)

    def test_monotone_in_n(self):
        a = prop34_build(ExpPow(0.5), Power(1, 0.6), 50).product_lower_bound
        b = prop34_build(ExpPow(0.5), Power(1, 0.6), 100).product_lower_bound
        assert b > a

    def test_csv(self, prop34):
        lines = prop34.to_csv().splitlines()
        assert lines[0].startswith("n,t_n")
        assert len(lines) == 10_001

    def test_admissible_gauge_fails(self):
        with pytest.raises(SearchFailure):
            prop34_build(ExpPow(0.5), Power(1, 0.5), 5)


@pytest.fixture(scope="module")
def staircase():
    return build_staircase_phi(1.5, 500)


class TestThm43:

    def test_k100(self, staircase):
        rep = thm43_refute(staircase, 100)
        assert rep.product_lower_bound == pytest.approx(HARMONIC_100, rel=1e-14)
        assert rep.product_lower_bound >= 5.18
        assert rep.extra["slope_inequality_holds"]

    def test_k1(self, staircase):
        assert thm43_refute(staircase, 1).product_lower_bound == 1.0

    def test_f_modular(self, staircase):
        rep = thm43_refute(staircase, 100)
        basel = math.fsum(1.0 / k**2 for k in range(1, 101))
        assert rep.modular_f.value.value == pytest.approx(basel, rel=1e-12)

    def test_levels_nondecreasing(self, staircase):
        rep = thm43_refute(staircase, 100)
        nk = [r["n_k"] for r in rep.level_data]
        assert all(a <= b for a, b in zip(nk, nk[1:]))

    def test_exhaustion(self):
        with pytest.raises(LevelExhaustion):
            thm43_refute(build_staircase_phi(1.5, 5), 100)


class TestThm42:
    def test_rows(self):
        out = thm42_inclusion_check(2, [4, 5, 6])
        assert out["eps_at_e3"] == 3.0
        assert all(r["inclusion_holds"] for r in out["rows"])
        for r in out["rows"]:
            assert r["ratio_exponent"] > 0.9 * r["n"] / 2
        assert out["non_admissible"]

    def test_exponent_values(self):
        rows = {r["n"]: r for r in thm42_inclusion_check(2, [4, 5, 6])["rows"]}
        assert rows[4]["ratio_exponent"] == pytest.approx(2.0, rel=1e-9)
        assert rows[6]["ratio_exponent"] == pytest.approx(3.0, rel=1e-9)

    def test_k_range(self):
        with pytest.raises(ValueError):
            thm42_inclusion_check(1, [4])

    def test_tower_budget(self):
        with pytest.raises(OverflowError):
            thm42_inclusion_check(2, [9])


class TestEnvelope:
    def test_value(self):
        env = thm32_envelope(ExpPow(0.5), 0.1)
        # ((ln(e/t))^2 - (ln w)^2) at t = 1e-6, mpmath
        assert env(1e-6) == pytest.approx(79.07049073156985216376, rel=1e-10)

    def test_unit_compliant(self):
        env = thm32_envelope(ExpPow(0.5), 0.1)
        g = StepFunction([(math.log(1e-3), 0.0)], 0.0)
        assert envelope_compliance(env, g)["compliant"]

    def test_violation(self):
        env = thm32_envelope(ExpPow(0.5), 0.1)
        v = 2 * env(1e-6)
        g = StepFunction([(math.log(1e-6), v)], 0.0)
        out = envelope_compliance(env, g)
        assert not out["compliant"] and out["arc"] == 0

    def test_envelope_grows(self):
        env = thm32_envelope(ExpPow(0.5), 0.1)
        vals = env(np.array([1e-9, 1e-6, 1e-3]))
        assert vals[0] > vals[1] > vals[2]
