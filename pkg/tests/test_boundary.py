import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import herglotz_quad, random_positioned, random_step
from orlicz import PartitionMismatch, PositionUnrepresentable
from orlicz.boundary import (
    ModularValue,
    PositionedStepFunction,
    StepFunction,
    decreasing_bound_check,
    distribution,
    luxemburg,
    modular,
    nabla_threshold,
    outer_eval,
    pointwise_product,
    rearrange_decreasing,
    root_membership,
    thm32_extremal,
)
from orlicz.defining import ExpLin, ExpPow, Pow
from orlicz.numerics import LogScalar

seeds = st.integers(0, 2**32 - 1)


class TestStepFunction:
    def test_remainder_measure(self):
        f = StepFunction.from_measures([0.3, 0.2], [2.0, 5.0])
        assert math.exp(f.remainder_log_measure) == pytest.approx(0.5)

    def test_overfull_rejected(self):
        with pytest.raises(ValueError):
            StepFunction.from_measures([0.6, 0.6], [1.0, 1.0])

    def test_dict_roundtrip(self):
        f = StepFunction.from_measures([0.3, 0.2], [2.0, 5.0])
        assert StepFunction.from_dict(f.to_dict()) == f

    def test_root(self):
        f = StepFunction.from_measures([0.5], [16.0]).root(4)
        assert math.exp(f.log_values[0]) == pytest.approx(2.0)


class TestRearrangement:
    def test_example(self):
        f = StepFunction.from_measures([0.3, 0.2], [2.0, 5.0])
        g = rearrange_decreasing(f)
        lm, lv = g.explicit_arcs()
        np.testing.assert_allclose(np.exp(lm), [0.2, 0.3, 0.5])
        np.testing.assert_allclose(np.exp(lv), [5.0, 2.0, 1.0])

    def test_constant(self):
        f = StepFunction([], 1.5)
        lm, lv = rearrange_decreasing(f).explicit_arcs()
        assert list(lv) == [1.5] and lm[0] == 0.0

    @given(seeds)
    def test_idempotent(self, seed):
        arcs, rem = random_step(np.random.default_rng(seed))
        g = rearrange_decreasing(StepFunction(arcs, rem))
        assert rearrange_decreasing(g) == g

    @given(seeds)
    def test_modular_invariant(self, seed):
        arcs, rem = random_step(np.random.default_rng(seed))
        f = StepFunction(arcs, rem)
        for phi in (ExpPow(0.5), ExpLin(1.0), Pow(2.0)):
            a = modular(f, phi).value.log_value
            b = modular(rearrange_decreasing(f), phi).value.log_value
            assert a == b or abs(a - b) <= 1e-12 * max(1.0, abs(a))

    @given(seeds)
    def test_equimeasurable(self, seed):
        rng = np.random.default_rng(seed)
        arcs, rem = random_step(rng)
        f = StepFunction(arcs, rem)
        g = rearrange_decreasing(f)
        for level in rng.normal(0, 3, size=5):
            a, b = distribution(f, level).log_value, distribution(g, level).log_value
            assert a == b or abs(a - b) <= 1e-12


class TestDistribution:
    def test_example(self):
        f = StepFunction([(math.log(0.2), math.log(5))], 0.0)
        assert math.exp(distribution(f, math.log(2)).log_value) == pytest.approx(0.2)

    def test_above_max(self):
        f = StepFunction([(math.log(0.2), math.log(5))], 0.0)
        assert distribution(f, 10.0).is_zero()

    def test_strict_at_one(self):
        f = StepFunction.from_measures([0.2, 0.3], [5.0, 0.5])
        assert math.exp(distribution(f, LogScalar(0.0)).log_value) == pytest.approx(0.2)


class TestModular:
    def test_single_arc(self):
        phi = ExpPow(0.5)
        t0 = phi.invert_log(math.log(3.0))
        f = StepFunction([(math.log(0.1), t0)], -math.inf)
        assert modular(f, phi).value.value == pytest.approx(0.3, rel=1e-14)

    def test_modular_value_invariants(self):
        with pytest.raises(ValueError):
            ModularValue(LogScalar(1.0))
        with pytest.raises(ValueError):
            ModularValue(LogScalar.infinity(), None)


class TestLuxemburg:
    @pytest.mark.parametrize("m", [0.5, 0.1, 0.01])
    def test_indicator_exp_lin(self, m):
        # Phi(x) = x: norm of an indicator is its measure
        assert luxemburg(StepFunction.indicator(m), ExpLin(1.0)) == pytest.approx(m, rel=1e-12)

    def test_indicator_exp_pow_hand(self):
        # 1/Phi^{-1}(1/m); Phi^{-1}(2) sits on the affine completion e(1 + (t - 1)/2)
        assert luxemburg(StepFunction.indicator(0.5), ExpPow(0.5)) == pytest.approx(
            math.exp(-(1 + 2 * (2 / math.e - 1))), rel=1e-12
        )
        assert luxemburg(StepFunction.indicator(0.1), ExpPow(0.5)) == pytest.approx(math.exp(-math.log(10) ** 2), rel=1e-12)

    def test_mpmath_value(self):
        # value e^2 on half the circle, 1 elsewhere; mpmath findroot on the modular equation
        f = StepFunction([(math.log(0.5), 2.0)], 0.0)
        assert luxemburg(f, ExpPow(0.5)) == pytest.approx(4.611172833154486125890, rel=1e-12)

    @given(seeds, st.floats(-5, 5))
    def test_homogeneous(self, seed, log_lam):
        arcs, rem = random_step(np.random.default_rng(seed), 5)
        f = StepFunction(arcs, rem)
        phi = ExpPow(0.5)
        a = luxemburg(f, phi)
        b = luxemburg(f.shifted(log_lam), phi)
        assert b == pytest.approx(a * math.exp(log_lam), rel=1e-9)

    @given(seeds)
    def test_l1_case(self, seed):
        arcs, rem = random_step(np.random.default_rng(seed), 5)
        f = StepFunction(arcs, rem)
        lm, lv = f.explicit_arcs()
        l1 = math.fsum(np.exp(lm + lv).tolist())
        assert luxemburg(f, ExpLin(1.0)) == pytest.approx(l1, rel=1e-10)

    def test_zero_function(self):
        with pytest.raises(ValueError):
            luxemburg(StepFunction([], -math.inf), ExpLin(1.0))


class TestProduct:
    def test_levels_add(self):
        t, g = 5.0, 2.0
        f = StepFunction([(math.log(0.25), t)], -math.inf)
        h = StepFunction([(math.log(0.25), g)], -math.inf)
        p = pointwise_product(f, h)
        assert p.log_values[0] == t + g

    def test_unit_multiplier(self):
        f = StepFunction.from_measures([0.3, 0.2], [2.0, 5.0])
        one = StepFunction.from_measures([0.3, 0.2], [1.0, 1.0])
        assert pointwise_product(f, one) == f

    def test_mismatch(self):
        with pytest.raises(PartitionMismatch):
            pointwise_product(StepFunction.from_measures([0.3], [2.0]), StepFunction.from_measures([0.2], [2.0]))

    @given(seeds)
    def test_aligned_beats_antialigned(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        m = rng.dirichlet(np.ones(n)) * 0.999
        fv = np.sort(rng.normal(0, 1, n))[::-1]
        gv = np.sort(rng.normal(0, 1, n))[::-1]
        f = StepFunction(list(zip(np.log(m), fv)), -math.inf)
        g = StepFunction(list(zip(np.log(m), gv)), -math.inf)
        phi = ExpLin(1.0)
        a = modular(pointwise_product(f, g), phi).value.value
        b = modular(pointwise_product(f, g, "antialigned"), phi).value.value
        assert a >= b * (1 - 1e-12)


class TestOuter:
    def test_constant(self):
        f = PositionedStepFunction(((0.0, 1.0, math.log(3.0)),))
        for z in (0, 0.5j, -0.3 + 0.2j):
            assert outer_eval(f, z) == pytest.approx(complex(math.log(3.0), 0), abs=1e-14)

    def test_half_circle(self):
        f = PositionedStepFunction(((0.0, 0.5, 1.0),))
        assert outer_eval(f, 0).real == pytest.approx(0.5, abs=1e-15)

    @given(seeds)
    def test_geometric_mean(self, seed):
        arcs, rem = random_positioned(np.random.default_rng(seed))
        f = PositionedStepFunction(tuple(arcs), rem)
        covered = sum(a[1] for a in arcs)
        expect = sum(a[1] * a[2] for a in arcs) + (1 - covered) * rem
        assert outer_eval(f, 0).real == pytest.approx(expect, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_quadrature_oracle(self, seed):
        rng = np.random.default_rng(seed)
        arcs, rem = random_positioned(rng)
        f = PositionedStepFunction(tuple(arcs), rem)
        for _ in range(4):
            z = 0.85 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            assert abs(outer_eval(f, z) - herglotz_quad(arcs, rem, z)) <= 1e-8

    def test_measure_only_arcs(self):
        f = StepFunction([(-800.0, 1.0)], 0.0)
        with pytest.raises(PositionUnrepresentable):
            outer_eval(f, 0)

    def test_zero_on_positive_measure(self):
        with pytest.raises(PositionUnrepresentable):
            outer_eval(StepFunction.indicator(0.5), 0)

    def test_outside_disk(self):
        with pytest.raises(ValueError):
            outer_eval(PositionedStepFunction(((0.0, 0.5, 1.0),)), 1.0)


class TestExtremal:
    def test_w_values(self):
        w, _ = thm32_extremal(ExpPow(0.5), 1.0)
        assert math.exp(w(1.0)) == pytest.approx(math.e)
        assert math.exp(w(math.exp(-1))) == pytest.approx(math.e**2 / 4)

    def test_modular_total(self):
        phi = ExpPow(0.5)
        _, f = thm32_extremal(phi, 0.1)
        mv = modular(f, phi)
        assert abs(mv.value.value - math.e / 0.1) <= mv.error_bound
        assert mv.error_bound < 0.05

    def test_threshold(self):
        # mpmath root of ln w + 1.2 ln ln w = 1 - ln t in u = -ln t
        out = nabla_threshold(0.1, 0.2)
        assert out["u_star"] == pytest.approx(13.73485714088877790, rel=1e-10)
        t = out["t_star"] * 0.5
        w, _ = thm32_extremal(ExpPow(0.5), 0.1)
        lw = float(w(t))
        assert lw + 1.2 * math.log(lw) >= 1 - math.log(t)

    def test_threshold_needs_eps_above_eta(self):
        with pytest.raises(ValueError):
            nabla_threshold(0.2, 0.1)


class TestDecreasingBound:
    def test_constant(self):
        assert decreasing_bound_check(StepFunction([], 0.0), 1.0)["holds"]

    def test_boundary_case(self):
        f = StepFunction([(math.log(0.5), math.log(2.0))], -math.inf)
        out = decreasing_bound_check(f, 1.0)
        assert out["holds"] and out["worst_value"] == pytest.approx(1.0)

    @given(seeds)
    def test_random_decreasing(self, seed):
        arcs, rem = random_step(np.random.default_rng(seed))
        f = rearrange_decreasing(StepFunction(arcs, rem))
        lm, lv = f.explicit_arcs()
        integral = math.fsum(np.exp(lm + lv).tolist())
        assert decreasing_bound_check(f, integral)["holds"]

    def test_rejects_increasing(self):
        with pytest.raises(ValueError):
            decreasing_bound_check(StepFunction.from_measures([0.5], [0.5]), 1.0)


class TestRootMembership:
    def test_finite_first(self):
        f = StepFunction.from_measures([0.5], [3.0])
        assert root_membership(f, ExpPow(0.5), 5) == 1

    def test_square(self):
        # J(g) is moderate, J(g^2) passes the bound only after taking a root
        phi = ExpPow(0.5)
        g = StepFunction([(math.log(1e-3), 300.0)], 0.0)
        f = StepFunction([(math.log(1e-3), 600.0)], 0.0)
        assert modular(g, phi).value.value < 1e6 < modular(f, phi).value.value
        assert root_membership(f, phi, 5) == 2

    def test_none(self):
        f = StepFunction([(math.log(0.5), 1e6)], 0.0)
        assert root_membership(f, ExpPow(0.5), 3) is None
