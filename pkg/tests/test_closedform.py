import math

import pytest
from hypothesis import given, strategies as st

from squeezelink import closedform, config, model
from squeezelink.closedform import (
    AdiabaticRates,
    DegenerateSqueeze,
    duan_sum_adiabatic_general,
    duan_sum_adiabatic_identical,
    duan_sum_nonadiabatic,
    duan_sum_strong_coupling_approx,
    duan_sum_weak_coupling_approx,
    field_sum_nonadiabatic,
    field_sum_strong_coupling_limit,
    is_entangled,
    minimum_power,
    threshold_cooperativity,
)
from squeezelink.model import SqueezedBath


def symmetric_rates(Gamma_a, gamma, n_th):
    return AdiabaticRates(
        Gamma_a1=Gamma_a, Gamma_a2=Gamma_a,
        Gamma_1=Gamma_a + gamma, Gamma_2=Gamma_a + gamma,
        n_th1=n_th, n_th2=n_th,
    )


class TestAdiabaticGeneral:
    def test_vacuum_inputs_reproduce_vacuum_variance(self):
        rates = symmetric_rates(Gamma_a=1e4, gamma=100.0, n_th=0.0)
        result = duan_sum_adiabatic_general(rates, SqueezedBath(r=0.0))
        assert result.total == pytest.approx(2.0, abs=1e-12)

    def test_symmetric_case_reduces_to_identical_formula(self):
        gamma, n_th, r = 880.0, 5.0, 1.3
        for C in (0.5, 3.0, 40.0):
            rates = symmetric_rates(Gamma_a=C * gamma, gamma=gamma, n_th=n_th)
            general = duan_sum_adiabatic_general(rates, SqueezedBath(r=r)).total
            identical = duan_sum_adiabatic_identical(C, r, n_th).total
            assert general == pytest.approx(identical, abs=1e-12)

    def test_asymmetric_drive_is_worse_than_symmetric(self):
        # brute-force scan: fixing the mean radiation-pressure rate, the
        # symmetric split minimizes the variance sum (gamma << Gamma_a)
        gamma, r, n_th = 1.0, 2.0, 0.0
        bath = SqueezedBath(r=r)
        mean_ga = 1e4
        symmetric = duan_sum_adiabatic_general(
            symmetric_rates(mean_ga, gamma, n_th), bath
        ).total
        for split in (0.25, 0.4, 2.0 / 3.0):
            ga1 = 2 * mean_ga * split
            ga2 = 2 * mean_ga - ga1
            rates = AdiabaticRates(
                Gamma_a1=ga1, Gamma_a2=ga2,
                Gamma_1=ga1 + gamma, Gamma_2=ga2 + gamma,
                n_th1=n_th, n_th2=n_th,
            )
            assert duan_sum_adiabatic_general(rates, bath).total > symmetric


class TestAdiabaticIdentical:
    def test_no_squeezing_floor(self):
        for C in (0.0, 1.0, 100.0):
            for n_th in (0.0, 2.0, 30.0):
                total = duan_sum_adiabatic_identical(C, 0.0, n_th).total
                assert total == pytest.approx(2.0 + 4.0 * n_th / (C + 1.0), rel=1e-12)
                assert total >= 2.0 - 1e-12

    def test_uncoupled_limit(self):
        for n_th in (0.0, 1.0, 7.5):
            total = duan_sum_adiabatic_identical(0.0, 1.7, n_th).total
            assert total == pytest.approx(2.0 * (1.0 + 2.0 * n_th), rel=1e-12)

    def test_reference_value(self):
        assert duan_sum_adiabatic_identical(15.0, 1.0, 5.0).total == pytest.approx(
            1.628754, abs=1e-6
        )

    @given(
        c1=st.floats(0.01, 1e4),
        factor=st.floats(1.01, 100.0),
        r=st.floats(0.01, 4.0),
        n_th=st.floats(0.0, 50.0),
    )
    def test_strictly_decreasing_in_cooperativity(self, c1, factor, r, n_th):
        lo = duan_sum_adiabatic_identical(c1, r, n_th).total
        hi = duan_sum_adiabatic_identical(c1 * factor, r, n_th).total
        assert hi < lo


class TestApproximations:
    def test_strong_coupling_limit(self):
        assert duan_sum_strong_coupling_approx(1e308, 1.0, 5.0) == pytest.approx(
            2.0 * math.exp(-2.0), rel=1e-12
        )

    def test_strong_coupling_close_to_exact(self):
        exact = duan_sum_adiabatic_identical(1e6, 1.0, 5.0).total
        approx = duan_sum_strong_coupling_approx(1e6, 1.0, 5.0)
        assert approx == pytest.approx(exact, abs=1e-4)

    def test_threshold_region_magnitude(self):
        approx = duan_sum_strong_coupling_approx(2.3, 1.0, 1.0)
        assert approx == pytest.approx(2.0 * math.exp(-2.0) + 4.0 / 2.3, rel=1e-12)
        assert 1.9 < approx < 2.1

    def test_weak_coupling_values(self):
        assert duan_sum_weak_coupling_approx(0.0, 1.0, 3.0) == pytest.approx(14.0)
        # overshoot above the exact value is first order in C
        exact = duan_sum_adiabatic_identical(0.01, 1.0, 0.0).total
        approx = duan_sum_weak_coupling_approx(0.01, 1.0, 0.0)
        assert approx - exact == pytest.approx(approx * 0.01 / 1.01, rel=1e-10)

    @given(C=st.floats(0.0, 1e6), r=st.floats(0.0, 10.0), n_th=st.floats(0.0, 100.0))
    def test_weak_coupling_never_below_two(self, C, r, n_th):
        assert duan_sum_weak_coupling_approx(C, r, n_th) >= 2.0


class TestNonadiabatic:
    def test_reference_value(self):
        total = duan_sum_nonadiabatic(15.0, 2.0, 5.0, 0.01, 1.0).total
        assert total == pytest.approx(1.613210, abs=1e-6)

    def test_reduces_to_adiabatic(self):
        for C in (0.5, 15.0, 90.0):
            full = duan_sum_nonadiabatic(C, 1.0, 5.0, 1e-8, 1.0).total
            adiab = duan_sum_adiabatic_identical(C, 1.0, 5.0).total
            assert full == pytest.approx(adiab, abs=1e-6)

    def test_more_dissipation_hurts(self):
        lo = duan_sum_nonadiabatic(15.0, 2.0, 5.0, 0.01, 1.0).total
        hi = duan_sum_nonadiabatic(15.0, 2.0, 5.0, 0.05, 1.0).total
        assert hi > lo


class TestFieldSum:
    def test_reference_value(self):
        total = field_sum_nonadiabatic(15.0, 1.0, 5.0, 6.5e-4, 1.0).total
        assert total == pytest.approx(0.283903, abs=1e-6)

    def test_lossless_mirror_limit(self):
        total = field_sum_nonadiabatic(15.0, 1.0, 5.0, 1e-15, 1.0).total
        assert total == pytest.approx(2.0 * math.exp(-2.0), rel=1e-9)

    def test_insensitive_to_cooperativity(self):
        t15 = field_sum_nonadiabatic(15.0, 1.0, 5.0, 6.5e-4, 1.0).total
        t90 = field_sum_nonadiabatic(90.0, 1.0, 5.0, 6.5e-4, 1.0).total
        assert abs(t90 - t15) <= 1e-3

    def test_strong_coupling_limit_form(self):
        limit = field_sum_strong_coupling_limit(1.0, 5.0, 6.5e-4, 1.0)
        assert limit == pytest.approx(0.2849612775110508, rel=1e-12)
        # the limit drops terms of order gamma/kappa, so the residual at
        # large C is set by the dissipation ratio, not by 1/C
        full = field_sum_nonadiabatic(1e6, 1.0, 5.0, 6.5e-4, 1.0).total
        assert full == pytest.approx(limit, abs=2 * math.exp(-2.0) * 6.5e-4)
        tight = field_sum_nonadiabatic(1e6, 1.0, 5.0, 1e-6, 1.0).total
        assert tight == pytest.approx(
            field_sum_strong_coupling_limit(1.0, 5.0, 1e-6, 1.0), abs=1e-5
        )

    def test_gamma_zero_in_limit_form(self):
        assert field_sum_strong_coupling_limit(0.7, 9.0, 0.0, 1.0) == pytest.approx(
            2.0 * math.exp(-1.4), rel=1e-12
        )


class TestThreshold:
    def test_reference_value(self):
        assert threshold_cooperativity(1.0, 1.0) == pytest.approx(2.313035, abs=1e-6)

    def test_zero_occupation_threshold_is_zero(self):
        for r in (0.1, 1.0, 3.0):
            assert threshold_cooperativity(r, 0.0) == 0.0

    def test_boundary_exactness(self):
        for r in (0.3, 1.0, 2.5):
            for n_th in (0.5, 1.0, 10.0):
                c_min = threshold_cooperativity(r, n_th)
                total = duan_sum_adiabatic_identical(c_min, r, n_th).total
                assert total == pytest.approx(2.0, abs=1e-10)
                assert duan_sum_adiabatic_identical(1.01 * c_min, r, n_th).total < 2.0
                assert duan_sum_adiabatic_identical(0.99 * c_min, r, n_th).total > 2.0

    def test_degenerate_squeeze(self):
        with pytest.raises(DegenerateSqueeze):
            threshold_cooperativity(0.0, 1.0)


class TestMinimumPower:
    def setup_method(self):
        self.unit = config.fig3_system().unit1

    def test_doubling_occupation_doubles_power(self):
        omega_M = self.unit.mirror.omega_M
        t1 = model.temperature_for_occupation(omega_M, 2.0)
        t2 = model.temperature_for_occupation(omega_M, 4.0)
        p1 = minimum_power(self.unit, 1.0, t1)
        p2 = minimum_power(self.unit, 1.0, t2)
        assert p2 == pytest.approx(2.0 * p1, rel=1e-9)

    def test_more_squeezing_needs_less_power(self):
        powers = [minimum_power(self.unit, r, 50e-6) for r in (0.5, 1.0, 2.0)]
        assert powers[0] > powers[1] > powers[2]

    def test_boundary_root(self):
        import dataclasses

        for r in (0.5, 1.0, 2.0):
            p_min = minimum_power(self.unit, r, 50e-6)
            unit = dataclasses.replace(
                self.unit, resonator=dataclasses.replace(self.unit.resonator, power=p_min)
            )
            ss = model.mean_fields_from_effective_detuning(unit, -unit.mirror.omega_M)
            n_th = model.thermal_occupation(unit.mirror.omega_M, 50e-6)
            total = duan_sum_adiabatic_identical(ss.C, r, n_th).total
            assert total == pytest.approx(2.0, abs=1e-8)

    def test_diagnostic_ratio_is_two(self):
        p_min = minimum_power(self.unit, 1.0, 50e-6)
        p_diag = closedform.diagnostic_minimum_power(self.unit, 1.0, 50e-6)
        assert p_diag / p_min == pytest.approx(2.0, rel=1e-9)


class TestVerdict:
    def test_boundary_semantics(self):
        assert is_entangled(0.0)
        assert is_entangled(1.9999)
        assert not is_entangled(2.0)
        assert not is_entangled(2.5)

    def test_negative_total_rejected(self):
        with pytest.raises(ValueError):
            is_entangled(-0.1)

    def test_result_exposes_xy_symmetry(self):
        result = duan_sum_adiabatic_identical(15.0, 1.0, 5.0)
        assert result.var_X == result.var_Y
        assert result.total == result.var_X + result.var_Y
