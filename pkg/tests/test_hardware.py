import math

import pytest
from hypothesis import given, strategies as st

import gigadc as g
from gigadc import units
from gigadc.errors import ConfigError, InfeasibleError

from conftest import rel_err


def test_decimal_unit_convention():
    # 800 Gbps is exactly 100 GB/s under decimal units.
    assert units.bytes_per_s(800e9) == 100 * units.GB
    assert units.GB == 1e9 and units.TB == 1e12
    assert g.GB200.scale_out_bw == 100e9
    assert g.GB200.scale_up_bw == 1.8e12


class TestProvision:
    def test_reference_fleet(self):
        p = g.provision(100e9, 0.7, g.NVL72)
        assert p.rack_count == 23333
        assert p.gpu_count == 1679976
        assert p.it_compute_power == 23333 * 130e3
        assert rel_err(p.total_dense_flops, 1.68e22) < 0.005

    def test_single_rack_budget(self):
        p = g.provision(3e6, 1.0, g.NVL72)
        assert p.rack_count == 1
        assert p.gpu_count == 72

    def test_invariants_hold(self):
        p = g.provision(5e8, 0.5, g.NVL72)
        assert p.gpu_count == p.rack_count * g.NVL72.gpus_per_rack
        assert p.it_compute_power == p.rack_count * g.NVL72.tdp

    def test_too_small_is_infeasible(self):
        with pytest.raises(InfeasibleError, match="infeasible"):
            g.provision(2e6, 1.0, g.NVL72)

    @given(st.floats(min_value=3e6, max_value=1e12),
           st.floats(min_value=3e6, max_value=1e12))
    def test_monotone_in_budget(self, b1, b2):
        lo, hi = sorted((b1, b2))
        assert (g.provision(lo, 1.0, g.NVL72).rack_count
                <= g.provision(hi, 1.0, g.NVL72).rack_count)


class TestPowerEnvelope:
    def test_reference_envelope(self):
        p = g.provision(100e9, 0.7, g.NVL72)
        env = g.power_envelope(p, 0.2, 1.15, 1.3)
        assert rel_err(env.it_power, 3.64e9) < 0.001
        # Published range is 4.16-4.71 GW from a rounded 3.6 GW intermediate;
        # the unrounded arithmetic gives 4.19-4.73 GW within 1%.
        assert rel_err(env.facility_power_min, 4.19e9) < 0.01
        assert rel_err(env.facility_power_max, 4.73e9) < 0.01

    def test_identity_envelope(self):
        p = g.provision(3e6, 1.0, g.NVL72)
        env = g.power_envelope(p, 0.0, 1.0, 1.0)
        assert env.it_power == p.it_compute_power
        assert env.facility_power_min == env.facility_power_max == p.it_compute_power

    def test_hand_arithmetic(self):
        # 1 MW compute, 20% overhead, PUE 1.2: 1e6 * 1.2 * 1.2 = 1.44 MW.
        p = g.Provisioning(rack_count=1, gpu_count=72,
                           total_dense_flops=720e15, it_compute_power=1e6)
        env = g.power_envelope(p, 0.2, 1.2, 1.2)
        assert math.isclose(env.facility_power_min, 1.44e6)
        assert math.isclose(env.facility_power_max, 1.44e6)

    @given(st.floats(min_value=1e3, max_value=1e10))
    def test_linear_in_compute_power(self, watts):
        base = g.Provisioning(1, 72, 720e15, watts)
        doubled = g.Provisioning(1, 72, 720e15, 2 * watts)
        e1 = g.power_envelope(base, 0.2, 1.15, 1.3)
        e2 = g.power_envelope(doubled, 0.2, 1.15, 1.3)
        assert math.isclose(e2.it_power, 2 * e1.it_power, rel_tol=1e-12)
        assert math.isclose(e2.facility_power_max, 2 * e1.facility_power_max,
                            rel_tol=1e-12)

    def test_bad_pue_rejected(self):
        p = g.provision(3e6, 1.0, g.NVL72)
        with pytest.raises(ValueError):
            g.power_envelope(p, 0.2, 0.9, 1.3)
        with pytest.raises(ValueError):
            g.power_envelope(p, 0.2, 1.3, 1.1)


class TestCooling:
    def test_heat_reuse_reference(self):
        # 52.66 TWh/yr at winter ERF 0.69 and 6300 kWh per household.
        households = g.heat_reuse_households(52.66e12, 0.69, 6.3e6)
        assert rel_err(households, 5.8e6) < 0.02

    def test_heat_reuse_trivials(self):
        assert g.heat_reuse_households(52.66e12, 0.0, 6.3e6) == 0
        assert g.heat_reuse_households(6.3e6, 1.0, 6.3e6) == 1

    def test_heat_reuse_zero_household_rejected(self):
        with pytest.raises(ValueError):
            g.heat_reuse_households(1e12, 0.5, 0.0)

    def test_free_air_area(self):
        # Direct division oracle: 5e9 / 2076 = 2.4084e6 m^2.
        assert math.isclose(g.free_air_area(5e9, 2076), 5e9 / 2076)
        assert rel_err(g.free_air_area(5e9), 2.409e6) < 0.001
        assert g.free_air_area(2076, 2076) == 1.0
        assert g.free_air_area(1e6, 2000) == 500.0

    def test_adiabatic_water_reference_and_scaling(self):
        assert g.adiabatic_water_range(5e9) == (1e5, 3.5e6)
        assert g.adiabatic_water_range(2.5e9) == (5e4, 1.75e6)
        assert g.adiabatic_water_range(10e9) == (2e5, 7e6)


class TestCatalog:
    def test_round_trip(self):
        data = g.DEFAULT_CATALOG.to_dict()
        assert g.HardwareCatalog.from_dict(data) == g.DEFAULT_CATALOG

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            g.HardwareCatalog.from_dict({"accelerator": {"memoryy_bytes": 1}})

    def test_invalid_spec_rejected(self):
        with pytest.raises(ValueError):
            g.AcceleratorSpec(memory_bytes=0, effective_flops=1,
                              scale_up_bw=1, scale_out_bw=1)
        with pytest.raises(ValueError):
            g.RackSpec(gpus_per_rack=0, cost=1, tdp=1, dense_flops=1)

    def test_grid_headroom_table(self):
        names = [ba.name for ba in g.GRID_HEADROOM]
        assert names == ["PJM", "SRP", "NEVP", "BPAT"]
        assert g.GRID_HEADROOM[0].max_available_mw == 9915
