import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from m2msim.channel import (
    BLUETOOTH,
    LTE,
    WIFI,
    ZWAVE,
    FadingParams,
    LinkKind,
    LinkRealization,
    RfInterfaceSpec,
    db_to_linear,
    draw_gain_components,
    link_capacity,
    m2m_sinr_matrix,
    noise_power,
    path_loss_db,
    sample_link,
    sinr,
    two_hop_rate,
)

rates = st.floats(min_value=0.0, max_value=1e9, allow_nan=False)


@pytest.fixture
def params():
    return FadingParams()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


class TestInterfaceTable:
    def test_default_radio_parameters(self):
        assert (WIFI.uplink_center_frequency, WIFI.total_bandwidth, WIFI.max_device_rate, WIFI.max_range) == (
            5600.0,
            20e6,
            54e6,
            120.0,
        )
        assert (BLUETOOTH.total_bandwidth, BLUETOOTH.machine_tx_power, BLUETOOTH.max_range) == (1e6, 2.5e-3, 10.0)
        assert (ZWAVE.uplink_center_frequency, ZWAVE.total_bandwidth, ZWAVE.max_device_rate) == (908.42, 200e3, 100e3)
        assert (LTE.machine_tx_power, LTE.bs_tx_power, LTE.max_range, LTE.max_channels) == (0.2, 10.0, 1000.0, 128)
        assert LTE.kind is LinkKind.M2B and WIFI.kind is LinkKind.M2M

    @pytest.mark.parametrize(
        "field, value",
        [("total_bandwidth", 0.0), ("max_device_rate", -1.0), ("max_range", 0.0), ("machine_tx_power", 0.0)],
    )
    def test_rejects_nonpositive_fields(self, field, value):
        kwargs = dict(
            name="x",
            uplink_center_frequency=1.0,
            total_bandwidth=1.0,
            machine_tx_power=1.0,
            bs_tx_power=1.0,
            max_device_rate=1.0,
            max_range=1.0,
        )
        kwargs[field] = value
        with pytest.raises(ValueError):
            RfInterfaceSpec(**kwargs)

    def test_fading_defaults(self, params):
        assert params.shadowing_std_db == 8.0
        assert params.rayleigh_scale == 1.0
        assert params.path_loss_exponent == 4.0
        assert params.reference_distance == 10.0


class TestPathLoss:
    @pytest.mark.parametrize("d, expected", [(10.0, 0.0), (100.0, 40.0), (1.0, -40.0), (1000.0, 80.0)])
    def test_examples(self, params, d, expected):
        assert path_loss_db(d, params) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("d", [0.0, -5.0, float("nan")])
    def test_nonpositive_distance_is_an_error(self, params, d):
        with pytest.raises(ValueError):
            path_loss_db(d, params)

    def test_vectorized(self, params):
        out = path_loss_db(np.array([10.0, 100.0]), params)
        np.testing.assert_allclose(out, [0.0, 40.0], atol=1e-12)

    @given(st.floats(min_value=0.1, max_value=1e4), st.floats(min_value=0.1, max_value=1e4))
    def test_monotone_in_distance(self, d1, d2):
        lo, hi = sorted((d1, d2))
        assert path_loss_db(lo) <= path_loss_db(hi)


class TestSampling:
    def test_zero_terms_give_zero_gain(self):
        link = LinkRealization(path_loss_db(10.0), 0.0, 20.0 * math.log10(1.0))
        assert link.gain_db == 0.0
        assert link.gain_linear == 1.0

    def test_same_seed_same_link(self, params):
        a = sample_link(50.0, params, np.random.default_rng(9))
        b = sample_link(50.0, params, np.random.default_rng(9))
        assert a == b

    def test_gain_composition_is_exact(self, params, rng):
        for d in (3.0, 10.0, 77.5, 420.0):
            link = sample_link(d, params, rng)
            assert link.gain_db == -link.path_loss_db + link.shadowing_db + link.fading_db
            # reordered, the sum is zero up to rounding of the magnitudes involved
            scale = abs(link.path_loss_db) + abs(link.shadowing_db) + abs(link.fading_db)
            residual = link.gain_db + link.path_loss_db - link.shadowing_db - link.fading_db
            assert abs(residual) <= 4 * np.finfo(float).eps * scale

    def test_zero_shadowing_std_gives_deterministic_shadow(self, rng):
        p = FadingParams(shadowing_std_db=0.0)
        _, sh, _ = draw_gain_components(np.full(100, 30.0), p, rng)
        assert np.all(sh == 0.0)

    def test_rayleigh_power_has_unit_mean_at_scale_one_over_sqrt2(self, rng):
        # E[a^2] = 2 sigma^2 for a Rayleigh amplitude
        p = FadingParams(rayleigh_scale=1 / math.sqrt(2))
        _, _, fd = draw_gain_components(np.full(200_000, 30.0), p, rng)
        assert np.mean(db_to_linear(fd)) == pytest.approx(1.0, abs=0.01)

    def test_shadowing_statistics(self, params, rng):
        _, sh, _ = draw_gain_components(np.full(100_000, 50.0), params, rng)
        assert abs(sh.mean()) < 0.1
        assert abs(sh.std() - 8.0) < 0.2


class TestSinr:
    def test_unit_ratio(self):
        assert sinr(1e-3, 1.0, (), 1e-3) == 1.0

    def test_with_interference(self):
        assert sinr(4.0, 1.0, [(1.0, 1.0), (2.0, 1.0)], 1.0) == 1.0

    def test_zero_signal(self):
        assert sinr(0.0, 1.0, [(1.0, 1.0)], 1.0) == 0.0

    def test_bad_noise(self):
        with pytest.raises(ValueError):
            sinr(1.0, 1.0, (), 0.0)

    def test_matrix_matches_scalar_formula(self):
        noise = 6.324555320336759e-07
        gain = np.array([[1e-2], [1e-3]])
        out = m2m_sinr_matrix(0.1, gain, noise)
        assert out[0, 0] == pytest.approx(9.937151932873947, rel=1e-12)
        assert out[1, 0] == pytest.approx(0.0999367944215144, rel=1e-12)
        assert out[0, 0] == pytest.approx(sinr(0.1, 1e-2, [(0.1, 1e-3)], noise), rel=1e-12)

    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=6))
    def test_matrix_single_relay_agrees_with_sinr(self, gains):
        g = np.array(gains)[:, None]
        out = m2m_sinr_matrix(0.5, g, 1e-3)
        for i, gi in enumerate(gains):
            others = [(0.5, gj) for j, gj in enumerate(gains) if j != i]
            assert out[i, 0] == pytest.approx(sinr(0.5, gi, others, 1e-3), rel=1e-9, abs=1e-12)


class TestNoise:
    def test_thermal_one_hertz(self):
        assert noise_power(1.0, FadingParams(noise_psd=-174.0)) == pytest.approx(3.981071705534986e-21, rel=1e-12)

    def test_default_over_200_khz(self):
        assert noise_power(200e3) == pytest.approx(6.324555320336759e-07, rel=1e-12)


class TestCapacity:
    def test_shannon_example(self):
        assert link_capacity(1e6, 3.0, WIFI, 10.0) == pytest.approx(2e6)

    def test_wifi_rate_cap(self):
        assert link_capacity(20e6, 1e6, WIFI, 50.0) == 54e6

    def test_bluetooth_range_gate(self):
        assert link_capacity(200e3, 1e3, BLUETOOTH, 11.0) == 0.0
        assert link_capacity(200e3, 1e3, BLUETOOTH, 10.0) > 0.0

    def test_bandwidth_gate(self):
        assert link_capacity(400e3, 1e3, ZWAVE, 1.0) == 0.0
        assert link_capacity(200e3, 1e3, ZWAVE, 1.0) == 100e3

    @pytest.mark.parametrize("b, s", [(0.0, 1.0), (1.0, -0.5)])
    def test_invalid_inputs(self, b, s):
        with pytest.raises(ValueError):
            link_capacity(b, s, WIFI, 1.0)

    @given(
        st.floats(min_value=1.0, max_value=20e6),
        st.floats(min_value=0.0, max_value=1e8),
        st.floats(min_value=0.0, max_value=1e8),
    )
    def test_monotone_in_sinr(self, b, s1, s2):
        lo, hi = sorted((s1, s2))
        assert link_capacity(b, lo, WIFI, 5.0) <= link_capacity(b, hi, WIFI, 5.0)

    @given(
        st.floats(min_value=1.0, max_value=20e6),
        st.floats(min_value=1.0, max_value=20e6),
        st.floats(min_value=0.0, max_value=1e8),
    )
    def test_monotone_in_bandwidth(self, b1, b2, s):
        lo, hi = sorted((b1, b2))
        assert link_capacity(lo, s, WIFI, 5.0) <= link_capacity(hi, s, WIFI, 5.0)

    @given(
        st.sampled_from([WIFI, BLUETOOTH, ZWAVE, LTE]),
        st.floats(min_value=1.0, max_value=30e6),
        st.floats(min_value=0.0, max_value=1e12),
        st.floats(min_value=0.0, max_value=2000.0),
    )
    @settings(max_examples=200)
    def test_cap_and_range_gate(self, spec, b, s, d):
        out = link_capacity(b, s, spec, d)
        assert 0.0 <= out <= spec.max_device_rate
        if d > spec.max_range:
            assert out == 0.0


class TestTwoHop:
    @pytest.mark.parametrize("a, b, expected", [(5, 3, 3), (0, 7, 0), (4.5, 4.5, 4.5)])
    def test_examples(self, a, b, expected):
        assert two_hop_rate(a, b) == expected

    def test_negative_is_error(self):
        with pytest.raises(ValueError):
            two_hop_rate(-1, 2)

    @given(rates, rates)
    def test_bounded_by_each_hop(self, a, b):
        r = two_hop_rate(a, b)
        assert r <= a and r <= b
