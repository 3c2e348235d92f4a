import numpy as np
import pytest

from v2vbeam.channel import (
    ChannelParams,
    LinkBudgetSample,
    draw_shadowing_db,
    noise_power_dbm,
    path_loss_db,
    rate_bps,
    snr,
)

DEFAULTS = ChannelParams()


class TestChannelParams:
    def test_reference_defaults(self):
        assert DEFAULTS.carrier_freq == 60e9
        assert DEFAULTS.pathloss_exponent == 2.0
        assert DEFAULTS.shadowing_std_db == 5.8
        assert DEFAULTS.bandwidth == 2.16e9
        assert DEFAULTS.noise_figure_db == 6.0
        assert DEFAULTS.tx_power_dbm == 1.0
        assert DEFAULTS.noise_floor_dbm_per_hz == -174.0

    def test_wavelength(self):
        assert DEFAULTS.wavelength == pytest.approx(4.9965e-3, rel=1e-4)

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            ChannelParams(carrier_freq=0.0)
        with pytest.raises(ValueError):
            ChannelParams(bandwidth=-1.0)
        with pytest.raises(ValueError):
            ChannelParams(shadowing_std_db=-0.1)


class TestPathLoss:
    def test_one_meter_reference(self):
        assert path_loss_db(1.0, DEFAULTS) == pytest.approx(68.0, abs=0.05)

    def test_five_meters(self):
        assert path_loss_db(5.0, DEFAULTS) == pytest.approx(81.99, abs=0.02)

    def test_shadow_term_is_additive(self):
        base = path_loss_db(5.0, DEFAULTS)
        assert path_loss_db(5.0, DEFAULTS, shadow_db=3.7) == base + 3.7

    def test_exponent_sets_distance_slope(self):
        assert path_loss_db(10.0, DEFAULTS) - path_loss_db(5.0, DEFAULTS) \
            == pytest.approx(10 * 2.0 * np.log10(2.0))

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(ValueError):
            path_loss_db(0.0, DEFAULTS)

    def test_vectorized(self):
        d = np.array([1.0, 5.0, 10.0])
        pl = path_loss_db(d, DEFAULTS)
        assert pl.shape == (3,)
        assert np.all(np.diff(pl) > 0)


class TestNoisePower:
    def test_reference_value(self):
        assert noise_power_dbm(DEFAULTS) == pytest.approx(-74.655, abs=0.005)

    def test_unit_bandwidth_no_figure(self):
        p = ChannelParams(bandwidth=1.0, noise_figure_db=0.0)
        assert noise_power_dbm(p) == -174.0

    def test_noise_figure_shifts_db_for_db(self):
        lo = noise_power_dbm(ChannelParams(noise_figure_db=3.0))
        hi = noise_power_dbm(ChannelParams(noise_figure_db=6.0))
        assert hi - lo == pytest.approx(3.0)


class TestSnrAndRate:
    def test_equal_powers_give_unity(self):
        assert snr(-60.0, -60.0) == 1.0

    def test_linked_example_near_952(self):
        assert snr(-44.87, -74.655) == pytest.approx(952, rel=0.01)

    def test_monotone_in_rx_power(self):
        assert snr(-50.0, -74.655) > snr(-51.0, -74.655)

    def test_zero_snr_zero_rate(self):
        assert rate_bps(0.99, 2.16e9, 0.0) == 0.0

    def test_one_bit_per_second(self):
        assert rate_bps(1.0, 1.0, 1.0) == 1.0

    def test_linked_rate_example(self):
        assert rate_bps(0.99, 2.16e9, 952) == pytest.approx(21.2e9, rel=0.01)

    def test_monotone_in_each_argument(self):
        assert rate_bps(0.99, 2.16e9, 900) < rate_bps(0.99, 2.16e9, 952)
        assert rate_bps(0.8, 2.16e9, 952) < rate_bps(0.99, 2.16e9, 952)
        assert rate_bps(0.99, 1e9, 952) < rate_bps(0.99, 2.16e9, 952)


class TestLinkBudgetSample:
    def test_from_budget_holds_identity(self):
        s = LinkBudgetSample.from_budget(DEFAULTS, path_loss_db=81.99,
                                         gain1_db=18.06, gain2_db=18.06)
        assert s.rx_power_dbm == pytest.approx(
            DEFAULTS.tx_power_dbm + 18.06 + 18.06 - 81.99)
        assert s.snr_linear >= 0

    def test_inconsistent_decomposition_rejected(self):
        with pytest.raises(ValueError):
            LinkBudgetSample(path_loss_db=81.99, gain1_db=18.0, gain2_db=18.0,
                             rx_power_dbm=0.0, snr_linear=1.0,
                             tx_power_dbm=1.0)


class TestShadowing:
    def test_sample_std_matches_config(self):
        draws = draw_shadowing_db(DEFAULTS, 3, size=100_000)
        assert draws.std() == pytest.approx(5.8, rel=0.02)

    def test_deterministic_given_seed(self):
        a = draw_shadowing_db(DEFAULTS, 11, size=64)
        b = draw_shadowing_db(DEFAULTS, 11, size=64)
        np.testing.assert_array_equal(a, b)

    def test_scalar_draw(self):
        x = draw_shadowing_db(DEFAULTS, 0)
        assert np.isscalar(x) or np.ndim(x) == 0
