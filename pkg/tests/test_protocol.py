import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from v2vbeam.geometry import LinkState, los_true
from v2vbeam.protocol import (
    FRAME_ERROR_MARGIN_DB,
    FrameConfig,
    LengthMismatch,
    MissingAnchor,
    MissingPrediction,
    PointingPolicy,
    PolicyVariant,
    efficiency,
    estimate_los,
    frame_ok,
    measured_distances,
    min_snr_margin_db,
    pointing_angles,
)

CONV = PointingPolicy(PolicyVariant.CONVENTIONAL_BA)
SENSOR = PointingPolicy(PolicyVariant.SENSOR_AIDED, ranging_std=0.1)
IDEAL = PointingPolicy(PolicyVariant.IDEAL_ORACLE)


def links_from_heights(h1s, h2s, d=5.0, d_hat=None):
    d_hat = d if d_hat is None else d_hat
    return [LinkState(i, h1, h2, d, d_hat)
            for i, (h1, h2) in enumerate(zip(h1s, h2s))]


class TestFrameConfig:
    def test_reference_defaults(self):
        f = FrameConfig()
        assert f.bi_duration == 0.010
        assert f.signaling_overhead == 1e-4
        assert f.ba_overhead == 1.9e-3
        assert f.time_step == 2e-3
        assert f.distance_update_period == 0.2
        assert f.steps_per_bi == 5
        assert f.steps_per_distance_update == 100

    def test_step_must_divide_bi(self):
        with pytest.raises(ValueError):
            FrameConfig(bi_duration=0.011)

    def test_overheads_must_fit(self):
        with pytest.raises(ValueError):
            FrameConfig(bi_duration=0.002, signaling_overhead=1e-4,
                        ba_overhead=1.9e-3)

    def test_signaling_must_be_positive(self):
        with pytest.raises(ValueError):
            FrameConfig(signaling_overhead=0.0)


class TestEfficiency:
    def test_conventional_at_10ms(self):
        assert efficiency(CONV, FrameConfig()) == pytest.approx(0.8, abs=1e-12)

    def test_sensor_at_10ms(self):
        assert efficiency(SENSOR, FrameConfig()) == pytest.approx(0.99, abs=1e-12)

    def test_ideal_is_unity(self):
        assert efficiency(IDEAL, FrameConfig()) == 1.0

    def test_zero_ba_overhead_equalizes(self):
        f = FrameConfig(ba_overhead=0.0)
        assert efficiency(CONV, f) == efficiency(SENSOR, f)

    @settings(max_examples=50, deadline=None)
    @given(tbi_ms=st.integers(min_value=5, max_value=100))
    def test_gap_is_ba_share_of_bi(self, tbi_ms):
        f = FrameConfig(bi_duration=tbi_ms * 1e-3, time_step=1e-3)
        gap = efficiency(SENSOR, f) - efficiency(CONV, f)
        assert gap == pytest.approx(f.ba_overhead / f.bi_duration, abs=1e-12)


class TestEstimateLos:
    def test_ideal_returns_true_los(self):
        links = links_from_heights([0.52, 0.49], [1.01, 0.98])
        out = estimate_los(IDEAL, links)
        np.testing.assert_array_equal(
            out, los_true(np.array([0.52, 0.49]), np.array([1.01, 0.98]), 5.0))

    def test_sensor_with_perfect_inputs_matches_true_los(self):
        h1 = [0.52, 0.49]
        h2 = [1.01, 0.98]
        links = links_from_heights(h1, h2)
        out = estimate_los(SENSOR, links, predicted_h2=h2)
        np.testing.assert_array_equal(out, estimate_los(IDEAL, links))

    def test_conventional_static_scene_with_zero_noise(self):
        links = links_from_heights([0.5] * 4, [1.0] * 4)
        out = estimate_los(CONV, links, ba_anchor=1.0, ba_noise=0.0)
        np.testing.assert_allclose(out, np.arctan(0.1), rtol=1e-15)

    def test_conventional_requires_anchor(self):
        links = links_from_heights([0.5], [1.0])
        with pytest.raises(MissingAnchor):
            estimate_los(CONV, links, ba_noise=0.0)

    def test_sensor_requires_prediction(self):
        links = links_from_heights([0.5], [1.0])
        with pytest.raises(MissingPrediction):
            estimate_los(SENSOR, links)

    def test_sensor_prediction_length_checked(self):
        links = links_from_heights([0.5, 0.5], [1.0, 1.0])
        with pytest.raises(LengthMismatch):
            estimate_los(SENSOR, links, predicted_h2=[1.0])

    def test_conventional_noise_drawn_once_per_call(self):
        links = links_from_heights([0.5] * 5, [1.0] * 5)
        rng = np.random.default_rng(0)
        out = estimate_los(CONV, links, ba_anchor=1.0, rng=rng, theta_3db=0.01)
        offsets = out - np.arctan(0.1)
        # same n_BA applied at every step of the BI
        np.testing.assert_allclose(offsets, offsets[0], atol=1e-15)
        assert abs(offsets[0]) <= 0.01

    def test_sensor_uses_measured_distance(self):
        links = links_from_heights([0.5], [1.0], d=5.0, d_hat=6.0)
        out = estimate_los(SENSOR, links, predicted_h2=[1.0])
        assert out[0] == pytest.approx(np.arctan(0.5 / 6.0))


class TestPointingAngles:
    def test_perfect_estimate_gives_zero_error(self):
        d = pointing_angles(IDEAL, 0.0, 0.0, 0.0997, 0.0997)
        assert d.theta_hat_1 == d.theta_true_1
        assert d.theta_hat_2 == d.theta_true_2

    def test_hand_value(self):
        d = pointing_angles(SENSOR, 0.01, 0.0, 0.0997, 0.0997)
        assert d.theta_hat_1 == pytest.approx(0.0897)
        assert d.theta_true_1 == pytest.approx(0.0897)

    def test_vehicle2_sees_mirrored_elevation(self):
        d = pointing_angles(SENSOR, 0.0, 0.02, 0.1, 0.1)
        assert d.theta_true_2 == pytest.approx(-0.02 - 0.1)

    def test_pitch_cancels_in_mispointing_error(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p1, p2 = rng.normal(0, 0.02, 2)
            lhat, ltrue = rng.normal(0.1, 0.01, 2)
            d = pointing_angles(SENSOR, p1, p2, lhat, ltrue)
            assert d.theta_hat_1 - d.theta_true_1 == pytest.approx(lhat - ltrue)
            assert d.theta_hat_2 - d.theta_true_2 == pytest.approx(-(lhat - ltrue))

    def test_oracle_must_be_driven_with_truth(self):
        with pytest.raises(ValueError):
            pointing_angles(IDEAL, 0.0, 0.0, 0.1, 0.100001)


class TestFrameRule:
    def test_identical_traces_ok(self):
        tr = np.full(5, 900.0)
        assert frame_ok(tr, tr)

    def test_dip_just_inside_margin_ok(self):
        ideal = np.full(5, 900.0)
        snr = ideal.copy()
        snr[2] = ideal[2] * 10 ** (-5.99 / 10)
        assert frame_ok(snr, ideal)

    def test_dip_just_past_margin_fails(self):
        ideal = np.full(5, 900.0)
        snr = ideal.copy()
        snr[2] = ideal[2] * 10 ** (-6.01 / 10)
        assert not frame_ok(snr, ideal)

    def test_length_mismatch_rejected(self):
        with pytest.raises(LengthMismatch):
            frame_ok(np.ones(4), np.ones(5))

    def test_margin_is_six_for_identical_traces(self):
        tr = np.full(7, 512.0)
        assert min_snr_margin_db(tr, tr) == FRAME_ERROR_MARGIN_DB

    def test_margin_sign_agrees_with_frame_ok(self):
        rng = np.random.default_rng(8)
        ideal = np.full(10, 1000.0)
        for _ in range(50):
            snr = ideal * 10 ** (rng.uniform(-8, 0, 10) / 10)
            ok = frame_ok(snr, ideal)
            margin = min_snr_margin_db(snr, ideal)
            assert ok == (margin >= 0.0) or margin == pytest.approx(0.0, abs=1e-9)

    def test_zero_snr_fails_with_infinite_margin_deficit(self):
        ideal = np.full(3, 100.0)
        snr = np.array([100.0, 0.0, 100.0])
        assert not frame_ok(snr, ideal)
        assert min_snr_margin_db(snr, ideal) == -np.inf


class TestMeasuredDistances:
    def test_block_constant_noise(self):
        f = FrameConfig()
        rng = np.random.default_rng(0)
        d = measured_distances(5.0, f, 0.1, rng, n_steps=250)
        block = f.steps_per_distance_update
        for start in (0, block):
            chunk = d[start:start + block]
            assert np.all(chunk == chunk[0])
        assert d[0] != d[100]

    def test_zero_std_returns_truth(self):
        f = FrameConfig()
        rng = np.random.default_rng(0)
        d = measured_distances(5.0, f, 0.0, rng, n_steps=100)
        np.testing.assert_array_equal(d, np.full(100, 5.0))

    def test_tracks_varying_distance(self):
        f = FrameConfig()
        rng = np.random.default_rng(0)
        truth = np.linspace(5.0, 6.0, 150)
        d = measured_distances(truth, f, 0.0, rng, n_steps=150)
        np.testing.assert_array_equal(d, truth)


class TestPointingPolicy:
    def test_negative_ranging_std_rejected(self):
        with pytest.raises(ValueError):
            PointingPolicy(PolicyVariant.SENSOR_AIDED, ranging_std=-0.1)

    def test_labels(self):
        assert CONV.label == "conventional_ba"
        assert SENSOR.label == "sensor_aided"
        assert IDEAL.label == "ideal_oracle"
