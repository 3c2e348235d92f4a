import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from v2vbeam.dynamics import (
    ArModel,
    DegenerateTrace,
    HistoryTooShort,
    StrokeTrace,
    TraceFormatError,
    TraceTooShort,
    UnstableModel,
    default_stroke_model,
    fit_ar,
    interpolate,
    predict,
    predict_block,
    read_trace_csv,
    synthesize,
    write_trace_csv,
)


def make_trace(samples, rate=50.0):
    return StrokeTrace(np.asarray(samples, dtype=float), rate, "measured",
                       sanity_limit=10.0)


class TestStrokeTrace:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            StrokeTrace(np.array([]), 50.0, "measured")

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            StrokeTrace(np.array([0.1, np.nan]), 50.0, "measured")

    def test_rejects_excursion_beyond_sanity_limit(self):
        with pytest.raises(ValueError):
            StrokeTrace(np.array([0.0, 1.2]), 50.0, "measured", sanity_limit=0.5)

    def test_duration(self):
        tr = make_trace(np.zeros(51) + 1.0, rate=50.0)
        assert tr.duration == pytest.approx(1.0)
        assert len(tr) == 51


class TestArModel:
    def test_dict_round_trip(self):
        m = default_stroke_model(mean=0.75)
        m2 = ArModel.from_dict(m.to_dict())
        assert m2.order == m.order
        assert np.array_equal(m2.coefficients, m.coefficients)
        assert m2.innovation_variance == m.innovation_variance
        assert m2.mean == m.mean

    def test_spectral_radius_ar1(self):
        m = ArModel(1, (0.9,), 1e-6, 0.0)
        assert m.spectral_radius == pytest.approx(0.9, abs=1e-12)
        assert m.is_stationary

    def test_nonstationary_detected(self):
        m = ArModel(1, (1.01,), 1e-6, 0.0)
        assert not m.is_stationary


class TestFitAr:
    def test_constant_trace_is_degenerate(self):
        tr = make_trace(np.full(100, 0.5))
        with pytest.raises(DegenerateTrace):
            fit_ar(tr, 1)

    def test_short_trace_rejected(self):
        tr = make_trace(np.random.default_rng(0).normal(0, 0.01, 99))
        with pytest.raises(TraceTooShort):
            fit_ar(tr, 10)

    def test_recovers_ar1_coefficient(self):
        model = ArModel(1, (0.9,), 1e-6, 0.0)
        tr = synthesize(model, 100_000, 42)
        fit = fit_ar(tr, 1)
        assert fit.coefficients[0] == pytest.approx(0.9, abs=0.02)

    def test_white_noise_gives_near_zero_coefficients(self):
        samples = np.random.default_rng(7).normal(0.0, 0.01, 100_000)
        fit = fit_ar(make_trace(samples), 10)
        assert np.all(np.abs(fit.coefficients) < 0.05)

    def test_fit_is_stationary(self):
        tr = synthesize(default_stroke_model(), 20_000, 3)
        fit = fit_ar(tr, 10)
        assert fit.is_stationary
        assert fit.innovation_variance > 0

    def test_mean_is_sample_mean(self):
        tr = synthesize(default_stroke_model(mean=1.0), 20_000, 3)
        fit = fit_ar(tr, 10)
        assert fit.mean == pytest.approx(tr.samples.mean())


class TestPredict:
    def test_ar1_two_steps(self):
        m = ArModel(1, (0.5,), 1e-9, 0.0)
        out = predict(m, [0.04], 2)
        assert out == pytest.approx([0.02, 0.01])

    def test_ar2_hand_value(self):
        m = ArModel(2, (1.5, -0.7), 1e-9, 0.0)
        out = predict(m, [1.0, 2.0], 1)
        assert out[0] == 1.5 * 2.0 - 0.7 * 1.0

    def test_one_step_equals_dot_product(self):
        m = default_stroke_model()
        rng = np.random.default_rng(11)
        hist = rng.normal(0.0, 0.03, 64)
        got = predict(m, hist, 1)[0]
        coeffs_rev = np.asarray(m.coefficients)[::-1]
        want = np.dot(hist[-m.order:] - m.mean, coeffs_rev) + m.mean
        assert got == want

    def test_short_history_rejected(self):
        m = default_stroke_model()
        with pytest.raises(HistoryTooShort):
            predict(m, [0.1] * 9, 1)

    def test_mean_offset_is_respected(self):
        m = ArModel(1, (0.5,), 1e-9, 1.0)
        out = predict(m, [1.04], 2)
        assert out == pytest.approx([1.02, 1.01])

    @settings(max_examples=25, deadline=None)
    @given(horizon=st.integers(min_value=1, max_value=8),
           seed=st.integers(min_value=0, max_value=2**31))
    def test_longer_horizons_share_prefix(self, horizon, seed):
        m = default_stroke_model()
        hist = np.random.default_rng(seed).normal(0.0, 0.03, 16)
        short = predict(m, hist, horizon)
        long = predict(m, hist, horizon + 3)
        assert np.array_equal(long[:horizon], short)

    @settings(max_examples=25, deadline=None)
    @given(extra=st.integers(min_value=0, max_value=30),
           seed=st.integers(min_value=0, max_value=2**31))
    def test_only_last_p_samples_matter(self, extra, seed):
        m = default_stroke_model()
        rng = np.random.default_rng(seed)
        tail = rng.normal(0.0, 0.03, m.order)
        head = rng.normal(0.0, 0.03, extra)
        assert np.array_equal(
            predict(m, np.concatenate([head, tail]), 5),
            predict(m, tail, 5),
        )


class TestPredictBlock:
    def test_matches_per_row_predict(self):
        m = default_stroke_model()
        rng = np.random.default_rng(2)
        H = rng.normal(0.0, 0.03, (6, 20))
        blk = predict_block(m, H, 7)
        assert blk.shape == (6, 7)
        for i in range(6):
            np.testing.assert_allclose(blk[i], predict(m, H[i], 7),
                                       rtol=1e-12, atol=1e-15)

    def test_narrow_histories_rejected(self):
        with pytest.raises(HistoryTooShort):
            predict_block(default_stroke_model(), np.zeros((3, 5)), 1)


class TestInterpolate:
    def test_factor_one_is_identity(self):
        tr = synthesize(default_stroke_model(), 50, 1)
        assert interpolate(tr, 1) is tr

    def test_linear_ramp(self):
        out = interpolate(make_trace([0.0, 1.0, 2.0]), 2)
        np.testing.assert_array_equal(out.samples, [0.0, 0.5, 1.0, 1.5, 2.0])
        assert out.sample_rate == 100.0

    def test_factor_ten_gives_2ms_resolution(self):
        tr = synthesize(default_stroke_model(), 100, 5)  # 50 Hz
        out = interpolate(tr, 10)
        assert out.sample_rate == 500.0
        assert len(out) == (100 - 1) * 10 + 1
        assert out.origin == "interpolated"

    def test_passes_through_knots(self):
        tr = synthesize(default_stroke_model(), 200, 9)
        out = interpolate(tr, 10)
        np.testing.assert_array_equal(out.samples[::10], tr.samples)

    def test_linear_kind(self):
        tr = make_trace([0.0, 2.0, 0.0, 2.0])
        out = interpolate(tr, 2, kind="linear")
        np.testing.assert_array_equal(out.samples, [0, 1, 2, 1, 0, 1, 2])

    def test_single_sample_rejected(self):
        with pytest.raises(TraceTooShort):
            interpolate(make_trace([0.5]), 2)

    def test_bad_factor_rejected(self):
        with pytest.raises(ValueError):
            interpolate(make_trace([0.0, 1.0, 2.0, 3.0]), 0)


class TestSynthesize:
    def test_length_rate_and_origin(self):
        tr = synthesize(default_stroke_model(), 512, 0)
        assert len(tr) == 512
        assert tr.sample_rate == 50.0
        assert tr.origin == "synthetic"

    def test_deterministic_given_seed(self):
        a = synthesize(default_stroke_model(), 256, 123)
        b = synthesize(default_stroke_model(), 256, 123)
        assert np.array_equal(a.samples, b.samples)
        c = synthesize(default_stroke_model(), 256, 124)
        assert not np.array_equal(a.samples, c.samples)

    def test_unstable_model_rejected(self):
        bad = ArModel(1, (1.05,), 1e-6, 0.0)
        with pytest.raises(UnstableModel):
            synthesize(bad, 100, 0)

    def test_stationary_std_matches_design(self):
        tr = synthesize(default_stroke_model(), 200_000, 17)
        assert tr.samples.std() == pytest.approx(0.036, rel=0.02)

    def test_mean_centering(self):
        tr = synthesize(default_stroke_model(mean=1.0), 100_000, 8)
        assert tr.samples.mean() == pytest.approx(1.0, abs=0.01)


class TestCsvIo:
    def test_round_trip_is_exact(self, tmp_path):
        tr = synthesize(default_stroke_model(mean=0.5), 300, 4)
        path = tmp_path / "trace.csv"
        write_trace_csv(tr, path)
        back = read_trace_csv(path)
        assert np.array_equal(back.samples, tr.samples)
        assert back.sample_rate == pytest.approx(tr.sample_rate)

    def test_header_is_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,h\n0.0,0.5\n0.02,0.5\n")
        with pytest.raises(TraceFormatError):
            read_trace_csv(path)

    def test_non_uniform_sampling_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time_s,height_m\n0.0,0.5\n0.02,0.5\n0.05,0.5\n")
        with pytest.raises(TraceFormatError):
            read_trace_csv(path)

    def test_non_numeric_cell_rejected_with_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time_s,height_m\n0.0,0.5\n0.02,oops\n")
        with pytest.raises(TraceFormatError, match="line 3"):
            read_trace_csv(path)


class TestDefaultModel:
    def test_is_stationary_ar10(self):
        m = default_stroke_model()
        assert m.order == 10
        assert m.is_stationary
        assert m.spectral_radius < 0.99

    def test_refit_recovers_coefficients(self):
        m = default_stroke_model()
        tr = synthesize(m, 100_000, 99)
        fit = fit_ar(tr, 10)
        err = np.max(np.abs(np.asarray(fit.coefficients)
                            - np.asarray(m.coefficients)))
        assert err < 0.05
