"""Vehicle stroke (vertical antenna height) time series: ingestion, AR modeling,
prediction, resampling, and synthesis.

Strokes are centimeter-scale suspension vibrations sampled by an on-board
inertial sensor, nominally at 50 Hz. They are modeled as stationary
autoregressive processes; the fitted model doubles as the short-horizon
predictor exchanged between vehicles and as the generator for synthetic
scenarios. Table-style parameter sets quote a predictor length of 11 while the
procedure text uses AR(10); the order is therefore a parameter everywhere,
defaulting to 10.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline, make_interp_spline
from scipy.signal import lfilter

__all__ = [
    "StrokeTrace",
    "ArModel",
    "TraceTooShort",
    "DegenerateTrace",
    "HistoryTooShort",
    "UnstableModel",
    "TraceFormatError",
    "fit_ar",
    "predict",
    "predict_block",
    "interpolate",
    "synthesize",
    "read_trace_csv",
    "write_trace_csv",
    "default_stroke_model",
    "DEFAULT_SOURCE_RATE_HZ",
]

DEFAULT_SOURCE_RATE_HZ = 50.0

#: Default stroke sanity limit: |h - mean(h)| above this is rejected as
#: implausible for suspension travel.
DEFAULT_SANITY_LIMIT_M = 0.5

TRACE_ORIGINS = ("measured", "synthetic", "interpolated")


class TraceTooShort(ValueError):
    """Trace has too few samples for the requested operation."""


class DegenerateTrace(ValueError):
    """Trace variance is zero; no AR model can be identified."""


class HistoryTooShort(ValueError):
    """Prediction history is shorter than the model order."""


class UnstableModel(ValueError):
    """AR coefficient set is not stationary (spectral radius >= 1)."""


class TraceFormatError(ValueError):
    """Trace CSV violates the expected schema."""


@dataclass(frozen=True)
class StrokeTrace:
    """Uniformly sampled antenna-height series.

    Parameters
    ----------
    samples : ndarray
        Heights in meters.
    sample_rate : float
        Sampling rate in Hz, > 0.
    origin : str
        One of ``measured``, ``synthetic``, ``interpolated``.
    sanity_limit : float
        Maximum allowed |h - mean(h)| in meters.
    """

    samples: np.ndarray
    sample_rate: float
    origin: str = "measured"
    sanity_limit: float = DEFAULT_SANITY_LIMIT_M

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.isfinite(samples).all():
            raise ValueError("samples must be finite")
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")
        if self.origin not in TRACE_ORIGINS:
            raise ValueError(f"origin must be one of {TRACE_ORIGINS}, got {self.origin!r}")
        excursion = np.max(np.abs(samples - samples.mean()))
        if excursion > self.sanity_limit:
            raise ValueError(
                f"stroke excursion {excursion:.3f} m exceeds sanity limit "
                f"{self.sanity_limit} m"
            )

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Time span covered by the samples, in seconds."""
        return (self.samples.size - 1) / self.sample_rate


@dataclass(frozen=True)
class ArModel:
    """Autoregressive model h[t] = mean + sum_k a_k (h[t-k] - mean) + e[t].

    ``coefficients[k-1]`` multiplies lag k, so the first coefficient applies to
    the most recent sample. Stationarity is not enforced at construction (so
    that consumers can reject unstable sets explicitly); ``fit_ar`` only ever
    returns stationary models.
    """

    order: int
    coefficients: np.ndarray
    innovation_variance: float
    mean: float = 0.0

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coeffs)
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if coeffs.shape != (self.order,):
            raise ValueError(
                f"expected {self.order} coefficients, got shape {coeffs.shape}"
            )
        if not np.isfinite(coeffs).all():
            raise ValueError("coefficients must be finite")
        if self.innovation_variance < 0:
            raise ValueError("innovation_variance must be >= 0")

    @property
    def spectral_radius(self) -> float:
        """Largest root magnitude of z^p - a_1 z^(p-1) - ... - a_p."""
        poly = np.concatenate(([1.0], -self.coefficients))
        return float(np.max(np.abs(np.roots(poly))))

    @property
    def is_stationary(self) -> bool:
        return self.spectral_radius < 1.0

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "coefficients": [float(c) for c in self.coefficients],
            "innovation_variance": float(self.innovation_variance),
            "mean": float(self.mean),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArModel":
        return cls(
            order=int(d["order"]),
            coefficients=np.asarray(d["coefficients"], dtype=float),
            innovation_variance=float(d["innovation_variance"]),
            mean=float(d.get("mean", 0.0)),
        )


def _autocovariance(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased sample autocovariance r[0..max_lag] of a zero-mean series."""
    n = x.size
    return np.array([np.dot(x[k:], x[: n - k]) / n for k in range(max_lag + 1)])


def _levinson_durbin(r: np.ndarray, order: int) -> tuple[np.ndarray, float]:
    """Solve the Yule-Walker equations by the Levinson-Durbin recursion.

    Returns (coefficients, prediction_error_variance). With a biased (hence
    positive semi-definite) autocovariance all reflection coefficients have
    magnitude < 1, which guarantees a stationary coefficient set.
    """
    a = np.zeros(0)
    err = r[0]
    for i in range(order):
        if err <= 0:
            raise DegenerateTrace(
                f"prediction error variance collapsed to {err} at order {i}"
            )
        if i == 0:
            k = r[1] / err
        else:
            k = (r[i + 1] - np.dot(a, r[1 : i + 1][::-1])) / err
        a = np.concatenate([a - k * a[::-1], [k]])
        err *= 1.0 - k * k
    return a, float(err)


def fit_ar(trace: StrokeTrace, order: int) -> ArModel:
    """Fit an AR(order) model by Yule-Walker on the mean-removed trace.

    Parameters
    ----------
    trace : StrokeTrace
        At least ``10 * order`` samples.
    order : int
        AR order, >= 1.

    Returns
    -------
    ArModel
        Stationary by construction; ``innovation_variance`` is the
        Levinson-Durbin prediction-error variance, ``mean`` the sample mean.

    Raises
    ------
    TraceTooShort
        Fewer than ``10 * order`` samples.
    DegenerateTrace
        Zero-variance input.
    UnstableModel
        Numerical failure of the stationarity guarantee (not expected).
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if len(trace) < 10 * order:
        raise TraceTooShort(
            f"need at least {10 * order} samples for order {order}, got {len(trace)}"
        )
    x = trace.samples - trace.samples.mean()
    r = _autocovariance(x, order)
    if r[0] <= 0:
        raise DegenerateTrace("trace variance is zero")
    coeffs, err = _levinson_durbin(r, order)
    model = ArModel(
        order=order,
        coefficients=coeffs,
        innovation_variance=max(err, 0.0),
        mean=float(trace.samples.mean()),
    )
    if not model.is_stationary:
        raise UnstableModel(
            f"fitted model has spectral radius {model.spectral_radius:.6f} >= 1"
        )
    return model


def predict_block(model: ArModel, histories: np.ndarray, horizon: int) -> np.ndarray:
    """Iterated deterministic prediction for many histories at once.

    Parameters
    ----------
    histories : ndarray, shape (m, >= order)
        Each row holds recent heights, oldest first.
    horizon : int
        Number of future samples per row.

    Returns
    -------
    ndarray, shape (m, horizon)
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    histories = np.atleast_2d(np.asarray(histories, dtype=float))
    p = model.order
    if histories.shape[1] < p:
        raise HistoryTooShort(
            f"history length {histories.shape[1]} < model order {p}"
        )
    # oldest-first window of the last p centered samples; coefficients reversed
    # so that column p-1 (most recent) meets a_1
    window = histories[:, -p:] - model.mean
    coeffs_rev = model.coefficients[::-1]
    out = np.empty((histories.shape[0], horizon))
    for i in range(horizon):
        nxt = window @ coeffs_rev
        out[:, i] = nxt + model.mean
        window = np.concatenate([window[:, 1:], nxt[:, None]], axis=1)
    return out


def predict(model: ArModel, history, horizon: int) -> np.ndarray:
    """Predict ``horizon`` future heights from the most recent samples.

    ``history`` is oldest-first; only the last ``model.order`` entries are
    used. Deterministic: no innovation noise is injected. Each step is the
    plain dot product of the oldest-first window with the reversed
    coefficients, so a hand-written ``np.dot`` reproduces it bit for bit.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    history = np.asarray(history, dtype=float)
    if history.ndim != 1:
        raise ValueError("history must be 1-D; use predict_block for batches")
    p = model.order
    if history.size < p:
        raise HistoryTooShort(f"history length {history.size} < model order {p}")
    window = history[-p:] - model.mean
    coeffs_rev = model.coefficients[::-1]
    out = np.empty(horizon)
    for i in range(horizon):
        nxt = np.dot(window, coeffs_rev)
        out[i] = nxt + model.mean
        window = np.concatenate([window[1:], [nxt]])
    return out


def interpolate(trace: StrokeTrace, factor: int, kind: str = "cubic") -> StrokeTrace:
    """Resample a trace to ``factor`` times its rate through the original knots.

    The output has length ``(L - 1) * factor + 1`` and passes through every
    input sample exactly. ``kind`` is ``cubic`` (spline, default) or
    ``linear``.
    """
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    if len(trace) < 2:
        raise TraceTooShort(f"need at least 2 samples to interpolate, got {len(trace)}")
    if kind not in ("cubic", "linear"):
        raise ValueError(f"kind must be 'cubic' or 'linear', got {kind!r}")
    if factor == 1:
        return trace
    x = np.arange(len(trace), dtype=float)
    # integer-index parameterization keeps knot abscissae exact: (i*factor)/factor == i
    xs = np.arange((len(trace) - 1) * factor + 1, dtype=float) / factor
    if kind == "cubic":
        # spline degree degrades gracefully on very short traces
        degree = min(3, len(trace) - 1)
        if degree == 3:
            ys = CubicSpline(x, trace.samples)(xs)
        else:
            ys = make_interp_spline(x, trace.samples, k=degree)(xs)
    else:
        ys = np.interp(xs, x, trace.samples)
    ys[::factor] = trace.samples
    return StrokeTrace(
        samples=ys,
        sample_rate=trace.sample_rate * factor,
        origin="interpolated",
        sanity_limit=trace.sanity_limit,
    )


def synthesize(model: ArModel, length: int, seed,
               sample_rate: float = DEFAULT_SOURCE_RATE_HZ) -> StrokeTrace:
    """Generate a synthetic trace from a stationary AR model.

    Gaussian innovations with the model's ``innovation_variance`` drive the AR
    recursion; a burn-in of ``10 * order`` samples is discarded before the
    returned segment. Deterministic given ``seed`` (an int, SeedSequence, or
    Generator).

    Raises
    ------
    UnstableModel
        If the coefficient set has spectral radius >= 1.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if not model.is_stationary:
        raise UnstableModel(
            f"cannot synthesize from model with spectral radius "
            f"{model.spectral_radius:.6f} >= 1"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    burn = 10 * model.order
    innovations = rng.normal(0.0, np.sqrt(model.innovation_variance), length + burn)
    denom = np.concatenate(([1.0], -model.coefficients))
    x = lfilter([1.0], denom, innovations)[burn:]
    return StrokeTrace(samples=x + model.mean, sample_rate=sample_rate,
                       origin="synthetic")


def read_trace_csv(path, sanity_limit: float = DEFAULT_SANITY_LIMIT_M) -> StrokeTrace:
    """Read a trace from CSV with header ``time_s,height_m``.

    Rows must be strictly increasing in time at a uniform step (validated to
    1e-6 s). Raises TraceFormatError with the offending line number otherwise.
    """
    times: list[float] = []
    heights: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["time_s", "height_m"]:
            raise TraceFormatError(
                f"{path}: line 1: expected header 'time_s,height_m', got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise TraceFormatError(f"{path}: line {lineno}: expected 2 columns, got {len(row)}")
            try:
                t, h = float(row[0]), float(row[1])
            except ValueError as exc:
                raise TraceFormatError(f"{path}: line {lineno}: {exc}") from None
            times.append(t)
            heights.append(h)
    if len(times) < 2:
        raise TraceFormatError(f"{path}: need at least 2 data rows, got {len(times)}")
    t = np.asarray(times)
    steps = np.diff(t)
    if np.any(steps <= 0):
        bad = int(np.argmax(steps <= 0))
        raise TraceFormatError(f"{path}: line {bad + 3}: time not strictly increasing")
    step = steps[0]
    if np.max(np.abs(steps - step)) > 1e-6:
        bad = int(np.argmax(np.abs(steps - step) > 1e-6))
        raise TraceFormatError(
            f"{path}: line {bad + 3}: non-uniform time step "
            f"({steps[bad]:.9f} s vs {step:.9f} s)"
        )
    return StrokeTrace(
        samples=np.asarray(heights),
        sample_rate=1.0 / step,
        origin="measured",
        sanity_limit=sanity_limit,
    )


def write_trace_csv(trace: StrokeTrace, path) -> None:
    """Write a trace in the ``time_s,height_m`` schema."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", "height_m"])
        for i, h in enumerate(trace.samples):
            writer.writerow([repr(i / trace.sample_rate), repr(float(h))])


def file_sha256(path) -> str:
    """Hex digest of a file's contents, to fingerprint model inputs."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


# Default synthetic stroke model at 50 Hz. Designed by pole placement:
# conjugate pole pairs at 3.2 Hz (dominant, radius 0.988: cab bounce),
# 7.5, 12, 17, and 22 Hz with decreasing radii for the road-excited tail.
# Innovation variance calibrated via the stationary Lyapunov equation so
# the stationary standard deviation is 3.6 cm. Most of the spectral power
# sits below 5 Hz, dropping steeply past the dominant mode.
_DEFAULT_STROKE_COEFFS = np.array([
    1.203945,
    -0.921012,
    0.409769,
    -0.266369,
    0.049853,
    -0.103059,
    -0.060216,
    -0.070343,
    -0.118957,
    -0.075007,
])
_DEFAULT_STROKE_INNOVATION_VAR = 0.00013557010565448058


def default_stroke_model(mean: float = 0.0) -> ArModel:
    """The package's built-in AR(10) stroke generator, centered on ``mean``."""
    return ArModel(
        order=10,
        coefficients=_DEFAULT_STROKE_COEFFS.copy(),
        innovation_variance=_DEFAULT_STROKE_INNOVATION_VAR,
        mean=mean,
    )
