"""Frame timing, transmission efficiency, pointing policies, LOS estimators,
and the frame-error rule.

Three pointing policies are compared. ConventionalBA re-sweeps beams at the
start of every beacon interval (BI) and then holds: it knows the peer height
only at t_BA and carries a per-BI residual alignment error n_BA uniform in
+/- theta_3dB. SensorAided exchanges predicted peer strokes at BI start and
re-steers every step, paying only the signaling overhead. IdealOracle points
perfectly with no overhead and serves as the upper bound and as the reference
of the 6 dB frame-error rule.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import LinkState, los_true

__all__ = [
    "PolicyVariant",
    "PointingPolicy",
    "FrameConfig",
    "PointingDecision",
    "MissingPrediction",
    "MissingAnchor",
    "LengthMismatch",
    "efficiency",
    "estimate_los",
    "conventional_los_estimate",
    "sensor_aided_los_estimate",
    "pointing_angles",
    "frame_ok",
    "min_snr_margin_db",
    "measured_distances",
    "FRAME_ERROR_MARGIN_DB",
]

#: SNR shortfall against the ideal-pointing reference that marks a frame error.
FRAME_ERROR_MARGIN_DB = 6.0


class MissingPrediction(ValueError):
    """SensorAided estimator called without predicted peer heights."""


class MissingAnchor(ValueError):
    """ConventionalBA estimator called without the BI-start peer height."""


class LengthMismatch(ValueError):
    """Paired per-step traces differ in length."""


class PolicyVariant(enum.Enum):
    CONVENTIONAL_BA = "conventional_ba"
    SENSOR_AIDED = "sensor_aided"
    IDEAL_ORACLE = "ideal_oracle"


@dataclass(frozen=True)
class PointingPolicy:
    """A policy variant plus its ranging noise std (SensorAided only)."""

    variant: PolicyVariant
    ranging_std: float = 0.0

    def __post_init__(self):
        if self.ranging_std < 0:
            raise ValueError(f"ranging_std must be >= 0, got {self.ranging_std}")

    @property
    def label(self) -> str:
        return self.variant.value


@dataclass(frozen=True)
class FrameConfig:
    """BI timing: total duration, signaling and BA overheads, simulation step.

    ``time_step`` must divide ``bi_duration`` (checked to 1e-9 s);
    ``distance_update_period`` is the ranging refresh cadence.
    """

    bi_duration: float = 0.010
    signaling_overhead: float = 0.1e-3
    ba_overhead: float = 1.9e-3
    time_step: float = 2e-3
    distance_update_period: float = 0.2

    def __post_init__(self):
        if not self.signaling_overhead > 0:
            raise ValueError("signaling_overhead must be > 0")
        if self.ba_overhead < 0:
            raise ValueError("ba_overhead must be >= 0")
        if not self.signaling_overhead + self.ba_overhead < self.bi_duration:
            raise ValueError(
                f"overheads ({self.signaling_overhead + self.ba_overhead} s) must be "
                f"smaller than bi_duration ({self.bi_duration} s)"
            )
        if not self.time_step > 0:
            raise ValueError("time_step must be > 0")
        steps = round(self.bi_duration / self.time_step)
        if steps < 1 or abs(self.bi_duration - steps * self.time_step) > 1e-9:
            raise ValueError(
                f"time_step {self.time_step} s does not divide bi_duration "
                f"{self.bi_duration} s"
            )
        if not self.distance_update_period > 0:
            raise ValueError("distance_update_period must be > 0")

    @property
    def steps_per_bi(self) -> int:
        return round(self.bi_duration / self.time_step)

    @property
    def steps_per_distance_update(self) -> int:
        return max(1, round(self.distance_update_period / self.time_step))


@dataclass(frozen=True)
class PointingDecision:
    """Commanded and ideal pointing angles for both vehicles (radians).

    Arrays are per time step; under IdealOracle hat equals true exactly.
    """

    theta_hat_1: np.ndarray
    theta_true_1: np.ndarray
    theta_hat_2: np.ndarray
    theta_true_2: np.ndarray


def efficiency(policy: PointingPolicy, frame: FrameConfig) -> float:
    """Fraction of the BI carrying data.

    ConventionalBA pays signaling plus the beam sweep each BI; SensorAided
    pays signaling only; IdealOracle pays nothing.
    """
    if policy.variant is PolicyVariant.CONVENTIONAL_BA:
        return 1.0 - (frame.signaling_overhead + frame.ba_overhead) / frame.bi_duration
    if policy.variant is PolicyVariant.SENSOR_AIDED:
        return 1.0 - frame.signaling_overhead / frame.bi_duration
    return 1.0


def conventional_los_estimate(anchor_h2, h1, distance, ba_noise):
    """atan((h2[t_BA] - h1[t]) / D[t]) + n_BA, vectorized over steps."""
    return np.arctan((anchor_h2 - np.asarray(h1)) / distance) + ba_noise


def sensor_aided_los_estimate(predicted_h2, h1, measured_distance):
    """atan((h2_hat[t] - h1[t]) / D_hat[t]), vectorized over steps."""
    return np.arctan((np.asarray(predicted_h2) - np.asarray(h1)) / measured_distance)


def estimate_los(policy: PointingPolicy, links, ba_anchor=None, predicted_h2=None,
                 rng=None, theta_3db=None, ba_noise=None,
                 use_measured_distance_for_ba=False) -> np.ndarray:
    """Per-step LOS estimates over one BI for the given policy.

    Parameters
    ----------
    links : LinkState or sequence of LinkState
        The BI's link states in step order.
    ba_anchor : float, optional
        Peer height at t_BA (ConventionalBA).
    predicted_h2 : array, optional
        Predicted peer heights per step (SensorAided), same length as links.
    rng : numpy Generator, optional
        Used once per call to draw n_BA when ``ba_noise`` is not given.
    theta_3db : float, optional
        Beamwidth bounding n_BA ~ U(-theta_3db, +theta_3db) (ConventionalBA).
    ba_noise : float, optional
        Explicit n_BA override; bypasses the draw.

    Returns
    -------
    ndarray of LOS angle estimates, one per link state.
    """
    if isinstance(links, LinkState):
        links = [links]
    h1 = np.array([s.h1 for s in links])
    h2 = np.array([s.h2 for s in links])
    d_true = np.array([s.distance for s in links])
    d_meas = np.array([s.measured_distance for s in links])

    if policy.variant is PolicyVariant.IDEAL_ORACLE:
        return los_true(h1, h2, d_true)

    if policy.variant is PolicyVariant.CONVENTIONAL_BA:
        if ba_anchor is None:
            raise MissingAnchor("ConventionalBA requires the peer height at t_BA")
        if ba_noise is None:
            if rng is None or theta_3db is None:
                raise ValueError(
                    "ConventionalBA needs either ba_noise or (rng, theta_3db) "
                    "to draw n_BA"
                )
            ba_noise = rng.uniform(-theta_3db, theta_3db)
        d_est = d_meas if use_measured_distance_for_ba else d_true
        return conventional_los_estimate(ba_anchor, h1, d_est, ba_noise)

    if predicted_h2 is None:
        raise MissingPrediction("SensorAided requires predicted peer heights")
    predicted_h2 = np.asarray(predicted_h2, dtype=float)
    if predicted_h2.shape != h1.shape:
        raise LengthMismatch(
            f"predicted_h2 has shape {predicted_h2.shape}, expected {h1.shape}"
        )
    return sensor_aided_los_estimate(predicted_h2, h1, d_meas)


def pointing_angles(policy: PointingPolicy, pitch1, pitch2, los_hat,
                    los_true_angles) -> PointingDecision:
    """Commanded and ideal pointing for both vehicles from pitches and LOS.

    Vehicle 1 points at -pitch1 + LOS; vehicle 2 sees the mirrored elevation
    and points at -pitch2 - LOS. Own pitch is always known exactly, so the
    mispointing error is +/-(los_hat - los_true) regardless of pitch. Under
    IdealOracle the estimate must be the true LOS.
    """
    pitch1 = np.asarray(pitch1, dtype=float)
    pitch2 = np.asarray(pitch2, dtype=float)
    los_hat = np.asarray(los_hat, dtype=float)
    los_true_angles = np.asarray(los_true_angles, dtype=float)
    if policy.variant is PolicyVariant.IDEAL_ORACLE and not np.array_equal(
            los_hat, los_true_angles):
        raise ValueError("IdealOracle must be driven with los_hat == los_true")
    return PointingDecision(
        theta_hat_1=-pitch1 + los_hat,
        theta_true_1=-pitch1 + los_true_angles,
        theta_hat_2=-pitch2 - los_hat,
        theta_true_2=-pitch2 - los_true_angles,
    )


def frame_ok(snr_trace, ideal_snr_trace,
             margin_db: float = FRAME_ERROR_MARGIN_DB) -> bool:
    """True unless any step falls more than ``margin_db`` below the ideal SNR.

    Both traces are linear SNR over the same BI under common randomness. The
    comparison is strict: a step exactly at the margin is still ok.
    """
    snr_trace = np.asarray(snr_trace, dtype=float)
    ideal_snr_trace = np.asarray(ideal_snr_trace, dtype=float)
    if snr_trace.shape != ideal_snr_trace.shape:
        raise LengthMismatch(
            f"snr trace shape {snr_trace.shape} != ideal shape {ideal_snr_trace.shape}"
        )
    threshold = ideal_snr_trace * 10.0 ** (-margin_db / 10.0)
    return bool(not np.any(snr_trace < threshold))


def min_snr_margin_db(snr_trace, ideal_snr_trace,
                      margin_db: float = FRAME_ERROR_MARGIN_DB) -> float:
    """Worst-step margin to the frame-error threshold, in dB.

    Non-negative iff the frame is ok; equals margin_db when the trace matches
    the ideal one exactly.
    """
    snr_trace = np.asarray(snr_trace, dtype=float)
    ideal_snr_trace = np.asarray(ideal_snr_trace, dtype=float)
    if snr_trace.shape != ideal_snr_trace.shape:
        raise LengthMismatch(
            f"snr trace shape {snr_trace.shape} != ideal shape {ideal_snr_trace.shape}"
        )
    with np.errstate(divide="ignore"):
        gap = 10.0 * np.log10(snr_trace / ideal_snr_trace)
    return float(np.min(gap) + margin_db)


def measured_distances(true_distance, frame: FrameConfig, ranging_std: float,
                       rng, n_steps: int) -> np.ndarray:
    """Ranging estimates D_hat[t] = D[t] + n_d with block-constant noise.

    n_d ~ N(0, ranging_std^2) is redrawn every ``distance_update_period`` and
    held between updates.
    """
    block = frame.steps_per_distance_update
    n_updates = (n_steps + block - 1) // block
    draws = rng.normal(0.0, 1.0, n_updates) * ranging_std
    noise = np.repeat(draws, block)[:n_steps]
    return np.asarray(true_distance) + noise
