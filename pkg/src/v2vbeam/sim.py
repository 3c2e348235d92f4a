"""Monte Carlo engine: per-BI evaluation of the pointing policies over shared
randomness, scenario aggregation, and parameter sweeps.

RNG discipline
--------------
The master seed is split with ``numpy.random.SeedSequence``: one child per
run, and within each run seven fixed-order grandchildren::

    0: strokes vehicle 1        4: shadowing
    1: strokes vehicle 2        5: conventional-BA noise (n_BA, ranging)
    2: RF mismatch vehicle 1    6: sensor-aided ranging noise
    3: RF mismatch vehicle 2

Strokes, mismatch, and shadowing are shared by every policy within a run
(common random numbers), which makes the policy comparisons and the
frame-error rule paired. Policy noises are keyed by variant, not by list
position, so results do not depend on the order of the policy list, and all
draws are materialized up front so that BIs could be evaluated in any order.

Gain evaluation
---------------
Per-step array gains depend only on u = sin(theta_hat) - sin(theta_true).
With an ideal array the closed form is used directly. With RF mismatch the
default ``gain_eval="table"`` evaluates the exact pattern on a dense symmetric
grid (step <= null-to-null width / 256, with an exact point at u = 0) and
interpolates linearly; the relative error is ~1e-5 and interpolated values
never exceed the true peak, preserving oracle dominance. ``gain_eval="direct"``
computes exact inner products per step instead.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import channel as chan
from . import dynamics, geometry, protocol, ula
from .geometry import VehicleGeometry
from .protocol import FrameConfig, PointingPolicy, PolicyVariant
from .ula import ArrayConfig
from .channel import ChannelParams

__all__ = [
    "StrokeSource",
    "ScenarioConfig",
    "BiRecord",
    "PolicyResult",
    "SimResult",
    "ConfigError",
    "InvalidAxisValue",
    "SWEEP_AXES",
    "run_bi",
    "run_scenario",
    "sweep",
    "scenario_from_dict",
    "write_result_csv",
    "write_result_json",
    "write_sweep_csv",
]

RECORDS_SCHEMA = "v2vbeam-bi-records-v1"
SUMMARY_SCHEMA = "v2vbeam-summary-v1"
SWEEP_SCHEMA = "v2vbeam-sweep-v1"

SWEEP_AXES = ("bi_duration", "beamwidth", "ranging_std")

_GAIN_TABLE_POINTS_PER_LOBE = 256


class ConfigError(ValueError):
    """Scenario configuration errors, collected all at once."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class InvalidAxisValue(ValueError):
    """A sweep value is not valid for the requested axis."""


@dataclass(frozen=True)
class StrokeSource:
    """Where a vehicle's stroke trace comes from.

    ``kind="synthetic"`` draws from an AR model (the package default when
    ``model`` is None) at ``source_rate`` Hz, independently per run.
    ``kind="csv"`` loads a measured trace; the same trace is used in every
    run, re-centered to the vehicle's rest height.
    """

    kind: str = "synthetic"
    model: dynamics.ArModel | None = None
    source_rate: float = dynamics.DEFAULT_SOURCE_RATE_HZ
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("synthetic", "csv"):
            raise ValueError(f"kind must be 'synthetic' or 'csv', got {self.kind!r}")
        if self.kind == "csv" and not self.path:
            raise ValueError("csv stroke source requires a path")
        if not self.source_rate > 0:
            raise ValueError("source_rate must be > 0")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "csv":
            d["path"] = self.path
        else:
            d["source_rate_hz"] = float(self.source_rate)
            if self.model is not None:
                d["model"] = self.model.to_dict()
        return d


def _policy_to_dict(p: PointingPolicy) -> dict:
    return {"variant": p.variant.value, "ranging_std_m": float(p.ranging_std)}


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete parameterization of one experiment."""

    vehicle1: VehicleGeometry = VehicleGeometry(length=4.5, rest_height=0.5)
    vehicle2: VehicleGeometry = VehicleGeometry(length=5.0, rest_height=1.0)
    array: ArrayConfig = ArrayConfig(
        n_elements=64,
        amplitude_mismatch_db_std=1.0,
        phase_mismatch_bound=np.deg2rad(3.0),
    )
    channel: ChannelParams = ChannelParams()
    frame: FrameConfig = FrameConfig()
    policies: tuple[PointingPolicy, ...] = (
        PointingPolicy(PolicyVariant.IDEAL_ORACLE),
        PointingPolicy(PolicyVariant.CONVENTIONAL_BA),
        PointingPolicy(PolicyVariant.SENSOR_AIDED, ranging_std=0.1),
    )
    strokes1: StrokeSource = StrokeSource()
    strokes2: StrokeSource = StrokeSource()
    distance: float | tuple = 5.0
    duration: float = 200.0
    n_monte_carlo: int = 100
    master_seed: int = 12345
    predictor_order: int = 10
    interpolation_factor: int = 10
    interpolation_kind: str = "cubic"
    shadowing_mode: str = "per_bi"
    conventional_uses_measured_distance: bool = False
    gain_eval: str = "table"

    def __post_init__(self):
        object.__setattr__(self, "policies", tuple(self.policies))
        if isinstance(self.distance, (list, tuple)):
            object.__setattr__(
                self, "distance",
                tuple((float(t), float(d)) for t, d in self.distance),
            )

    # -- validation ---------------------------------------------------------

    def validate(self) -> list[str]:
        """Semantic checks beyond field-level invariants; returns messages."""
        problems: list[str] = []
        if self.duration < self.frame.bi_duration:
            problems.append(
                f"duration ({self.duration} s) must be >= bi_duration "
                f"({self.frame.bi_duration} s)"
            )
        if self.n_monte_carlo < 1:
            problems.append(f"n_monte_carlo must be >= 1, got {self.n_monte_carlo}")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            problems.append(f"master_seed must be a non-negative int, got {self.master_seed}")
        if self.predictor_order < 1:
            problems.append(f"predictor_order must be >= 1, got {self.predictor_order}")
        if self.interpolation_factor < 1:
            problems.append(
                f"interpolation_factor must be >= 1, got {self.interpolation_factor}"
            )
        if self.interpolation_kind not in ("cubic", "linear"):
            problems.append(
                f"interpolation_kind must be 'cubic' or 'linear', got "
                f"{self.interpolation_kind!r}"
            )
        if self.shadowing_mode not in ("per_bi", "per_run"):
            problems.append(
                f"shadowing_mode must be 'per_bi' or 'per_run', got "
                f"{self.shadowing_mode!r}"
            )
        if self.gain_eval not in ("table", "direct"):
            problems.append(
                f"gain_eval must be 'table' or 'direct', got {self.gain_eval!r}"
            )
        if not self.policies:
            problems.append("policies must not be empty")
        for name, src in (("strokes1", self.strokes1), ("strokes2", self.strokes2)):
            rate = src.source_rate
            if src.kind == "csv":
                import os
                if not src.path or not os.path.exists(src.path):
                    problems.append(f"{name}: csv path not found: {src.path!r}")
                    continue
                try:
                    rate = dynamics.read_trace_csv(src.path).sample_rate
                except (dynamics.TraceFormatError, ValueError) as exc:
                    problems.append(f"{name}: {exc}")
                    continue
            step = 1.0 / (rate * self.interpolation_factor)
            if abs(step - self.frame.time_step) > 1e-9:
                problems.append(
                    f"{name}: source rate {rate} Hz x factor "
                    f"{self.interpolation_factor} gives a {step:.6g} s step, but "
                    f"frame.time_step is {self.frame.time_step:.6g} s"
                )
        if isinstance(self.distance, tuple) and self.distance and isinstance(
                self.distance[0], tuple):
            times = [t for t, _ in self.distance]
            dists = [d for _, d in self.distance]
            if times[0] != 0.0:
                problems.append("distance schedule must start at time 0")
            if any(b <= a for a, b in zip(times, times[1:])):
                problems.append("distance schedule times must be strictly increasing")
            if any(d <= 0 for d in dists):
                problems.append("distances must be > 0")
        elif not isinstance(self.distance, tuple):
            if not self.distance > 0:
                problems.append(f"distance must be > 0, got {self.distance}")
        return problems

    # -- derived quantities --------------------------------------------------

    @property
    def n_bi_per_run(self) -> int:
        """BIs per run; a trailing partial BI is discarded."""
        return int(np.floor(self.duration / self.frame.bi_duration + 1e-9))

    @property
    def n_steps_per_run(self) -> int:
        return self.n_bi_per_run * self.frame.steps_per_bi

    def distance_at_steps(self, n_steps: int) -> np.ndarray:
        """True distance D[t] on the simulation grid (piecewise constant)."""
        t = np.arange(n_steps) * self.frame.time_step
        if isinstance(self.distance, tuple):
            times = np.array([p[0] for p in self.distance])
            dists = np.array([p[1] for p in self.distance])
            idx = np.searchsorted(times, t, side="right") - 1
            return dists[np.clip(idx, 0, len(dists) - 1)]
        return np.full(n_steps, float(self.distance))

    def to_dict(self) -> dict:
        return {
            "vehicle1": {"length_m": self.vehicle1.length,
                         "rest_height_m": self.vehicle1.rest_height},
            "vehicle2": {"length_m": self.vehicle2.length,
                         "rest_height_m": self.vehicle2.rest_height},
            "array": {
                "n_elements": self.array.n_elements,
                "amplitude_mismatch_db_std": self.array.amplitude_mismatch_db_std,
                "phase_mismatch_deg": float(np.rad2deg(self.array.phase_mismatch_bound)),
                "ideal_weights": self.array.ideal_weights,
            },
            "channel": {
                "carrier_freq_hz": self.channel.carrier_freq,
                "pathloss_exponent": self.channel.pathloss_exponent,
                "shadowing_std_db": self.channel.shadowing_std_db,
                "bandwidth_hz": self.channel.bandwidth,
                "noise_figure_db": self.channel.noise_figure_db,
                "tx_power_dbm": self.channel.tx_power_dbm,
                "noise_floor_dbm_per_hz": self.channel.noise_floor_dbm_per_hz,
            },
            "frame": {
                "bi_duration_s": self.frame.bi_duration,
                "signaling_overhead_s": self.frame.signaling_overhead,
                "ba_overhead_s": self.frame.ba_overhead,
                "time_step_s": self.frame.time_step,
                "distance_update_period_s": self.frame.distance_update_period,
            },
            "policies": [_policy_to_dict(p) for p in self.policies],
            "strokes1": self.strokes1.to_dict(),
            "strokes2": self.strokes2.to_dict(),
            "distance_m": (
                [[t, d] for t, d in self.distance]
                if isinstance(self.distance, tuple) else self.distance
            ),
            "duration_s": self.duration,
            "n_monte_carlo": self.n_monte_carlo,
            "master_seed": self.master_seed,
            "predictor_order": self.predictor_order,
            "interpolation_factor": self.interpolation_factor,
            "interpolation_kind": self.interpolation_kind,
            "shadowing_mode": self.shadowing_mode,
            "conventional_uses_measured_distance":
                self.conventional_uses_measured_distance,
            "gain_eval": self.gain_eval,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


# ---------------------------------------------------------------------------
# config parsing (dict -> ScenarioConfig) with exhaustive error collection
# ---------------------------------------------------------------------------

_VARIANTS = {v.value: v for v in PolicyVariant}


def scenario_from_dict(d: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a plain dict (parsed JSON).

    Raises ConfigError carrying every problem found, not just the first.
    Unknown keys are reported; missing keys fall back to the field defaults.
    """
    problems: list[str] = []
    defaults = ScenarioConfig()

    known = set(defaults.to_dict().keys())
    for key in d:
        if key not in known:
            problems.append(f"unknown config key: {key!r}")

    def build(name, fn, fallback):
        try:
            return fn()
        except (ValueError, TypeError, KeyError) as exc:
            problems.append(f"{name}: {exc}")
            return fallback

    def vehicle(name, fallback):
        sub = d.get(name)
        if sub is None:
            return fallback
        return build(name, lambda: VehicleGeometry(
            length=float(sub["length_m"]),
            rest_height=float(sub["rest_height_m"]),
        ), fallback)

    v1 = vehicle("vehicle1", defaults.vehicle1)
    v2 = vehicle("vehicle2", defaults.vehicle2)

    def array_cfg():
        sub = d.get("array")
        if sub is None:
            return defaults.array
        return ArrayConfig(
            n_elements=int(sub.get("n_elements", 64)),
            amplitude_mismatch_db_std=float(sub.get("amplitude_mismatch_db_std", 0.0)),
            phase_mismatch_bound=float(np.deg2rad(sub.get("phase_mismatch_deg", 0.0))),
            ideal_weights=bool(sub.get("ideal_weights", False)),
        )

    def channel_cfg():
        sub = d.get("channel")
        if sub is None:
            return defaults.channel
        base = defaults.channel
        return ChannelParams(
            carrier_freq=float(sub.get("carrier_freq_hz", base.carrier_freq)),
            pathloss_exponent=float(sub.get("pathloss_exponent", base.pathloss_exponent)),
            shadowing_std_db=float(sub.get("shadowing_std_db", base.shadowing_std_db)),
            bandwidth=float(sub.get("bandwidth_hz", base.bandwidth)),
            noise_figure_db=float(sub.get("noise_figure_db", base.noise_figure_db)),
            tx_power_dbm=float(sub.get("tx_power_dbm", base.tx_power_dbm)),
            noise_floor_dbm_per_hz=float(
                sub.get("noise_floor_dbm_per_hz", base.noise_floor_dbm_per_hz)),
        )

    def frame_cfg():
        sub = d.get("frame")
        if sub is None:
            return defaults.frame
        base = defaults.frame
        return FrameConfig(
            bi_duration=float(sub.get("bi_duration_s", base.bi_duration)),
            signaling_overhead=float(
                sub.get("signaling_overhead_s", base.signaling_overhead)),
            ba_overhead=float(sub.get("ba_overhead_s", base.ba_overhead)),
            time_step=float(sub.get("time_step_s", base.time_step)),
            distance_update_period=float(
                sub.get("distance_update_period_s", base.distance_update_period)),
        )

    def policies_cfg():
        sub = d.get("policies")
        if sub is None:
            return defaults.policies
        if not isinstance(sub, list) or not sub:
            raise ValueError("policies must be a non-empty list")
        out = []
        for i, p in enumerate(sub):
            variant = p.get("variant")
            if variant not in _VARIANTS:
                raise ValueError(
                    f"policies[{i}].variant must be one of {sorted(_VARIANTS)}, "
                    f"got {variant!r}"
                )
            out.append(PointingPolicy(
                variant=_VARIANTS[variant],
                ranging_std=float(p.get("ranging_std_m", 0.0)),
            ))
        return tuple(out)

    def stroke_cfg(name):
        sub = d.get(name)
        if sub is None:
            return StrokeSource()
        kind = sub.get("kind", "synthetic")
        if kind == "csv":
            return StrokeSource(kind="csv", path=sub.get("path"))
        model = None
        if "model" in sub:
            model = dynamics.ArModel.from_dict(sub["model"])
        return StrokeSource(
            kind="synthetic",
            model=model,
            source_rate=float(sub.get("source_rate_hz",
                                      dynamics.DEFAULT_SOURCE_RATE_HZ)),
        )

    array = build("array", array_cfg, defaults.array)
    channel_p = build("channel", channel_cfg, defaults.channel)
    frame = build("frame", frame_cfg, defaults.frame)
    policies = build("policies", policies_cfg, defaults.policies)
    strokes1 = build("strokes1", lambda: stroke_cfg("strokes1"), defaults.strokes1)
    strokes2 = build("strokes2", lambda: stroke_cfg("strokes2"), defaults.strokes2)

    def scalar(key, fallback, cast):
        if key not in d:
            return fallback
        return build(key, lambda: cast(d[key]), fallback)

    distance = d.get("distance_m", defaults.distance)
    if isinstance(distance, list):
        distance = build("distance_m",
                         lambda: tuple((float(t), float(x)) for t, x in distance),
                         defaults.distance)

    cfg_kwargs = dict(
        vehicle1=v1, vehicle2=v2, array=array, channel=channel_p, frame=frame,
        policies=policies, strokes1=strokes1, strokes2=strokes2,
        distance=distance,
        duration=scalar("duration_s", defaults.duration, float),
        n_monte_carlo=scalar("n_monte_carlo", defaults.n_monte_carlo, int),
        master_seed=scalar("master_seed", defaults.master_seed, int),
        predictor_order=scalar("predictor_order", defaults.predictor_order, int),
        interpolation_factor=scalar("interpolation_factor",
                                    defaults.interpolation_factor, int),
        interpolation_kind=scalar("interpolation_kind",
                                  defaults.interpolation_kind, str),
        shadowing_mode=scalar("shadowing_mode", defaults.shadowing_mode, str),
        conventional_uses_measured_distance=scalar(
            "conventional_uses_measured_distance",
            defaults.conventional_uses_measured_distance, bool),
        gain_eval=scalar("gain_eval", defaults.gain_eval, str),
    )
    try:
        cfg = ScenarioConfig(**cfg_kwargs)
    except (ValueError, TypeError) as exc:
        problems.append(str(exc))
        raise ConfigError(problems)
    problems.extend(cfg.validate())
    if problems:
        raise ConfigError(problems)
    return cfg


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BiRecord:
    """Outcome of one BI under one policy."""

    run: int
    bi_index: int
    policy_label: str
    efficiency: float
    throughput_bps: float
    min_snr_margin_db: float
    frame_ok: bool


@dataclass(frozen=True)
class PolicyResult:
    """Aggregates plus per-BI arrays (run-major order) for one policy."""

    policy: PointingPolicy
    label: str
    efficiency: float
    mean_throughput_bps: float
    frame_error_rate: float
    throughput_bps: np.ndarray
    min_snr_margin_db: np.ndarray
    frame_ok: np.ndarray


@dataclass(frozen=True)
class SimResult:
    """All policies' outcomes for one scenario, plus reproducibility metadata."""

    scenario: ScenarioConfig
    policies: tuple[PolicyResult, ...]
    n_runs: int
    n_bi_per_run: int
    master_seed: int
    config_hash: str

    def by_label(self, label: str) -> PolicyResult:
        for p in self.policies:
            if p.label == label:
                return p
        raise KeyError(label)


def _policy_labels(policies) -> list[str]:
    labels = []
    seen: dict[str, int] = {}
    for p in policies:
        base = p.variant.value
        count = seen.get(base, 0)
        labels.append(base if count == 0 else f"{base}#{count + 1}")
        seen[base] = count + 1
    return labels


# ---------------------------------------------------------------------------
# the engine
# ---------------------------------------------------------------------------

@dataclass
class _RunData:
    """Everything one run shares across policies."""

    h1: np.ndarray
    h2: np.ndarray
    lead: int
    w2: np.ndarray
    pitch1: np.ndarray
    pitch2: np.ndarray
    los: np.ndarray
    d_true: np.ndarray
    mismatch1: ula.RfMismatch
    mismatch2: ula.RfMismatch
    shadow_step_db: np.ndarray
    n_ba: np.ndarray
    z_conv: np.ndarray
    z_sensor: np.ndarray
    predicted_h2: np.ndarray | None


def _working_samples(source: StrokeSource, rest_height: float,
                     scenario: ScenarioConfig, seed_seq, n_needed: int,
                     csv_cache: dict | None = None) -> np.ndarray:
    """Stroke samples on the simulation grid, at least ``n_needed`` long."""
    factor = scenario.interpolation_factor
    if source.kind == "csv":
        key = source.path
        if csv_cache is not None and key in csv_cache:
            trace = csv_cache[key]
        else:
            trace = dynamics.read_trace_csv(source.path)
            if csv_cache is not None:
                csv_cache[key] = trace
        centered = trace.samples - trace.samples.mean() + rest_height
        trace = dynamics.StrokeTrace(centered, trace.sample_rate, "measured")
    else:
        model = source.model or dynamics.default_stroke_model()
        model = dataclasses.replace(model, mean=rest_height)
        n_src = int(np.ceil((n_needed - 1) / factor)) + 1
        n_src = max(n_src, max(4, 10 * model.order))
        trace = dynamics.synthesize(model, n_src, np.random.default_rng(seed_seq),
                                    sample_rate=source.source_rate)
    work = dynamics.interpolate(trace, factor, kind=scenario.interpolation_kind)
    if len(work) < n_needed:
        raise ConfigError([
            f"stroke source provides {len(work)} samples at the simulation step "
            f"but {n_needed} are needed (lead {scenario.predictor_order} + "
            f"{scenario.n_steps_per_run} steps); supply a longer trace or reduce "
            f"duration"
        ])
    return work.samples[:n_needed]


def _child_streams(run_seed_seq, n: int) -> list:
    """First ``n`` spawn children of ``run_seed_seq``, derived statelessly.

    ``SeedSequence.spawn`` advances an internal counter, so calling it twice
    on the same object yields different children. Re-deriving the children
    from the entropy and spawn key keeps repeated evaluations of the same run
    (e.g. ``run_bi``) on identical streams.
    """
    return [
        np.random.SeedSequence(
            entropy=run_seed_seq.entropy,
            spawn_key=run_seed_seq.spawn_key + (i,),
            pool_size=run_seed_seq.pool_size,
        )
        for i in range(n)
    ]


def _build_run(scenario: ScenarioConfig, run_seed_seq,
               csv_cache: dict | None = None) -> _RunData:
    frame = scenario.frame
    n_steps = scenario.n_steps_per_run
    n_bi = scenario.n_bi_per_run
    lead = scenario.predictor_order
    ss = _child_streams(run_seed_seq, 7)

    w1 = _working_samples(scenario.strokes1, scenario.vehicle1.rest_height,
                          scenario, ss[0], lead + n_steps, csv_cache)
    w2 = _working_samples(scenario.strokes2, scenario.vehicle2.rest_height,
                          scenario, ss[1], lead + n_steps, csv_cache)
    h1 = w1[lead:lead + n_steps]
    h2 = w2[lead:lead + n_steps]

    d_true = scenario.distance_at_steps(n_steps)
    geometry.check_small_angle_regime(h1, scenario.vehicle1.rest_height, d_true)
    geometry.check_small_angle_regime(h2, scenario.vehicle2.rest_height, d_true)

    pitch1 = geometry.pitch_angle(h1, scenario.vehicle1.rest_height,
                                  scenario.vehicle1.length)
    pitch2 = geometry.pitch_angle(h2, scenario.vehicle2.rest_height,
                                  scenario.vehicle2.length)
    los = geometry.los_true(h1, h2, d_true)

    mismatch1 = ula.draw_mismatch(scenario.array, np.random.default_rng(ss[2]))
    mismatch2 = ula.draw_mismatch(scenario.array, np.random.default_rng(ss[3]))

    shadow_rng = np.random.default_rng(ss[4])
    if scenario.shadowing_mode == "per_run":
        shadow_bi = np.full(n_bi, chan.draw_shadowing_db(scenario.channel, shadow_rng))
    else:
        shadow_bi = chan.draw_shadowing_db(scenario.channel, shadow_rng, n_bi)
    shadow_step = np.repeat(shadow_bi, frame.steps_per_bi)

    theta_3db = ula.beamwidth_3db(scenario.array.n_elements)
    n_updates = (n_steps + frame.steps_per_distance_update - 1) \
        // frame.steps_per_distance_update
    conv_rng = np.random.default_rng(ss[5])
    n_ba = conv_rng.uniform(-theta_3db, theta_3db, n_bi)
    z_conv = conv_rng.normal(0.0, 1.0, n_updates)
    z_sensor = np.random.default_rng(ss[6]).normal(0.0, 1.0, n_updates)

    predicted = None
    if any(p.variant is PolicyVariant.SENSOR_AIDED for p in scenario.policies):
        predicted = _predict_peer_heights(scenario, w2, lead, n_bi)

    return _RunData(
        h1=h1, h2=h2, lead=lead, w2=w2, pitch1=pitch1, pitch2=pitch2, los=los,
        d_true=d_true, mismatch1=mismatch1, mismatch2=mismatch2,
        shadow_step_db=shadow_step, n_ba=n_ba, z_conv=z_conv, z_sensor=z_sensor,
        predicted_h2=predicted,
    )


def _predict_peer_heights(scenario: ScenarioConfig, w2: np.ndarray, lead: int,
                          n_bi: int) -> np.ndarray:
    """Per-step predicted h2: exchanged sample at each BI start, AR predictions
    for the remaining steps, predictor refit on this run's full trace."""
    frame = scenario.frame
    steps = frame.steps_per_bi
    order = scenario.predictor_order
    trace = dynamics.StrokeTrace(w2, 1.0 / frame.time_step, "interpolated")
    model = dynamics.fit_ar(trace, order)
    starts = lead + np.arange(n_bi) * steps
    histories = w2[starts[:, None] + np.arange(-order + 1, 1)[None, :]]
    out = np.empty((n_bi, steps))
    out[:, 0] = histories[:, -1]
    if steps > 1:
        out[:, 1:] = dynamics.predict_block(model, histories, steps - 1)
    return out.reshape(-1)


def _gain_evaluator(scenario: ScenarioConfig, mismatch: ula.RfMismatch, u_max: float):
    """Returns g(u) for one vehicle's array under the configured eval mode."""
    if mismatch.is_ideal and not scenario.array.ideal_weights:
        n = scenario.array.n_elements
        return lambda u: ula.ideal_gain_from_sine_offset(u, n)
    if scenario.gain_eval == "direct":
        def direct(u):
            u = np.atleast_1d(np.asarray(u, dtype=float))
            out = np.empty_like(u)
            chunk = max(1, 2_000_000 // mismatch.n_elements)
            for i in range(0, u.size, chunk):
                out[i:i + chunk] = ula.gain_from_sine_offset(
                    u[i:i + chunk], mismatch, scenario.array.ideal_weights)
            return out
        return direct
    # table mode: dense symmetric grid with an exact point at u = 0
    n = scenario.array.n_elements
    step = (2.0 / n) / _GAIN_TABLE_POINTS_PER_LOBE
    m = int(np.ceil(max(u_max, step) / step)) + 1
    pos = np.arange(1, m + 1) * step
    grid = np.concatenate([-pos[::-1], [0.0], pos])
    table = ula.gain_from_sine_offset(grid, mismatch, scenario.array.ideal_weights)
    return lambda u: np.interp(u, grid, table)


def _policy_sine_offsets(scenario: ScenarioConfig, run: _RunData,
                         policy: PointingPolicy) -> tuple[np.ndarray, np.ndarray]:
    """u = sin(theta_hat) - sin(theta_true) per step, for both vehicles."""
    frame = scenario.frame
    steps = frame.steps_per_bi
    n_bi = scenario.n_bi_per_run
    n_steps = scenario.n_steps_per_run

    if policy.variant is PolicyVariant.IDEAL_ORACLE:
        zero = np.zeros(n_steps)
        return zero, zero

    if policy.variant is PolicyVariant.CONVENTIONAL_BA:
        anchors = np.repeat(run.h2[::steps][:n_bi], steps)
        noise = np.repeat(run.n_ba, steps)
        if scenario.conventional_uses_measured_distance:
            d_est = run.d_true + policy.ranging_std * np.repeat(
                run.z_conv, frame.steps_per_distance_update)[:n_steps]
        else:
            d_est = run.d_true
        est = protocol.conventional_los_estimate(anchors, run.h1, d_est, noise)
    else:
        d_hat = run.d_true + policy.ranging_std * np.repeat(
            run.z_sensor, frame.steps_per_distance_update)[:n_steps]
        est = protocol.sensor_aided_los_estimate(run.predicted_h2, run.h1, d_hat)

    pointing = protocol.pointing_angles(policy, run.pitch1, run.pitch2, est, run.los)
    u1 = np.sin(pointing.theta_hat_1) - np.sin(pointing.theta_true_1)
    u2 = np.sin(pointing.theta_hat_2) - np.sin(pointing.theta_true_2)
    return u1, u2


def _simulate_run(scenario: ScenarioConfig, run_seed_seq, csv_cache=None) -> dict:
    """Evaluate every policy over one run; returns per-policy per-BI arrays."""
    frame = scenario.frame
    steps = frame.steps_per_bi
    n_bi = scenario.n_bi_per_run
    run = _build_run(scenario, run_seed_seq, csv_cache)

    offsets = {}
    u_max = 0.0
    for policy in scenario.policies:
        key = (policy.variant, policy.ranging_std)
        if key in offsets:
            continue
        u1, u2 = _policy_sine_offsets(scenario, run, policy)
        offsets[key] = (u1, u2)
        if policy.variant is not PolicyVariant.IDEAL_ORACLE:
            u_max = max(u_max, float(np.max(np.abs(u1))), float(np.max(np.abs(u2))))

    gain1 = _gain_evaluator(scenario, run.mismatch1, u_max)
    gain2 = _gain_evaluator(scenario, run.mismatch2, u_max)
    peak1 = float(np.asarray(gain1(np.array([0.0])))[0])
    peak2 = float(np.asarray(gain2(np.array([0.0])))[0])

    noise_dbm = chan.noise_power_dbm(scenario.channel)
    pl = chan.path_loss_db(run.d_true, scenario.channel, run.shadow_step_db)

    def snr_from_gains(g1_db, g2_db):
        rx = scenario.channel.tx_power_dbm + g1_db + g2_db - pl
        return chan.snr(rx, noise_dbm)

    with np.errstate(divide="ignore"):
        snr_ideal = snr_from_gains(10 * np.log10(peak1), 10 * np.log10(peak2))
    threshold = snr_ideal * 10.0 ** (-protocol.FRAME_ERROR_MARGIN_DB / 10.0)

    out = {}
    for policy in scenario.policies:
        key = (policy.variant, policy.ranging_std)
        if key in out:
            continue
        if policy.variant is PolicyVariant.IDEAL_ORACLE:
            snr = snr_ideal
        else:
            u1, u2 = offsets[key]
            with np.errstate(divide="ignore"):
                g1_db = 10 * np.log10(gain1(u1))
                g2_db = 10 * np.log10(gain2(u2))
            snr = snr_from_gains(g1_db, g2_db)
        ok = ~np.any(snr.reshape(n_bi, steps) < threshold.reshape(n_bi, steps),
                     axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            gap_db = 10 * np.log10(snr / snr_ideal)
        margin = gap_db.reshape(n_bi, steps).min(axis=1) \
            + protocol.FRAME_ERROR_MARGIN_DB
        eta = protocol.efficiency(policy, frame)
        rate_per_step = np.log2(1.0 + snr)
        thr = eta * scenario.channel.bandwidth \
            * rate_per_step.reshape(n_bi, steps).mean(axis=1)
        thr[~ok] = 0.0
        out[key] = (thr, margin, ok)
    return out


def run_scenario(scenario: ScenarioConfig) -> SimResult:
    """Run the full Monte Carlo: ``n_monte_carlo`` runs, every policy, shared
    randomness within runs. Deterministic given (config, master_seed)."""
    problems = scenario.validate()
    if problems:
        raise ConfigError(problems)
    n_runs = scenario.n_monte_carlo
    run_seeds = np.random.SeedSequence(scenario.master_seed).spawn(n_runs)
    csv_cache: dict = {}

    per_policy: dict = {
        (p.variant, p.ranging_std): ([], [], []) for p in scenario.policies
    }
    for rs in run_seeds:
        result = _simulate_run(scenario, rs, csv_cache)
        for key, (thr, margin, ok) in result.items():
            if key in per_policy:
                acc = per_policy[key]
                acc[0].append(thr)
                acc[1].append(margin)
                acc[2].append(ok)

    labels = _policy_labels(scenario.policies)
    results = []
    for policy, label in zip(scenario.policies, labels):
        key = (policy.variant, policy.ranging_std)
        thr = np.concatenate(per_policy[key][0])
        margin = np.concatenate(per_policy[key][1])
        ok = np.concatenate(per_policy[key][2])
        results.append(PolicyResult(
            policy=policy,
            label=label,
            efficiency=protocol.efficiency(policy, scenario.frame),
            mean_throughput_bps=float(thr.mean()),
            frame_error_rate=float(1.0 - ok.mean()),
            throughput_bps=thr,
            min_snr_margin_db=margin,
            frame_ok=ok,
        ))
    return SimResult(
        scenario=scenario,
        policies=tuple(results),
        n_runs=n_runs,
        n_bi_per_run=scenario.n_bi_per_run,
        master_seed=scenario.master_seed,
        config_hash=scenario.config_hash(),
    )


def run_bi(scenario: ScenarioConfig, policy: PointingPolicy, bi_index: int,
           rng_stream) -> BiRecord:
    """Evaluate one BI of one run for one policy.

    ``rng_stream`` identifies the run: a ``numpy.random.SeedSequence`` (or int
    seed) from which the run's seven noise streams are split exactly as in
    ``run_scenario``.
    """
    problems = scenario.validate()
    if problems:
        raise ConfigError(problems)
    if not 0 <= bi_index < scenario.n_bi_per_run:
        raise ValueError(
            f"bi_index {bi_index} out of range [0, {scenario.n_bi_per_run})"
        )
    if not isinstance(rng_stream, np.random.SeedSequence):
        rng_stream = np.random.SeedSequence(rng_stream)
    result = _simulate_run(scenario, rng_stream)
    thr, margin, ok = result[(policy.variant, policy.ranging_std)]
    return BiRecord(
        run=0,
        bi_index=bi_index,
        policy_label=policy.variant.value,
        efficiency=protocol.efficiency(policy, scenario.frame),
        throughput_bps=float(thr[bi_index]),
        min_snr_margin_db=float(margin[bi_index]),
        frame_ok=bool(ok[bi_index]),
    )


def sweep(scenario: ScenarioConfig, axis: str, values) -> list[SimResult]:
    """Re-run the scenario once per axis value with seeds held fixed.

    Axes: ``bi_duration`` (seconds), ``beamwidth`` (theta_3dB in radians,
    mapped to N = round(0.866/theta_3dB)), ``ranging_std`` (meters, applied to
    every SensorAided policy).
    """
    if axis not in SWEEP_AXES:
        raise InvalidAxisValue(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    values = list(values)
    if not values:
        raise InvalidAxisValue("values must not be empty")

    configs = []
    for v in values:
        try:
            v = float(v)
        except (TypeError, ValueError):
            raise InvalidAxisValue(f"{axis} value {v!r} is not a number") from None
        if axis == "bi_duration":
            try:
                frame = replace(scenario.frame, bi_duration=v)
            except ValueError as exc:
                raise InvalidAxisValue(f"bi_duration {v}: {exc}") from None
            cfg = replace(scenario, frame=frame)
        elif axis == "beamwidth":
            if not v > 0:
                raise InvalidAxisValue(f"beamwidth must be > 0 rad, got {v}")
            n = ula.elements_for_beamwidth(v)
            cfg = replace(scenario, array=replace(scenario.array, n_elements=n))
        else:
            if v < 0:
                raise InvalidAxisValue(f"ranging_std must be >= 0, got {v}")
            if not any(p.variant is PolicyVariant.SENSOR_AIDED
                       for p in scenario.policies):
                raise InvalidAxisValue(
                    "ranging_std sweep requires at least one sensor_aided policy"
                )
            policies = tuple(
                replace(p, ranging_std=v)
                if p.variant is PolicyVariant.SENSOR_AIDED else p
                for p in scenario.policies
            )
            cfg = replace(scenario, policies=policies)
        problems = cfg.validate()
        if problems:
            raise InvalidAxisValue(f"{axis} value {v}: " + "; ".join(problems))
        configs.append(cfg)

    return [run_scenario(cfg) for cfg in configs]


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def write_result_csv(result: SimResult, path) -> None:
    """Per-BI records, one row per (run, bi, policy), deterministic bytes."""
    n_bi = result.n_bi_per_run
    with open(path, "w", newline="") as fh:
        fh.write(f"# {RECORDS_SCHEMA}\n")
        fh.write(f"# config_hash={result.config_hash} master_seed={result.master_seed}\n")
        fh.write("run,bi_index,policy,efficiency,throughput_bps,"
                 "min_snr_margin_db,frame_ok\n")
        for pol in result.policies:
            eta = repr(pol.efficiency)
            label = pol.label
            thr = pol.throughput_bps
            margin = pol.min_snr_margin_db
            ok = pol.frame_ok
            lines = []
            for i in range(thr.size):
                run_idx, bi_idx = divmod(i, n_bi)
                lines.append(
                    f"{run_idx},{bi_idx},{label},{eta},{thr[i]!r},"
                    f"{margin[i]!r},{int(ok[i])}\n"
                )
                if len(lines) >= 65536:
                    fh.writelines(lines)
                    lines = []
            fh.writelines(lines)


def write_result_json(result: SimResult, path) -> None:
    """Summary: per-policy aggregates plus the full config echo."""
    doc = {
        "schema": SUMMARY_SCHEMA,
        "config_hash": result.config_hash,
        "master_seed": result.master_seed,
        "n_runs": result.n_runs,
        "n_bi_per_run": result.n_bi_per_run,
        "policies": [
            {
                "label": p.label,
                "variant": p.policy.variant.value,
                "ranging_std_m": p.policy.ranging_std,
                "efficiency": p.efficiency,
                "mean_throughput_bps": p.mean_throughput_bps,
                "frame_error_rate": p.frame_error_rate,
            }
            for p in result.policies
        ],
        "config": result.scenario.to_dict(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sweep_csv(results: list[SimResult], axis: str, values, path) -> None:
    """Plot-ready combined CSV: axis_value, policy, mean throughput, FER."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# {SWEEP_SCHEMA} axis={axis}\n")
        if results:
            fh.write(f"# master_seed={results[0].master_seed}\n")
        fh.write("axis_value,policy,mean_throughput_bps,frame_error_rate\n")
        for value, result in zip(values, results):
            for p in result.policies:
                fh.write(f"{float(value)!r},{p.label},"
                         f"{p.mean_throughput_bps!r},{p.frame_error_rate!r}\n")
