"""Discrete-time Monte Carlo simulator for mmWave V2V beam pointing.

Two trucks exchange data over a 60 GHz line-of-sight link while cabin
suspension strokes rock their roof-mounted uniform linear arrays. The package
models the stroke dynamics (AR fitting, prediction, synthesis), the pointing
geometry, hardware-impaired array gains, the link budget, and three pointing
policies (conventional beam alignment, sensor-aided prediction, and an ideal
oracle), and aggregates per-beacon-interval throughput and frame error
statistics over Monte Carlo runs.
"""

from .dynamics import (
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
from .geometry import (
    LinkState,
    VehicleGeometry,
    los_nominal,
    los_true,
    los_true_approx,
    pitch_angle,
)
from .ula import (
    ArrayConfig,
    RfMismatch,
    array_gain,
    beamwidth_3db,
    draw_mismatch,
    elements_for_beamwidth,
    gain_from_sine_offset,
    ideal_gain_from_sine_offset,
    steering_vector,
)
from .channel import (
    ChannelParams,
    LinkBudgetSample,
    noise_power_dbm,
    path_loss_db,
    rate_bps,
    snr,
)
from .protocol import (
    FRAME_ERROR_MARGIN_DB,
    FrameConfig,
    LengthMismatch,
    MissingAnchor,
    MissingPrediction,
    PointingDecision,
    PointingPolicy,
    PolicyVariant,
    efficiency,
    estimate_los,
    frame_ok,
    min_snr_margin_db,
    pointing_angles,
)
from .sim import (
    BiRecord,
    ConfigError,
    InvalidAxisValue,
    PolicyResult,
    ScenarioConfig,
    SimResult,
    StrokeSource,
    run_bi,
    run_scenario,
    scenario_from_dict,
    sweep,
    write_result_csv,
    write_result_json,
    write_sweep_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ArModel", "StrokeTrace", "fit_ar", "predict", "predict_block",
    "interpolate", "synthesize", "default_stroke_model", "read_trace_csv",
    "write_trace_csv",
    "TraceTooShort", "DegenerateTrace", "HistoryTooShort", "UnstableModel",
    "TraceFormatError",
    "VehicleGeometry", "LinkState", "pitch_angle", "los_nominal", "los_true",
    "los_true_approx",
    "ArrayConfig", "RfMismatch", "steering_vector", "array_gain",
    "draw_mismatch", "gain_from_sine_offset", "ideal_gain_from_sine_offset",
    "beamwidth_3db", "elements_for_beamwidth",
    "ChannelParams", "LinkBudgetSample", "path_loss_db", "noise_power_dbm",
    "snr", "rate_bps",
    "FrameConfig", "PointingPolicy", "PolicyVariant", "PointingDecision",
    "efficiency", "estimate_los", "pointing_angles", "frame_ok",
    "min_snr_margin_db", "FRAME_ERROR_MARGIN_DB",
    "MissingPrediction", "MissingAnchor", "LengthMismatch",
    "ScenarioConfig", "StrokeSource", "BiRecord", "PolicyResult", "SimResult",
    "ConfigError", "InvalidAxisValue", "run_bi", "run_scenario", "sweep",
    "scenario_from_dict", "write_result_csv", "write_result_json",
    "write_sweep_csv",
    "__version__",
]
