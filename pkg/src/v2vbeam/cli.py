"""Command-line front end.

Four subcommands:

* ``fit``       fit an AR model to a measured stroke trace CSV
* ``simulate``  run one scenario, write per-BI records CSV + summary JSON
* ``sweep``     re-run a scenario along one axis, write a combined CSV
* ``validate``  check a config file and report every problem at once

Sweep values are given in presentation units (bi_duration in milliseconds,
beamwidth in degrees, ranging_std in meters) and converted to SI internally.
All outputs embed the config hash and master seed; reruns with the same
config and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import dynamics, sim

MODEL_SCHEMA = "v2vbeam-ar-model-v1"


def _load_config(path: str) -> sim.ScenarioConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise sim.ConfigError([f"config file not found: {path}"]) from None
    except json.JSONDecodeError as exc:
        raise sim.ConfigError([f"config is not valid JSON: {exc}"]) from None
    if not isinstance(raw, dict):
        raise sim.ConfigError(["config root must be a JSON object"])
    return sim.scenario_from_dict(raw)


def _cmd_fit(args) -> int:
    try:
        trace = dynamics.read_trace_csv(args.trace)
        model = dynamics.fit_ar(trace, args.order)
    except (dynamics.TraceFormatError, dynamics.TraceTooShort,
            dynamics.DegenerateTrace, dynamics.UnstableModel,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    doc = {
        "schema": MODEL_SCHEMA,
        **model.to_dict(),
        "sample_rate_hz": trace.sample_rate,
        "spectral_radius": model.spectral_radius,
        "source": {
            "path": str(args.trace),
            "sha256": dynamics.file_sha256(args.trace),
            "n_samples": len(trace),
        },
    }
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"fitted AR({model.order}): innovation variance "
          f"{model.innovation_variance:.4g}, spectral radius "
          f"{model.spectral_radius:.4f} -> {out}")
    return 0


def _cmd_simulate(args) -> int:
    try:
        cfg = _load_config(args.config)
    except sim.ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        result = sim.run_scenario(cfg)
    except sim.ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    sim.write_result_csv(result, outdir / "records.csv")
    sim.write_result_json(result, outdir / "summary.json")
    print(f"config_hash={result.config_hash} master_seed={result.master_seed}")
    for p in result.policies:
        print(f"{p.label}: mean throughput {p.mean_throughput_bps / 1e9:.4f} Gbps, "
              f"frame error rate {p.frame_error_rate:.4g}, "
              f"efficiency {p.efficiency:.4f}")
    print(f"wrote {outdir / 'records.csv'} and {outdir / 'summary.json'}")
    return 0


def _parse_values(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise sim.InvalidAxisValue(
            f"--values must be comma-separated numbers, got {text!r}"
        ) from None


def _cmd_sweep(args) -> int:
    try:
        cfg = _load_config(args.config)
    except sim.ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    try:
        raw_values = _parse_values(args.values)
        if args.axis == "bi_duration":
            values = [v * 1e-3 for v in raw_values]      # ms -> s
        elif args.axis == "beamwidth":
            values = [float(np.deg2rad(v)) for v in raw_values]  # deg -> rad
        else:
            values = raw_values                           # m
        results = sim.sweep(cfg, args.axis, values)
    except sim.InvalidAxisValue as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except sim.ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    sim.write_sweep_csv(results, args.axis, raw_values, out)
    print(f"swept {args.axis} over {raw_values} "
          f"({len(results)} x {len(cfg.policies)} policy results) -> {out}")
    return 0


def _cmd_validate(args) -> int:
    try:
        cfg = _load_config(args.config)
    except sim.ConfigError as exc:
        for msg in exc.messages:
            print(f"invalid: {msg}", file=sys.stderr)
        return 1
    print(f"config ok: hash {cfg.config_hash()}")
    print(f"  {cfg.n_monte_carlo} runs x {cfg.n_bi_per_run} BIs x "
          f"{len(cfg.policies)} policies, N={cfg.array.n_elements}, "
          f"T_BI={cfg.frame.bi_duration * 1e3:g} ms")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="v2vbeam",
        description="Monte Carlo simulator for mmWave V2V beam pointing policies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit an AR model to a stroke trace CSV")
    p_fit.add_argument("--trace", required=True,
                       help="input CSV with header time_s,height_m")
    p_fit.add_argument("--order", type=int, default=10, help="AR order (default 10)")
    p_fit.add_argument("--out", required=True, help="output model JSON path")
    p_fit.set_defaults(func=_cmd_fit)

    p_sim = sub.add_parser("simulate", help="run one scenario")
    p_sim.add_argument("--config", required=True, help="scenario config JSON")
    p_sim.add_argument("--out", required=True,
                       help="output directory (records.csv, summary.json)")
    p_sim.add_argument("--seed", type=int, default=None,
                       help="override the config's master_seed")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="re-run a scenario along one axis")
    p_sweep.add_argument("--config", required=True, help="scenario config JSON")
    p_sweep.add_argument("--axis", required=True, choices=sim.SWEEP_AXES)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated values: bi_duration in ms, "
                              "beamwidth in degrees, ranging_std in meters")
    p_sweep.add_argument("--out", required=True, help="output combined CSV path")
    p_sweep.add_argument("--seed", type=int, default=None,
                         help="override the config's master_seed")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("--config", required=True, help="scenario config JSON")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
