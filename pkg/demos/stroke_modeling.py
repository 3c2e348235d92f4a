"""Suspension stroke modeling walkthrough.

Generates a synthetic stroke record from the built-in AR(10) model, refits
the model from the record alone, and shows how prediction error grows with
horizon. The horizon table is the core of the sensor-aided story: a few
tens of milliseconds of lookahead is cheap, beyond that the strokes decohere.
"""

import numpy as np

from v2vbeam import dynamics

SEED = 2026


def main():
    model = dynamics.default_stroke_model(mean=0.5)
    trace = dynamics.synthesize(model, 50_000, SEED)
    print(f"synthesized {len(trace)} samples at {trace.sample_rate:g} Hz")
    print(f"  std {trace.samples.std():.4f} m around mean "
          f"{trace.samples.mean():.4f} m")

    fitted = dynamics.fit_ar(trace, model.order)
    err = np.abs(fitted.coefficients - model.coefficients)
    print(f"\nrefit AR({model.order}) from the record alone:")
    print("  lag   true      fitted    |err|")
    for k, (a, b) in enumerate(zip(model.coefficients, fitted.coefficients), 1):
        print(f"  {k:3d}  {a:+.4f}   {b:+.4f}   {abs(a - b):.4f}")
    print(f"  worst coefficient error {err.max():.4f}")

    # prediction error vs horizon, averaged over many start points
    rng = np.random.default_rng(SEED)
    starts = rng.integers(model.order, len(trace) - 60, size=400)
    horizon = 50
    errs = np.zeros(horizon)
    for s in starts:
        pred = dynamics.predict(fitted, trace.samples[:s], horizon)
        errs += (pred - trace.samples[s:s + horizon]) ** 2
    rmse = np.sqrt(errs / len(starts))

    print(f"\nprediction RMSE vs horizon (step = {1 / trace.sample_rate * 1e3:g} ms):")
    for h in (1, 2, 5, 10, 25, 50):
        print(f"  {h * 1000 / trace.sample_rate:6.0f} ms ahead: "
              f"{rmse[h - 1] * 100:6.2f} cm")
    print(f"stationary std for reference: {trace.samples.std() * 100:.2f} cm")


if __name__ == "__main__":
    main()
