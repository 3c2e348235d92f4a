"""Throughput vs beacon-interval length.

Longer BIs amortize the alignment overhead but let the beams go stale
between realignments. For the conventional policy those two effects fight:
throughput first rises with T_BI, then collapses once the suspension moves
the link out of the beam within a single BI. The sensor-aided policy
repoints every step, so it only sees the (small) signaling overhead shrink.

Writes demos/out/frame_length_sweep.csv.
"""

from pathlib import Path

from v2vbeam import protocol, sim

OUT = Path(__file__).parent / "out"

POLICIES = (
    protocol.PointingPolicy(protocol.PolicyVariant.IDEAL_ORACLE),
    protocol.PointingPolicy(protocol.PolicyVariant.CONVENTIONAL_BA),
    protocol.PointingPolicy(protocol.PolicyVariant.SENSOR_AIDED, ranging_std=0.1),
)

BI_MS = [10, 20, 30, 50, 100]


def main():
    cfg = sim.ScenarioConfig(policies=POLICIES, duration=100.0,
                             n_monte_carlo=30, master_seed=42)
    results = sim.sweep(cfg, "bi_duration", [v * 1e-3 for v in BI_MS])

    print(f"N = {cfg.array.n_elements}, {cfg.n_monte_carlo} runs x "
          f"{cfg.duration:g} s, paired seeds across the sweep\n")
    print("T_BI    ideal        conventional          sensor (10 cm)")
    for tbi, res in zip(BI_MS, results):
        ide = res.by_label("ideal_oracle")
        conv = res.by_label("conventional_ba")
        sens = res.by_label("sensor_aided")
        print(f"{tbi:4d} ms  {ide.mean_throughput_bps / 1e9:5.2f} Gbps   "
              f"{conv.mean_throughput_bps / 1e9:5.2f} Gbps (FER {conv.frame_error_rate:5.1%})   "
              f"{sens.mean_throughput_bps / 1e9:5.2f} Gbps (FER {sens.frame_error_rate:5.1%})")

    OUT.mkdir(exist_ok=True)
    path = OUT / "frame_length_sweep.csv"
    sim.write_sweep_csv(results, "bi_duration", [float(v) for v in BI_MS], path)
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
