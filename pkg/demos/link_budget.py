"""Link budget at 60 GHz over short V2V ranges.

Path loss, boresight SNR, and achievable rate vs distance with the default
channel parameters. Shadowing is left out here so the numbers are the
deterministic backbone the Monte Carlo runs scatter around.
"""

import numpy as np

from v2vbeam import channel, ula


def main():
    params = channel.ChannelParams()
    n = 64
    g_bf = 10 * np.log10(n)
    npow = channel.noise_power_dbm(params)

    print(f"carrier {params.carrier_freq / 1e9:g} GHz, bandwidth "
          f"{params.bandwidth / 1e9:g} GHz, tx {params.tx_power_dbm:g} dBm")
    print(f"noise power {npow:.3f} dBm, per-side beamforming gain "
          f"{g_bf:.2f} dB (N={n})\n")

    print("distance  path loss   rx power   SNR      rate (eta=0.99)")
    for d in (1.0, 2.0, 5.0, 10.0, 20.0, 50.0):
        pl = channel.path_loss_db(d, params)
        rx = params.tx_power_dbm + 2 * g_bf - pl
        snr = channel.snr(rx, npow)
        rate = channel.rate_bps(0.99, params.bandwidth, snr)
        print(f"  {d:5.1f} m   {pl:6.2f} dB   {rx:+7.2f} dBm  "
              f"{10 * np.log10(snr):5.1f} dB  {rate / 1e9:6.2f} Gbps")

    print("\nsame 5 m link vs array size (both ends steered on target):")
    for n in (8, 16, 32, 64, 128):
        g = 10 * np.log10(n)
        rx = params.tx_power_dbm + 2 * g - channel.path_loss_db(5.0, params)
        snr = channel.snr(rx, npow)
        rate = channel.rate_bps(0.99, params.bandwidth, snr)
        print(f"  N={n:4d}: SNR {10 * np.log10(snr):5.1f} dB, "
              f"rate {rate / 1e9:6.2f} Gbps, "
              f"beam {np.rad2deg(ula.beamwidth_3db(n)):.2f} deg")


if __name__ == "__main__":
    main()
