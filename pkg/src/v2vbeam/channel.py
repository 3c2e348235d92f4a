"""Link budget for the narrowband V2V link.

Unit conventions at every boundary: powers in dBm, gains and losses in dB,
SNR linear, rate in bits/s. The free-space-plus-exponent path loss is
PL(D) = 20 log10(4 pi / lambda) + 10 kappa log10(D) + chi, with chi a
log-normal shadowing term in dB.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelParams",
    "LinkBudgetSample",
    "SPEED_OF_LIGHT",
    "path_loss_db",
    "noise_power_dbm",
    "snr",
    "rate_bps",
    "draw_shadowing_db",
]

SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class ChannelParams:
    """Channel and radio constants.

    carrier_freq : Hz. pathloss_exponent : kappa. shadowing_std_db : dB.
    bandwidth : Hz. noise_figure_db : dB. tx_power_dbm : dBm.
    noise_floor_dbm_per_hz : dBm/Hz (thermal floor).
    """

    carrier_freq: float = 60e9
    pathloss_exponent: float = 2.0
    shadowing_std_db: float = 5.8
    bandwidth: float = 2.16e9
    noise_figure_db: float = 6.0
    tx_power_dbm: float = 1.0
    noise_floor_dbm_per_hz: float = -174.0

    def __post_init__(self):
        if not self.carrier_freq > 0:
            raise ValueError(f"carrier_freq must be > 0, got {self.carrier_freq}")
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")
        if not self.pathloss_exponent > 0:
            raise ValueError(
                f"pathloss_exponent must be > 0, got {self.pathloss_exponent}"
            )
        if self.shadowing_std_db < 0:
            raise ValueError("shadowing_std_db must be >= 0")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq


@dataclass(frozen=True)
class LinkBudgetSample:
    """One step of the budget. The decomposition identity
    rx = tx + gain1 + gain2 - path_loss is enforced at construction."""

    path_loss_db: float
    gain1_db: float
    gain2_db: float
    rx_power_dbm: float
    snr_linear: float
    tx_power_dbm: float

    def __post_init__(self):
        if self.snr_linear < 0:
            raise ValueError("snr_linear must be >= 0")
        want = self.tx_power_dbm + self.gain1_db + self.gain2_db \
            - self.path_loss_db
        if abs(self.rx_power_dbm - want) > 1e-9:
            raise ValueError(
                f"rx_power_dbm {self.rx_power_dbm} breaks the budget identity "
                f"tx + g1 + g2 - pl = {want}"
            )

    @classmethod
    def from_budget(cls, params: ChannelParams, path_loss_db: float,
                    gain1_db: float, gain2_db: float) -> "LinkBudgetSample":
        rx = params.tx_power_dbm + gain1_db + gain2_db - path_loss_db
        return cls(
            path_loss_db=path_loss_db,
            gain1_db=gain1_db,
            gain2_db=gain2_db,
            rx_power_dbm=rx,
            snr_linear=snr(rx, noise_power_dbm(params)),
            tx_power_dbm=params.tx_power_dbm,
        )


def path_loss_db(distance, params: ChannelParams, shadow_db=0.0):
    """PL(D) in dB including the shadowing term. ``distance`` > 0 required."""
    if np.any(np.asarray(distance) <= 0):
        raise ValueError("distance must be > 0")
    const = 20.0 * np.log10(4.0 * np.pi / params.wavelength)
    return const + 10.0 * params.pathloss_exponent * np.log10(distance) + shadow_db


def noise_power_dbm(params: ChannelParams) -> float:
    """Thermal noise power over the band: floor + 10 log10(B) + NF."""
    return (params.noise_floor_dbm_per_hz
            + 10.0 * np.log10(params.bandwidth)
            + params.noise_figure_db)


def snr(rx_power_dbm, noise_power_dbm):
    """Linear SNR from powers in dBm."""
    return 10.0 ** ((rx_power_dbm - noise_power_dbm) / 10.0)


def rate_bps(efficiency, bandwidth, snr_linear):
    """Shannon rate eta * B * log2(1 + SNR), bits/s."""
    return efficiency * bandwidth * np.log2(1.0 + snr_linear)


def draw_shadowing_db(params: ChannelParams, seed, size=None):
    """Shadowing draws chi ~ N(0, sigma_dB^2), in dB. Deterministic given seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.normal(0.0, params.shadowing_std_db, size)
