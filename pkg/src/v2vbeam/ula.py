"""Uniform linear array response: steering vectors, RF mismatch, pointing gain.

Half-wavelength element spacing throughout. The pointing gain is
G = (1/N) |a(theta_hat)^H a(theta)|^2 with the same per-element mismatch
h_n = rho_n e^{j psi_n} on both vectors, so the gain depends on the angles
only through u = sin(theta_hat) - sin(theta) and peaks at
(sum rho_n^2)^2 / N when u = 0. With an ideal array (all h_n = 1) the gain
reduces to the closed-form ratio N |sin(pi u N / 2) / (N sin(pi u / 2))|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArrayConfig",
    "RfMismatch",
    "steering_vector",
    "array_gain",
    "gain_from_sine_offset",
    "ideal_gain_from_sine_offset",
    "beamwidth_3db",
    "elements_for_beamwidth",
    "draw_mismatch",
]

#: 3 dB beamwidth coefficient for a half-wavelength ULA.
BEAMWIDTH_COEFF = 0.866


@dataclass(frozen=True)
class ArrayConfig:
    """ULA size and RF mismatch statistics.

    ``amplitude_mismatch_db_std`` is the std of 10 log10(rho_n) in dB;
    ``phase_mismatch_bound`` is the half-width of the uniform phase error in
    radians. With ``ideal_weights`` the beamforming weights ignore the
    mismatch (the response still carries it); default is the literal reading
    with mismatched weights on both sides.
    """

    n_elements: int
    amplitude_mismatch_db_std: float = 0.0
    phase_mismatch_bound: float = 0.0
    ideal_weights: bool = False

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError(f"n_elements must be >= 1, got {self.n_elements}")
        if self.amplitude_mismatch_db_std < 0:
            raise ValueError("amplitude_mismatch_db_std must be >= 0")
        if not 0 <= self.phase_mismatch_bound < np.pi:
            raise ValueError(
                f"phase_mismatch_bound must be in [0, pi), got {self.phase_mismatch_bound}"
            )


@dataclass(frozen=True)
class RfMismatch:
    """One hardware realization of per-element complex factors h_n."""

    factors: np.ndarray

    def __post_init__(self):
        factors = np.asarray(self.factors, dtype=complex)
        object.__setattr__(self, "factors", factors)
        if factors.ndim != 1 or factors.size == 0:
            raise ValueError("factors must be a non-empty 1-D array")
        if np.any(np.abs(factors) <= 0):
            raise ValueError("mismatch amplitudes must be positive")

    @property
    def n_elements(self) -> int:
        return self.factors.size

    @property
    def amplitudes(self) -> np.ndarray:
        """rho_n = |h_n|."""
        return np.abs(self.factors)

    @property
    def power_weights(self) -> np.ndarray:
        """rho_n^2, the weights governing the literal-mismatch gain pattern."""
        return np.abs(self.factors) ** 2

    @classmethod
    def ideal(cls, n_elements: int) -> "RfMismatch":
        return cls(factors=np.ones(n_elements, dtype=complex))

    @property
    def is_ideal(self) -> bool:
        return bool(np.all(self.factors == 1.0))


def draw_mismatch(config: ArrayConfig, seed) -> RfMismatch:
    """Draw one mismatch realization: 10log10(rho_n) ~ N(0, delta^2),
    psi_n ~ U(-phi, +phi). Deterministic given seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    amp_db = rng.normal(0.0, config.amplitude_mismatch_db_std, config.n_elements)
    phase = rng.uniform(-config.phase_mismatch_bound, config.phase_mismatch_bound,
                        config.n_elements)
    rho = 10.0 ** (amp_db / 10.0)
    return RfMismatch(factors=rho * np.exp(1j * phase))


def steering_vector(theta, config: ArrayConfig, mismatch: RfMismatch | None = None):
    """a_n(theta) = h_n exp(-j pi (n-1) sin(theta)), n = 1..N."""
    if mismatch is None:
        mismatch = RfMismatch.ideal(config.n_elements)
    if mismatch.n_elements != config.n_elements:
        raise ValueError(
            f"mismatch has {mismatch.n_elements} elements, config expects "
            f"{config.n_elements}"
        )
    n = np.arange(config.n_elements)
    return mismatch.factors * np.exp(-1j * np.pi * n * np.sin(theta))


def array_gain(theta_hat, theta_true, config: ArrayConfig,
               mismatch: RfMismatch | None = None) -> float:
    """Pointing gain (1/N) |a(theta_hat)^H a(theta_true)|^2, linear scale.

    Both vectors carry the same mismatch realization unless
    ``config.ideal_weights`` is set, in which case the weight vector is ideal
    and only the response is mismatched.
    """
    if mismatch is None:
        mismatch = RfMismatch.ideal(config.n_elements)
    response = steering_vector(theta_true, config, mismatch)
    if config.ideal_weights:
        weights = steering_vector(theta_hat, config, RfMismatch.ideal(config.n_elements))
    else:
        weights = steering_vector(theta_hat, config, mismatch)
    inner = np.vdot(weights, response)
    return float(np.abs(inner) ** 2 / config.n_elements)


def ideal_gain_from_sine_offset(u, n_elements: int):
    """Closed-form ideal-array gain N |sin(pi u N/2) / (N sin(pi u/2))|^2.

    ``u`` is sin(theta_hat) - sin(theta); the removable singularities at
    u = 2k (coherent sum) evaluate to N. Accepts scalars or arrays.
    """
    u = np.asarray(u, dtype=float)
    num = np.sin(np.pi * u * n_elements / 2.0)
    den = n_elements * np.sin(np.pi * u / 2.0)
    out = np.full(u.shape, float(n_elements))
    nz = den != 0.0
    ratio = np.zeros_like(out)
    np.divide(num, den, out=ratio, where=nz)
    out[nz] = n_elements * ratio[nz] ** 2
    if out.ndim == 0:
        return float(out)
    return out


def gain_from_sine_offset(u, mismatch: RfMismatch, ideal_weights: bool = False):
    """Mismatched-array gain as a function of u = sin(theta_hat) - sin(theta).

    Equivalent to ``array_gain`` for any angle pair with that sine difference.
    Accepts scalar or array ``u``; cost is O(N) per point.
    """
    u = np.asarray(u, dtype=float)
    n = mismatch.n_elements
    idx = np.arange(n)
    # w_n = rho_n^2 (literal weights) or h_n (ideal weights on mismatched response)
    w = mismatch.factors if ideal_weights else mismatch.power_weights
    phases = np.exp(1j * np.pi * np.multiply.outer(u, idx))
    inner = phases @ w
    out = np.abs(inner) ** 2 / n
    if out.ndim == 0:
        return float(out)
    return out


def beamwidth_3db(n_elements: int) -> float:
    """3 dB beamwidth in radians, 0.866 / N."""
    if n_elements < 1:
        raise ValueError(f"n_elements must be >= 1, got {n_elements}")
    return BEAMWIDTH_COEFF / n_elements


def elements_for_beamwidth(theta_3db: float) -> int:
    """Element count realizing a target beamwidth: round(0.866 / theta_3db)."""
    if not theta_3db > 0:
        raise ValueError(f"theta_3db must be > 0, got {theta_3db}")
    n = int(round(BEAMWIDTH_COEFF / theta_3db))
    return max(n, 1)
