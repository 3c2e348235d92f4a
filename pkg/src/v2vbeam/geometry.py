"""Elevation geometry of the two-vehicle link: pitch, nominal and true LOS.

Everything is 2D (elevation only); azimuth is fixed at zero. Vehicle 2 sees
the link mirrored, so its LOS reference is the negated elevation of vehicle 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "VehicleGeometry",
    "LinkState",
    "pitch_angle",
    "los_nominal",
    "los_true",
    "los_true_approx",
    "check_small_angle_regime",
]

#: |h - rest| / distance above this leaves the small-angle regime of the
#: approximate LOS decomposition.
SMALL_ANGLE_RATIO = 0.1


@dataclass(frozen=True)
class VehicleGeometry:
    """Static vehicle dimensions: length (m) and antenna rest height (m)."""

    length: float
    rest_height: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"length must be > 0, got {self.length}")
        if not self.rest_height > 0:
            raise ValueError(f"rest_height must be > 0, got {self.rest_height}")


@dataclass(frozen=True)
class LinkState:
    """Link geometry at one time step.

    ``distance`` is the true inter-vehicle distance D[t]; ``measured_distance``
    is the ranging estimate D_hat[t] available to the sensor-aided policy.
    """

    time_index: int
    h1: float
    h2: float
    distance: float
    measured_distance: float

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError(f"distance must be > 0, got {self.distance}")
        if not self.measured_distance > 0:
            raise ValueError(
                f"measured_distance must be > 0, got {self.measured_distance}"
            )


def pitch_angle(h, rest_height, length):
    """Pitch from stroke: atan((h - rest) / (length / 2)). Odd in (h - rest)."""
    return np.arctan((h - rest_height) / (0.5 * length))


def los_nominal(geom1: VehicleGeometry, geom2: VehicleGeometry, distance):
    """LOS elevation at rest: atan((rest2 - rest1) / D)."""
    return np.arctan((geom2.rest_height - geom1.rest_height) / distance)


def los_true(h1, h2, distance):
    """Instantaneous LOS elevation: atan((h2 - h1) / D)."""
    return np.arctan((h2 - h1) / distance)


def los_true_approx(h1, h2, distance, geom1: VehicleGeometry, geom2: VehicleGeometry):
    """Small-stroke decomposition of the true LOS.

    Nominal LOS minus each vehicle's rotation contribution seen across the
    link, atan((h - rest) / D), with vehicle 2's contribution mirrored (its
    antenna rising raises the LOS seen from vehicle 1). Valid when stroke
    excursions are much smaller than the distance; the error vanishes as D
    grows with heights fixed. Exposed for validating the exact form.
    """
    return (
        los_nominal(geom1, geom2, distance)
        - np.arctan((h1 - geom1.rest_height) / distance)
        - np.arctan((geom2.rest_height - h2) / distance)
    )


def check_small_angle_regime(h, rest_height, distance) -> bool:
    """Warn (once per call site pattern) if |h - rest| / D exceeds 0.1.

    Returns True when the regime holds.
    """
    ratio = np.max(np.abs(np.asarray(h) - rest_height) / np.min(distance))
    if ratio > SMALL_ANGLE_RATIO:
        warnings.warn(
            f"stroke-to-distance ratio {ratio:.3f} exceeds {SMALL_ANGLE_RATIO}; "
            "the small-angle LOS approximation degrades",
            stacklevel=2,
        )
        return False
    return True
