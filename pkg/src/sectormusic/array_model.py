"""Uniform linear array geometry and steering vectors.

Angles are physical directions measured from broadside, in radians. Only the
ratio of sensor spacing to wavelength enters the phase model, so the array is
described by its sensor count and ``spacing_ratio = d / lambda``.
"""
from dataclasses import dataclass

import numpy as np

#: Beamwidth in degrees is ``BEAMWIDTH_CONSTANT / N``.
BEAMWIDTH_CONSTANT = 128.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array of omni-directional sensors.

    Parameters
    ----------
    num_sensors : int
        Number of sensors N (at least 3).
    spacing_ratio : float
        Inter-element spacing over wavelength, default half a wavelength.
    """

    num_sensors: int
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if int(self.num_sensors) != self.num_sensors or self.num_sensors < 3:
            raise ValueError("num_sensors must be an integer >= 3")
        if not self.spacing_ratio > 0:
            raise ValueError("spacing_ratio must be positive")

    @property
    def positions(self):
        """Sensor indices 0..N-1 as a float array."""
        return np.arange(self.num_sensors, dtype=float)


def electrical_angle(geom, alpha):
    """Per-sensor phase increment ``2 pi (d/lambda) sin(alpha)``."""
    return 2.0 * np.pi * geom.spacing_ratio * np.sin(alpha)


def steering_vector(geom, alpha):
    """Response of the array to a plane wave from ``alpha`` (radians).

    Element ``i`` is ``exp(j * omega * i)``; the reference sensor is element 0.
    """
    alpha = float(alpha)
    if not abs(alpha) <= np.pi / 2:
        raise ValueError(f"angle {alpha} rad outside [-pi/2, pi/2]")
    return np.exp(1j * electrical_angle(geom, alpha) * geom.positions)


def steering_matrix(geom, alphas):
    """Steering vectors for an array of angles, one per column (N x G).

    Vectorised variant of :func:`steering_vector` used for grid scans.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    omega = electrical_angle(geom, alphas)
    return np.exp(1j * np.outer(geom.positions, omega))


def direction_matrix(geom, alphas):
    """Direction matrix A with column m equal to ``steering_vector(alphas[m])``."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    if alphas.size == 0:
        raise ValueError("no sources")
    return np.column_stack([steering_vector(geom, a) for a in alphas])


def beamwidth_deg(geom, bw_constant=BEAMWIDTH_CONSTANT):
    """Array beamwidth in degrees, ``bw_constant / N``."""
    return bw_constant / geom.num_sensors


def delta_separation(geom, alpha1, alpha2):
    """Normalised separation ``N |omega1 - omega2| / (2 sqrt 3)``.

    This is the small-separation parameter all threshold formulas are written
    in. Raises ``ValueError`` for coincident angles.
    """
    diff = electrical_angle(geom, alpha1) - electrical_angle(geom, alpha2)
    if diff == 0.0:
        raise ValueError("zero separation")
    return geom.num_sensors * abs(diff) / (2.0 * np.sqrt(3.0))

