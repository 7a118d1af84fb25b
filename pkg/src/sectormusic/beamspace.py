"""Sector prefiltering with a bank of steered prolate sequences."""
from dataclasses import dataclass

import numpy as np

from .array_model import steering_matrix, steering_vector


@dataclass(frozen=True)
class WeightingMatrix:
    """N x n prefilter whose columns are DPSS steered to ``sector_center``.

    Attributes
    ----------
    matrix : ndarray, complex, shape (N, n)
    sector_center : float
        Steering direction theta0 in radians.
    bank_params : tuple
        ``(N, B, n)`` of the DPSS bank it was built from.
    """

    matrix: np.ndarray
    sector_center: float
    bank_params: tuple

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def H(self):
        return self.matrix.conj().T


def column_phases(n):
    """Per-column normalisation: 1 for even k, -j for odd k."""
    return np.where(np.arange(n) % 2 == 0, 1.0 + 0j, -1j)


def build_weighting(geom, bank, theta0=0.0, phases=None):
    """Weighting matrix ``w[l, k] = nu_k v_l^(k) exp(j omega0 l)``.

    Parameters
    ----------
    geom : ArrayGeometry
    bank : DpssBank
        Must have ``bank.order == geom.num_sensors``.
    theta0 : float
        Sector center in radians.
    phases : array_like, optional
        Column factors ``nu_k``; defaults to :func:`column_phases`. Every
        downstream quantity is a modulus and does not depend on them.
    """
    N = geom.num_sensors
    if bank.order != N:
        raise ValueError(f"bank order {bank.order} != number of sensors {N}")
    n = bank.count
    nu = column_phases(n) if phases is None else np.asarray(phases, dtype=complex)
    ramp = steering_vector(geom, theta0)
    W = bank.sequences * ramp[:, None] * nu[None, :]
    return WeightingMatrix(W, float(theta0), (N, bank.half_bandwidth, n))


def prefilter(W, snapshots):
    """Reduced-dimension data ``Y = W^H X`` (n x K)."""
    X = np.asarray(snapshots)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != W.shape[0]:
        raise ValueError(f"snapshot rows {X.shape[0]} != W rows {W.shape[0]}")
    return W.H @ X


def beamspace_steering(W, geom, alpha):
    """Beamspace manifold vector ``W^H a(alpha)``."""
    return prefilter(W, steering_vector(geom, alpha))[:, 0]


def beamspace_steering_matrix(W, geom, alphas):
    """``W^H a(alpha)`` for many angles, one per column."""
    return W.H @ steering_matrix(geom, alphas)


def array_gain(W, geom, alpha=None):
    """Fraction of steering energy passed by W, ``|W^H a|^2 / N``.

    Returns ``(linear, db)``. ``alpha`` defaults to the sector center.
    """
    if alpha is None:
        alpha = W.sector_center
    b = beamspace_steering(W, geom, alpha)
    linear = np.vdot(b, b).real / geom.num_sensors
    return linear, 10.0 * np.log10(linear)
