"""MUSIC null spectrum in element space and beamspace.

The null spectrum is evaluated with unit-norm manifold vectors (the steering
vector in element space, ``W^H a`` in beamspace), which keeps it in [0, 1] and
makes the signal-subspace form ``1 - sum |b^H e_i|^2`` exact.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .array_model import beamwidth_deg, steering_matrix, BEAMWIDTH_CONSTANT
from .errors import NumericalError

#: Smallest null-spectrum value inverted when forming ``P = 1 / D``.
SPECTRUM_FLOOR = 1e-15


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a Hermitian covariance, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    space: str = "element"

    @property
    def dim(self):
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class SpectrumGrid:
    """Null spectrum D and MUSIC spectrum 1/D sampled on ascending angles (deg)."""

    angles: np.ndarray
    null_values: np.ndarray
    spectrum_values: np.ndarray
    space: str = "element"


def eig_hermitian(cov, tol=1e-10):
    """Eigendecomposition of a :class:`CovarianceEstimate` (or bare matrix)."""
    R = getattr(cov, "matrix", cov)
    space = getattr(cov, "space", "element")
    R = np.asarray(R)
    scale = max(np.linalg.norm(R), 1.0)
    if np.linalg.norm(R - R.conj().T) > tol * scale:
        raise ValueError("covariance is not Hermitian")
    try:
        w, v = scipy.linalg.eigh(0.5 * (R + R.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver failed: {exc}") from exc
    return EigenDecomposition(w[::-1].copy(), v[:, ::-1].copy(), space)


def _check_order(M, dim):
    if not 0 <= M < dim:
        raise ValueError(f"no noise subspace: M={M} must be < dimension {dim}")


def normalize_columns(B):
    B = np.asarray(B)
    if B.ndim == 1:
        B = B[:, None]
    return B / np.linalg.norm(B, axis=0, keepdims=True)


def null_spectrum(eig, manifold, M, form="signal"):
    """Null spectrum for manifold vectors given as columns of ``manifold``.

    ``form="signal"`` uses ``1 - sum_{i<=M} |b^H e_i|^2``; ``form="noise"``
    sums the noise-subspace projections instead. Both agree to rounding.
    """
    _check_order(M, eig.dim)
    B = normalize_columns(manifold)
    if form == "signal":
        proj = eig.eigenvectors[:, :M].conj().T @ B
        D = 1.0 - np.sum(np.abs(proj) ** 2, axis=0)
    elif form == "noise":
        proj = eig.eigenvectors[:, M:].conj().T @ B
        D = np.sum(np.abs(proj) ** 2, axis=0)
    else:
        raise ValueError(f"unknown form {form!r}")
    return np.clip(D, 0.0, 1.0)


def null_spectrum_element(eig, geom, alpha, num_sources):
    """Element-space null spectrum at ``alpha`` (radians); scalar or array."""
    D = null_spectrum(eig, steering_matrix(geom, alpha), num_sources)
    return D[0] if np.ndim(alpha) == 0 else D


def null_spectrum_beamspace(eig, W, geom, alpha, num_sources):
    """Beamspace null spectrum built on ``W^H a(alpha)``."""
    D = null_spectrum(eig, W.H @ steering_matrix(geom, alpha), num_sources)
    return D[0] if np.ndim(alpha) == 0 else D


def angle_grid(center_deg, half_span_deg, step_deg):
    """Ascending grid of angles (deg) covering ``center +/- half_span``."""
    if not (half_span_deg > 0 and step_deg > 0):
        raise ValueError("grid span and step must be positive")
    count = int(np.floor(2 * half_span_deg / step_deg + 1e-9))
    if count < 1:
        raise ValueError("empty grid")
    offsets = (np.arange(count + 1) - count / 2.0) * step_deg
    angles = center_deg + offsets
    return angles[np.abs(angles) < 90.0]


def default_step_deg(geom, bw_constant=BEAMWIDTH_CONSTANT):
    return beamwidth_deg(geom, bw_constant) / 200.0


def grid_manifold(geom, angles_deg, W=None):
    """Unit-norm manifold columns for a grid, element space if ``W`` is None."""
    A = steering_matrix(geom, np.deg2rad(angles_deg))
    if W is not None:
        A = W.H @ A
    return normalize_columns(A)


def evaluate_grid(eig, geom, num_sources, angles_deg, W=None, manifold=None):
    """Sample D and P = 1/D on ``angles_deg``.

    Pass a precomputed ``manifold`` (from :func:`grid_manifold`) to skip the
    steering-vector evaluation when many covariances share one grid.
    """
    angles = np.asarray(angles_deg, dtype=float)
    if angles.size == 0:
        raise ValueError("empty grid")
    if manifold is None:
        manifold = grid_manifold(geom, angles, W)
    D = null_spectrum(eig, manifold, num_sources)
    P = 1.0 / np.maximum(D, SPECTRUM_FLOOR)
    space = "element" if W is None else "beamspace"
    return SpectrumGrid(angles, D, P, space)


def find_peaks(grid):
    """Strict interior local maxima of the spectrum, highest first.

    A flat run of equal samples counts as one peak, reported at its leftmost
    sample, when both neighbours of the run are lower.
    """
    P = grid.spectrum_values
    G = P.size
    peaks = []
    i = 1
    while i < G - 1:
        if P[i] > P[i - 1]:
            j = i
            while j + 1 < G and P[j + 1] == P[i]:
                j += 1
            if j + 1 < G and P[j + 1] < P[i]:
                peaks.append((float(grid.angles[i]), float(P[i])))
            i = j + 1
        else:
            i += 1
    peaks.sort(key=lambda p: -p[1])
    return peaks


def resolved(peaks, alpha1, alpha2, geom, bw_constant=BEAMWIDTH_CONSTANT):
    """True if at least two peaks fall in one beamwidth around the midpoint.

    ``alpha1``/``alpha2`` are in radians, peak angles in degrees. The window
    is closed: peaks exactly on its edge count.
    """
    mid = np.rad2deg(0.5 * (alpha1 + alpha2))
    # slack absorbs rounding in mid +/- half so on-edge grid points stay in
    half = 0.5 * beamwidth_deg(geom, bw_constant) + 1e-9
    inside = [a for a, _ in peaks if mid - half <= a <= mid + half]
    return len(inside) >= 2
