"""Discrete prolate spheroidal sequences from the sinc concentration kernel."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError


@dataclass(frozen=True)
class DpssBank:
    """The ``n`` most band-concentrated sequences of length ``order``.

    Attributes
    ----------
    order : int
        Sequence length N.
    half_bandwidth : float
        B in cycles per sample.
    sequences : ndarray, shape (N, n)
        Column k is the k-th sequence, unit norm, sign fixed so that its first
        nonzero sample is positive.
    concentrations : ndarray, shape (n,)
        In-band energy fractions, descending.
    """

    order: int
    half_bandwidth: float
    sequences: np.ndarray
    concentrations: np.ndarray

    @property
    def count(self):
        return self.sequences.shape[1]


def _check_bandwidth(B):
    if not 0.0 < B < 0.5:
        raise ValueError(f"half-bandwidth B={B} must lie in (0, 0.5)")


def sinc_kernel(N, B):
    """Concentration matrix ``C[m, n] = sin(2 pi B (m - n)) / (pi (m - n))``.

    The diagonal takes its limiting value ``2B``.
    """
    _check_bandwidth(B)
    if N < 1:
        raise ValueError("order N must be >= 1")
    lag = np.subtract.outer(np.arange(N), np.arange(N)).astype(float)
    # np.sinc(x) = sin(pi x) / (pi x), so 2B sinc(2B lag) is the kernel with
    # the correct diagonal limit built in.
    return 2.0 * B * np.sinc(2.0 * B * lag)


def _fix_signs(vectors):
    out = vectors.copy()
    tol = 1e-12 * np.max(np.abs(out), axis=0)
    for k in range(out.shape[1]):
        nz = np.flatnonzero(np.abs(out[:, k]) > tol[k])
        if nz.size and out[nz[0], k] < 0:
            out[:, k] = -out[:, k]
    return out


def compute_bank(N, B, n):
    """Top-``n`` eigenvectors of the sinc kernel, in decreasing eigenvalue order."""
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    C = sinc_kernel(N, B)
    try:
        w, v = scipy.linalg.eigh(C, subset_by_index=[N - n, N - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(
            f"eigendecomposition of {N}x{N} sinc kernel (B={B}) failed: {exc}"
        ) from exc
    v = _fix_signs(v)
    # eigh returns ascending eigenvalues; break exact ties by the sign-fixed
    # vectors so the order is deterministic.
    keys = [(-w[k], tuple(np.round(v[:, k], 12))) for k in range(n)]
    order = sorted(range(n), key=lambda k: keys[k])
    return DpssBank(
        order=N,
        half_bandwidth=B,
        sequences=v[:, order],
        concentrations=w[order],
    )


def fractional_energy(y, B):
    """Fraction of the energy of the index-limited sequence ``y`` in ``(-B, B)``."""
    y = np.asarray(y)
    energy = np.vdot(y, y).real
    if energy == 0.0:
        raise ValueError("zero vector has no fractional energy")
    C = sinc_kernel(y.shape[0], B)
    return np.vdot(y, C @ y).real / energy
