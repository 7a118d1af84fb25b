"""Synthetic narrowband snapshots and covariance matrices.

Sources are uncorrelated, equal-power, circular complex Gaussian; noise is
spatially white. Per-trial generators are derived from ``(seed, trial)`` with
:class:`numpy.random.SeedSequence`, so Monte Carlo trials can run in any order
and still produce identical data.
"""
from dataclasses import dataclass

import numpy as np

from .array_model import ArrayGeometry, direction_matrix

SPACES = ("element", "beamspace")


@dataclass(frozen=True)
class Scenario:
    """Sources, noise level and sample support for one experiment.

    Attributes
    ----------
    geom : ArrayGeometry
    alphas : tuple of float
        Source directions in radians.
    power_db : float
        Per-source power P in dB relative to unit noise power; ``-inf``
        switches the sources off.
    noise_power : float
        White-noise variance per sensor.
    num_snapshots : int
    seed : int
    """

    geom: ArrayGeometry
    alphas: tuple
    power_db: float
    noise_power: float = 1.0
    num_snapshots: int = 100
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if len(self.alphas) < 1:
            raise ValueError("no sources")
        if self.num_snapshots < 1:
            raise ValueError("K >= 1 required")
        if not self.noise_power > 0:
            raise ValueError("noise_power must be positive")

    @classmethod
    def from_asnr(cls, geom, alphas, asnr_db, noise_power=1.0, **kwargs):
        """Build a scenario from the array SNR ``N P / sigma^2`` in dB."""
        power_db = asnr_db - 10.0 * np.log10(geom.num_sensors) + 10.0 * np.log10(noise_power)
        return cls(geom, alphas, power_db, noise_power=noise_power, **kwargs)

    @property
    def power(self):
        return 10.0 ** (self.power_db / 10.0)

    @property
    def snr_db(self):
        """Per-element SNR ``P / sigma^2`` in dB."""
        return self.power_db - 10.0 * np.log10(self.noise_power)

    @property
    def asnr_db(self):
        """Array SNR ``N P / sigma^2`` in dB."""
        return self.snr_db + 10.0 * np.log10(self.geom.num_sensors)

    def with_asnr(self, asnr_db):
        return Scenario.from_asnr(
            self.geom, self.alphas, asnr_db, noise_power=self.noise_power,
            num_snapshots=self.num_snapshots, seed=self.seed,
        )


@dataclass(frozen=True)
class CovarianceEstimate:
    """Hermitian covariance, exact (``num_snapshots is None``) or sampled."""

    matrix: np.ndarray
    num_snapshots: object = None
    space: str = "element"

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"space must be one of {SPACES}")

    @property
    def dim(self):
        return self.matrix.shape[0]


def trial_rng(seed, trial=None):
    """Generator for ``(seed, trial)``; ``trial=None`` gives the base stream.

    ``seed`` may itself be a sequence of non-negative integers.
    """
    entropy = [int(x) for x in np.atleast_1d(seed)]
    if trial is not None:
        entropy.append(int(trial))
    return np.random.default_rng(np.random.SeedSequence(entropy))


def complex_normal(rng, shape, variance=1.0):
    """Circular complex Gaussian samples, real and imaginary parts var/2 each."""
    scale = np.sqrt(variance / 2.0)
    z = rng.standard_normal(shape + (2,))
    return scale * (z[..., 0] + 1j * z[..., 1])


def generate_snapshots(scenario, rng=None):
    """Array outputs ``X = A s + n`` with shape (N, K)."""
    if rng is None:
        rng = trial_rng(scenario.seed)
    A = direction_matrix(scenario.geom, scenario.alphas)
    N, M = A.shape
    K = scenario.num_snapshots
    S = complex_normal(rng, (M, K), scenario.power)
    noise = complex_normal(rng, (N, K), scenario.noise_power)
    return A @ S + noise


def true_covariance(scenario):
    """Exact covariance ``P A A^H + sigma^2 I``."""
    A = direction_matrix(scenario.geom, scenario.alphas)
    R = scenario.power * (A @ A.conj().T)
    R = R + scenario.noise_power * np.eye(A.shape[0])
    return CovarianceEstimate(0.5 * (R + R.conj().T), None, "element")


def sample_covariance(snapshots, space="element"):
    """``(1/K) sum_k x_k x_k^H`` for the columns of ``snapshots``."""
    X = np.asarray(snapshots)
    if X.ndim == 1:
        X = X[:, None]
    K = X.shape[1]
    if K == 0:
        raise ValueError("empty snapshot set")
    R = (X @ X.conj().T) / K
    return CovarianceEstimate(0.5 * (R + R.conj().T), K, space)


def beamspace_covariance(cov, W):
    """``W^H R W`` for an element-space covariance."""
    if cov.space != "element":
        raise ValueError("expected an element-space covariance")
    R = W.H @ cov.matrix @ W.matrix
    return CovarianceEstimate(0.5 * (R + R.conj().T), cov.num_snapshots, "beamspace")


def save_snapshots_csv(path, snapshots):
    """Write an N x K complex matrix as N rows of interleaved re/im columns."""
    X = np.asarray(snapshots, dtype=complex)
    out = np.empty((X.shape[0], 2 * X.shape[1]))
    out[:, 0::2] = X.real
    out[:, 1::2] = X.imag
    header = ",".join(f"re{k},im{k}" for k in range(X.shape[1]))
    np.savetxt(path, out, delimiter=",", header=header, comments="", fmt="%.17g")


def load_snapshots_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0::2] + 1j * data[:, 1::2]
