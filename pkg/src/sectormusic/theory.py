"""Closed-form performance of MUSIC for two equal-power uncorrelated sources.

Covers the manifold cosine and its small-separation expansion, the two signal
eigenvalues, the projection approximations at the sources and midpoint, the
first-order bias and variance of the estimated null spectrum, and the
resolution thresholds in element space and after DPSS prefiltering.

Notation: ``delta`` is the normalised separation ``N |w1 - w2| / (2 sqrt 3)``,
``zeta`` the array SNR seen after prefiltering, ``A_g * N P / sigma^2``.
"""
from dataclasses import dataclass

import numpy as np

from .array_model import electrical_angle
from .errors import DegenerateSpectrumError
from .music import normalize_columns

#: Separations beyond this are outside the range where the series used by
#: the threshold formulas are trustworthy.
EXPANSION_VALIDITY_DELTA = 1.0

#: Probability of resolution expected at the threshold SNR, from fully
#: independent to fully correlated fluctuations at the two sources.
THRESHOLD_RESOLUTION_PROBABILITY = (0.33, 0.5)


@dataclass(frozen=True)
class TwoSourceModel:
    """Operating point for the equal-power two-source formulas.

    Attributes
    ----------
    dim : int
        Dimension of the processed data, n for beamspace or N for element space.
    num_snapshots : int
    delta : float
    array_gain : float
        Linear prefilter gain A_g in (0, 1]; 1 for element space.
    asnr : float
        Array SNR ``N P / sigma^2``, linear.
    """

    dim: int
    num_snapshots: int
    delta: float
    array_gain: float = 1.0
    asnr: float = 1.0

    def __post_init__(self):
        if self.dim < 3:
            raise ValueError("formula undefined for dimension < 3")
        if self.num_snapshots < 1:
            raise ValueError("K >= 1 required")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not 0 < self.array_gain <= 1 + 1e-12:
            raise ValueError("array gain must lie in (0, 1]")

    @property
    def zeta(self):
        return self.array_gain * self.asnr

    @property
    def within_validity(self):
        return self.delta <= EXPANSION_VALIDITY_DELTA


def manifold_cosine(geom, alpha1, alpha2):
    """``a(alpha1)^H a(alpha2) / N`` in closed form.

    With ``w_d = (w1 - w2) / 2`` this is
    ``exp(-j (N-1) w_d) sin(N w_d) / (N sin w_d)``, equal to 1 at ``w_d = 0``.
    """
    N = geom.num_sensors
    wd = 0.5 * (electrical_angle(geom, alpha1) - electrical_angle(geom, alpha2))
    if np.isclose(np.sin(wd), 0.0, atol=1e-15):
        ratio = np.cos(N * wd) / np.cos(wd)
    else:
        ratio = np.sin(N * wd) / (N * np.sin(wd))
    return np.exp(-1j * (N - 1) * wd) * ratio


def beamspace_manifold_cosine(W, geom, alpha1, alpha2):
    """Cosine of the angle between ``W^H a(alpha1)`` and ``W^H a(alpha2)``."""
    from .beamspace import beamspace_steering

    b1 = beamspace_steering(W, geom, alpha1)
    b2 = beamspace_steering(W, geom, alpha2)
    return np.vdot(b1, b2) / (np.linalg.norm(b1) * np.linalg.norm(b2))


def manifold_cosine_expansion(delta):
    """``|Phi| ~ 1 - delta^2/2 + 9 delta^4 / 120``."""
    d2 = np.asarray(delta, dtype=float) ** 2
    return 1.0 - d2 / 2.0 + 9.0 * d2 ** 2 / 120.0


def theoretical_eigenvalues(num_sensors, P1, P2, phi_mag, array_gain=1.0, noise_power=1.0):
    """The two signal eigenvalues of ``sum_i P~_i b_i b_i^H + sigma^2 I``.

    ``P~_i = A_g P_i``; ``phi_mag`` is the modulus of the manifold cosine.
    Returns ``(lambda1, lambda2)`` with ``lambda1 >= lambda2 >= sigma^2``.
    """
    if P1 < 0 or P2 < 0:
        raise ValueError("powers must be non-negative")
    if phi_mag > 1 + 1e-12:
        raise ValueError("|Phi| must be <= 1")
    p1, p2 = array_gain * P1, array_gain * P2
    total = p1 + p2
    if total == 0:
        return noise_power, noise_power
    disc = 1.0 - 4.0 * p1 * p2 * (1.0 - min(phi_mag, 1.0) ** 2) / total ** 2
    root = np.sqrt(max(disc, 0.0))
    half = 0.5 * total * num_sensors
    return half * (1.0 + root) + noise_power, half * (1.0 - root) + noise_power


def projection_approximations(delta):
    """Squared projections of the unit manifold onto the signal eigenvectors.

    Returns ``(source_e1, source_e2, midpoint_e1, midpoint_e2)``: the values at
    either source direction and at the midpoint, for the larger and smaller
    signal eigenvector. Meaningful for small ``delta`` (roughly below 0.5).
    """
    d2 = float(delta) ** 2
    vals = (
        1.0 - d2 / 4.0 + 3.0 * d2 ** 2 / 80.0,
        d2 / 4.0 - 3.0 * d2 ** 2 / 80.0,
        1.0 - d2 ** 2 / 80.0,
        0.0,
    )
    return tuple(min(max(v, 0.0), 1.0) for v in vals)


def _pair_weights(eigenvalues, M, K, tol):
    lam = np.asarray(eigenvalues, dtype=float)
    sig = lam[:M, None]
    noi = lam[None, M:]
    gap = sig - noi
    if np.any(np.abs(gap) <= tol * np.max(np.abs(lam))):
        raise DegenerateSpectrumError("degenerate spectrum: signal and noise eigenvalues coincide")
    return sig * noi / (K * gap ** 2)


def _projections(eig, manifold, M):
    b = normalize_columns(manifold)[:, 0]
    proj = np.abs(eig.eigenvectors.conj().T @ b) ** 2
    return proj[:M], proj[M:]


def expected_null_general(eig, manifold, M, K, tol=1e-12):
    """Mean of the estimated null spectrum to first order in 1/K.

    ``eig`` holds the true eigenpairs, ``manifold`` the (unnormalised)
    manifold vector at the angle of interest. Uses the large-K eigenvector
    perturbation ``E[e^_i e^_i^H] = e_i e_i^H + sum_j w_ij (e_j e_j^H - e_i e_i^H)``
    with ``w_ij = l_i l_j / (K (l_i - l_j)^2)``; pairs inside the signal
    subspace cancel, so only signal/noise pairs contribute.
    """
    if np.isinf(K):
        p_sig, p_noi = _projections(eig, manifold, M)
        return max(float(np.sum(p_noi)), 0.0)
    w = _pair_weights(eig.eigenvalues, M, K, tol)
    p_sig, p_noi = _projections(eig, manifold, M)
    D = float(np.sum(p_noi))
    return D + float(np.sum(w * (p_sig[:, None] - p_noi[None, :])))


def expected_null_two_source(eig, manifold, K):
    """Two-source form with ``(dim - 2)`` equal noise eigenvalues.

    ``(dim-2)/K * sum_i l_i s2 / (l_i - s2)^2 |b^H e_i|^2`` where ``s2`` is the
    mean noise eigenvalue. Matches :func:`expected_null_general` at the true
    source directions.
    """
    lam = eig.eigenvalues
    sigma2 = float(np.mean(lam[2:]))
    p_sig, _ = _projections(eig, manifold, 2)
    c = lam[:2] * sigma2 / (lam[:2] - sigma2) ** 2
    return (eig.dim - 2) / K * float(np.sum(c * p_sig))


def variance_null(eig, manifold, M, K, tol=1e-12):
    """Variance of the estimated null spectrum.

    Sum of the first-order term ``(2/K) sum_ij w'_ij p_i q_j`` (with
    ``w'_ij = l_i l_j / (l_i - l_j)^2``, ``p``/``q`` the signal/noise
    projections), which dominates away from the sources, and the second-order
    term ``sum_j (sum_i w_ij p_i)^2``, which is all that is left at a source
    where the noise projections vanish.
    """
    w = _pair_weights(eig.eigenvalues, M, K, tol)
    p_sig, p_noi = _projections(eig, manifold, M)
    first = 2.0 * float(np.sum(w * p_sig[:, None] * p_noi[None, :]))
    second = float(np.sum((p_sig @ w) ** 2))
    return first + second


def variance_null_two_source(lam1, lam2, noise_power, p1, p2, dim, K):
    """:func:`variance_null` for two sources and ``dim - 2`` equal noise eigenvalues.

    ``p1``/``p2`` are the squared projections on the signal eigenvectors; the
    noise projections sum to ``1 - p1 - p2``.
    """
    s2 = noise_power
    c = np.array([lam1 * s2 / (lam1 - s2) ** 2, lam2 * s2 / (lam2 - s2) ** 2]) / K
    p = np.array([p1, p2])
    D = max(1.0 - p1 - p2, 0.0)
    mean_term = float(c @ p)
    return 2.0 * mean_term * D + (dim - 2) * mean_term ** 2


def expected_null_at_sources(model):
    """``(dim-2)/K [1/zeta + 1/(zeta^2 delta^2)]``."""
    z, d2 = model.zeta, model.delta ** 2
    return (model.dim - 2) / model.num_snapshots * (1.0 / z + 1.0 / (z ** 2 * d2))


def expected_null_at_midpoint(model):
    """``delta^4/80 + (dim-2)/K [(4+delta^2)/(8 zeta) + (2 delta^2 + delta^4)/(8 zeta^2 delta^2)]``."""
    z, d2 = model.zeta, model.delta ** 2
    m = (model.dim - 2) / model.num_snapshots
    return d2 ** 2 / 80.0 + m * ((4.0 + d2) / (8.0 * z) + (2.0 * d2 + d2 ** 2) / (8.0 * z ** 2 * d2))


def threshold_gap(model):
    """Leading-order ``E[D(source)] - E[D(midpoint)]``.

    ``(dim-2)/K [1/(2 zeta) + 1/(zeta^2 delta^2)] - delta^4/80``; it is the
    function whose positive root in ``zeta`` gives the threshold formulas.
    """
    z, d2 = model.zeta, model.delta ** 2
    m = (model.dim - 2) / model.num_snapshots
    return m * (0.5 / z + 1.0 / (z ** 2 * d2)) - d2 ** 2 / 80.0


def _threshold(dim, K, delta):
    if dim < 3:
        raise ValueError("formula undefined for dimension < 3")
    if K < 1:
        raise ValueError("K >= 1 required")
    if not delta > 0:
        raise ValueError("delta must be positive")
    m = (dim - 2) / K
    return 20.0 * m / delta ** 4 * (1.0 + np.sqrt(1.0 + delta ** 2 / (5.0 * m)))


def threshold_element(N, K, delta):
    """Element-space resolution threshold (linear array SNR)."""
    return _threshold(N, K, delta)


def threshold_beamspace(n, K, delta, array_gain):
    """Threshold after prefiltering to ``n`` dimensions with linear gain A_g."""
    if not 0 < array_gain <= 1 + 1e-12:
        raise ValueError("array gain must lie in (0, 1]")
    return _threshold(n, K, delta) / array_gain


def to_db(x):
    return 10.0 * np.log10(x)


def from_db(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)
