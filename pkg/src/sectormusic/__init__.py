"""Element-space and DPSS-beamspace MUSIC for uniform linear arrays.

Includes the closed-form two-source resolution threshold and a Monte Carlo
harness that measures it empirically.
"""
__version__ = "0.1.0"

from .array_model import (
    ArrayGeometry,
    beamwidth_deg,
    delta_separation,
    direction_matrix,
    electrical_angle,
    steering_matrix,
    steering_vector,
)
from .beamspace import (
    WeightingMatrix,
    array_gain,
    beamspace_steering,
    build_weighting,
    prefilter,
)
from .dpss import DpssBank, compute_bank, fractional_energy, sinc_kernel
from .errors import DegenerateSpectrumError, NumericalError
from .harness import (
    McConfig,
    McResult,
    build_figure_sweep,
    build_table,
    find_empirical_threshold,
    resolution_probability,
    theoretical_threshold,
)
from .music import (
    EigenDecomposition,
    SpectrumGrid,
    eig_hermitian,
    evaluate_grid,
    find_peaks,
    null_spectrum_beamspace,
    null_spectrum_element,
    resolved,
)
from .signal_sim import (
    CovarianceEstimate,
    Scenario,
    beamspace_covariance,
    generate_snapshots,
    sample_covariance,
    true_covariance,
)
from .theory import (
    TwoSourceModel,
    expected_null_at_midpoint,
    expected_null_at_sources,
    manifold_cosine,
    manifold_cosine_expansion,
    projection_approximations,
    theoretical_eigenvalues,
    threshold_beamspace,
    threshold_element,
    variance_null,
)
