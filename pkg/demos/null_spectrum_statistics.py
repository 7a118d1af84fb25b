"""
Bias and spread of the estimated null spectrum
==============================================

With K snapshots the estimated null spectrum fluctuates around its true
value. First-order perturbation of the eigenvectors predicts its mean and
variance; here both are compared with 2000 simulated covariance estimates.
"""
import numpy as np

from sectormusic import (
    ArrayGeometry, Scenario, beamspace_covariance, build_weighting, compute_bank,
    eig_hermitian, generate_snapshots, sample_covariance, steering_matrix, true_covariance,
)
from sectormusic.music import null_spectrum
from sectormusic.signal_sim import trial_rng
from sectormusic.theory import expected_null_general, variance_null

geom = ArrayGeometry(8)
alphas = np.radians([-1.0, 1.0])
K = 1000
scenario = Scenario.from_asnr(geom, alphas, 30.0, num_snapshots=K)
W = build_weighting(geom, compute_bank(8, 0.0781, 3))

true_eig = eig_hermitian(beamspace_covariance(true_covariance(scenario), W))
angles = np.array([-1.0, 0.0, 3.0])
manifold = W.H @ steering_matrix(geom, np.radians(angles))

draws = np.array([
    null_spectrum(eig_hermitian(beamspace_covariance(
        sample_covariance(generate_snapshots(scenario, trial_rng(0, t))), W)), manifold, 2)
    for t in range(2000)
])

print(" angle    mean (MC)   mean (theory)   var (MC)    var (theory)")
for j, a in enumerate(angles):
    b = manifold[:, j]
    print(f"{a:6.1f}  {draws[:, j].mean():10.3e}  {expected_null_general(true_eig, b, 2, K):13.3e}"
          f"  {draws[:, j].var():10.3e}  {variance_null(true_eig, b, 2, K):12.3e}")
