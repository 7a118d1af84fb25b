"""
Probability of resolution versus array SNR
==========================================

For one reference setting (N=8, n=3, sources 2 degrees apart, K=1000) we run
the Monte Carlo protocol: 30 trials per 1 dB step, a trial counts as resolved
when two spectral peaks fall within one beamwidth of the midpoint. The
empirical threshold is the first SNR with probability one.
"""
import numpy as np

from sectormusic.harness import find_empirical_threshold, row_config

cfg = row_config(8, 3, 0.0781, 2.0, 1000)
res = find_empirical_threshold(cfg, workers=4, keep_log=False)

print(f"theoretical threshold  {res.theoretical_threshold_db:6.2f} dB")
print(f"empirical threshold    {res.empirical_threshold_db} dB ({res.status})")
print(f"50% crossing (logistic fit, supplementary) {res.crossing50_db:.2f} dB\n")
for snr, p in zip(res.snr_grid_db, res.probabilities):
    print(f"{snr:6.1f} dB  {p:4.2f}  " + "#" * int(round(p * 30)))

# the transition is broad: about half the trials resolve at the theoretical
# threshold, but unity arrives several dB later because the single noise
# eigenvector leaves a long tail of failures.
