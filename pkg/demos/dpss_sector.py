"""
Prolate sequences and the sector they carve out
===============================================

A bank of n discrete prolate spheroidal sequences concentrates as much energy
as possible inside a band of half-width B. Steered to a sector center and used
as the columns of a weighting matrix, they turn an N-element array into an
n-channel sector beamformer.
"""
import numpy as np

from sectormusic import ArrayGeometry, array_gain, build_weighting, compute_bank

# the setting used throughout: B = 0.0781, three sequences
B, n = 0.0781, 3
for N in (8, 16):
    bank = compute_bank(N, B, n)
    print(f"N={N:2d}  2BN={2 * B * N:.3f}  concentrations", np.round(bank.concentrations, 6))

# with 2BN around 1.25, only the first sequence of the 8-element bank is well
# concentrated; at N=16 all three are.
bank = compute_bank(8, B, n)
print("\nN=8 sequences (columns):")
print(np.round(bank.sequences, 4))

# the sector: fraction of a plane wave's energy that survives the prefilter
geom = ArrayGeometry(8)
W = build_weighting(geom, bank, theta0=0.0)
print("\n angle   gain (dB)")
for deg in (0, 5, 10, 15, 20, 30, 45, 60, 80):
    lin, db = array_gain(W, geom, np.radians(deg))
    print(f"{deg:6d}  {db:9.2f}")
