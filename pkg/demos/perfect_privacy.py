"""
Building a perfectly private all-pass filter
============================================

Start from a known spectrum, map its CDF through a random R function and
check that the resulting phase decorrelates the filtered series from the
original while leaving the spectrum alone.
"""

import numpy as np

from tsflip import FrequencyGrid, SpectralDensity, design_filter, draw_r, lip_allpass, lip_general, phase_function, spectral_cdf

rng = np.random.default_rng(1)
grid = FrequencyGrid(2048)
lam = grid.points

# an AR(1) spectrum with coefficient 0.6, in the (2 pi)^-1 convention
f = SpectralDensity(grid, 1 / (2 * np.pi * np.abs(1 - 0.6 * np.exp(-1j * lam)) ** 2))

# a two-component symmetric Beta mixture; the shapes are random
R = draw_r(rng)
print("R components:", [(round(w, 3), round(a, 3), round(b, 3)) for w, a, b in R.components])
print("Lipschitz constant:", round(R.lipschitz, 4))

# the phase pi * R(F(lam)) runs from 0 to pi
g = phase_function(R, spectral_cdf(f))
print("LIP of the exact phase:", lip_allpass(g, f))

# realize it with K = 25 cepstral terms and 2 * 45 + 1 taps
filt = design_filter(g, K=25, M=45)
print("winding removed before factorization:", filt.shift)
print("unitarity defect:", filt.unitarity_defect)
print("LIP of the finite filter:", lip_general(filt.response(lam), f))

# the same phase factorized without removing the winding is far from all-pass
literal = design_filter(g, K=25, M=45, unwrap=False)
print("unitarity defect without unwrapping:", literal.unitarity_defect)
