"""
Noisy IQP sampling probabilities from low-weight Fourier terms
==============================================================

Depolarizing noise of strength eps before measurement damps each Fourier
coefficient by ``(1 - eps)`` per flipped qubit, so a few low-weight terms
already reproduce the noisy distribution closely.
"""

import numpy as np

from pauli_fourier.iqp import iqp_approx_distribution, iqp_dense_distribution, random_iqp

rng = np.random.default_rng(5)
n, eps = 8, 0.25
c = random_iqp(n, rng)
exact = iqp_dense_distribution(c, eps)

for level in range(n + 1):
    approx = iqp_approx_distribution(c, eps, level)
    print(f"level {level}: l1 error {np.abs(approx - exact).sum():.3e}")
