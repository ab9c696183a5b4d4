"""
Truncated Fourier simulation with noisy magic inputs
====================================================

Depolarized T states feed a random Clifford circuit. Keeping Fourier terms
of weight at most ``l`` gives an estimate whose l1 error shrinks with ``l``
and vanishes at ``l = m``.
"""

import numpy as np

from pauli_fourier.dense import dense_distribution, l1_distance
from pauli_fourier.fourier import (
    CoefficientEvaluator,
    SimInstance,
    coefficient_budget,
    error_bound,
    truncation_level,
)
from pauli_fourier.clifford import random_clifford
from pauli_fourier.inputs import mixedness, parse_input

rng = np.random.default_rng(7)
n, m = 2, 4
inputs = [parse_input("magicT(0.3)")] * m
lam = mixedness(inputs[0])
print("mixedness of each input:", lam)

inst = SimInstance(n, inputs, random_clifford(n + m, rng), range(n + m))
exact = dense_distribution(inst)
ev = CoefficientEvaluator(inst)

###############################################################################
# Error against the dense oracle, one line per truncation level

print("level  terms  l1_error   bound(alpha=8)")
for level in range(m + 1):
    err = l1_distance(ev.distribution(level), exact)
    print(f"{level:5d} {coefficient_budget(m, level):6d}  {err:.3e}  {error_bound(8, lam, level):.3f}")

# the level needed for delta = 0.1 exceeds m here, so the run is exact
print("truncation level for delta=0.1:", truncation_level(0.1, 8, lam),
      "clamped:", truncation_level(0.1, 8, lam, m))
