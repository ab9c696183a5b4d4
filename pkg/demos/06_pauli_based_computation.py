"""
Pauli-based computation on T states
===================================

Measuring commuting Paulis on ``|T>^n`` gives outcome probabilities that are
projector expectations. The Fourier expansion over the input states yields
them exactly at full level and approximately below it.
"""

import numpy as np

from pauli_fourier.experiments import dense_pbc_probability, random_commuting_paulis
from pauli_fourier.fourier import pbc_probability
from pauli_fourier.inputs import parse_input

rng = np.random.default_rng(9)
t = parse_input("T")
n, k = 5, 3
gens = random_commuting_paulis(n, k, rng)
signs = [0, 1, 0]
print("measured Paulis:", [str(g) for g in gens])
print("dense probability:", dense_pbc_probability(gens, signs, t, n))
for level in range(n + 1):
    print(f"level {level}: {pbc_probability(gens, signs, t, level, n):.12f}")
