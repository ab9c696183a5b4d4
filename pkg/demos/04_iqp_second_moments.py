"""
IQP circuits and the output second moment
=========================================

The sum of squared output probabilities measures anticoncentration. Without
T gates it equals ``2^{-rank A}``; T gates only shrink a simple upper bound.
"""

import numpy as np

from pauli_fourier.iqp import (
    average_second_moment_mc,
    exhaustive_average_second_moment,
    format_iqp,
    ensemble_moment_target,
    random_iqp,
    second_moment_bound,
    second_moment_bruteforce,
    second_moment_exact_no_T,
)

rng = np.random.default_rng(3)
c = random_iqp(4, rng, with_t=False)
print(format_iqp(c))
print("exact:", second_moment_exact_no_T(c), "brute force:", second_moment_bruteforce(c))

c = random_iqp(6, rng)
print("with T gates, brute force", second_moment_bruteforce(c), "<= bound", second_moment_bound(c))

###############################################################################
# Averages over the random ensemble

print("n=1 exhaustive average:", exhaustive_average_second_moment(1))
for n in (2, 4, 6):
    mean, se = average_second_moment_mc(n, 1000, 11)
    print(f"n={n} mean={mean:.5f} +- {se:.5f}  target={ensemble_moment_target(n):.5f}")
