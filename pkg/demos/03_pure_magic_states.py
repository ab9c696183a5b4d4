"""
Pure magic inputs: fidelity, Pauli rank and the measured-qubit cap
==================================================================

For pure inputs the decay rate comes from the stabilizer fidelity, and the
guarantee covers only a limited number of measured qubits.
"""

import numpy as np

from pauli_fourier.fourier import measured_cap
from pauli_fourier.inputs import (
    magic_mu,
    parse_input,
    pauli_rank_n,
    pauli_rank_single,
    reference_operator,
    stabilizer_fidelity,
)

for name in ("zero", "plus", "T", "H"):
    q = parse_input(name)
    print(f"{name:5s} F={stabilizer_fidelity(q):.6f} mu={magic_mu(q):.6f} "
          f"rank={pauli_rank_single(q)}")

t = parse_input("T")
print("reference operator of T:\n", np.round(reference_operator(t).matrix(), 6))

# the Pauli rank is multiplicative over tensor products
tt = np.kron(t.state_vector(), t.state_vector())
print("rank of T (x) T:", pauli_rank_n(tt))

###############################################################################
# How many qubits may be measured with 100 T inputs and no stabilizer qubits

print("cap for 100 T inputs:", measured_cap([t] * 100, 0))
