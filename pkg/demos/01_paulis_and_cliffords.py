"""
Pauli operators and Clifford tableaus
=====================================

Paulis are stored as ``i^phase X^x Z^z`` with integer bitmasks. Cliffords
are tableaus of Pauli images, built from gates or sampled uniformly.
"""

import numpy as np

from pauli_fourier.clifford import conjugate, from_gates, gate, random_clifford, synthesize
from pauli_fourier.dense import circuit_unitary, pauli_matrix
from pauli_fourier.pauli import SignedPauli

# Y carries one factor of i relative to XZ
y = SignedPauli.from_label("Y")
print("Y:", y, "phase", y.phase, "x", y.x_mask, "z", y.z_mask)

# a Bell-pair circuit maps Z on the control to X on both qubits
bell = from_gates([gate("H", 0), gate("CNOT", 0, 1)], 2)
print("ZI ->", conjugate(bell, SignedPauli.from_label("ZI")))
print("IZ ->", conjugate(bell, SignedPauli.from_label("IZ")))

###############################################################################
# A uniformly random Clifford, resynthesized into gates and checked densely

rng = np.random.default_rng(1)
u = random_clifford(3, rng)
circ = synthesize(u)
print(len(circ), "gates after synthesis")
mat = circuit_unitary(circ, 3)
p = SignedPauli.from_label("XYZ")
err = np.abs(pauli_matrix(conjugate(u, p)) - mat @ pauli_matrix(p) @ mat.conj().T).max()
print("tableau vs dense conjugation, max deviation:", err)
