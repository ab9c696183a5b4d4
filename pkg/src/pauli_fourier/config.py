"""Numerical tolerances and capacity limits, kept in one place."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # |psi_st| at or below this counts as zero when counting Pauli rank
    rank_zero: float = 1e-9
    # Tr(rho^2) >= 1 - purity_slack counts as a pure state
    purity_slack: float = 1e-12
    # negative radicands above -clamp are treated as 0 in the mixedness formula
    radicand_clamp: float = 1e-12
    # largest |imag| tolerated when a Fourier coefficient should be real
    imag_residual: float = 1e-10
    # dense states must have unit norm/trace within this
    dense_norm: float = 1e-12
    # slack used before ceil/floor of analytic level and cap formulas
    rounding_slack: float = 1e-9


@dataclass(frozen=True)
class Capacity:
    dense_pure_qubits: int = 12
    dense_mixed_qubits: int = 10
    # coefficient_budget refuses counts above this (signed 64-bit range)
    max_terms: int = 2**63 - 1
    gowers_max_qubits: int = 10
    pauli_rank_max_qubits: int = 12


TOL = Tolerances()
CAPACITY = Capacity()
