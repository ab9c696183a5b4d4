"""Traces of stabilizer projectors against a Pauli and a partial measurement.

Computes ``Tr[prod_i (I + g_i)/2 . q . (|y><y|_K (x) I)]`` for commuting
Hermitian Paulis ``g_i``.  Expanding the product gives a sum over subsets
``S`` of ``g_S q``; only subsets with ``g_S q`` diagonal and supported on
``K`` survive the trace.  Those subsets form an affine space over GF(2) and
the summand restricted to its linear part is a +-1 character, so the whole
sum collapses to one term times ``|kernel|`` or vanishes.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import ContractViolation, DimensionError, ValidationError
from .f2 import SpanReducer
from .pauli import SignedPauli, _popcount, bits_to_int, mul_raw

_UNITS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class ProjectorEvaluator:
    """Precomputed elimination for a fixed generator list and measured set.

    Parameters
    ----------
    gens : sequence of SignedPauli
        Hermitian, pairwise commuting.  Dependent generators are allowed; an
        inconsistent set (``-I`` in the generated group) yields zero for
        every query.
    measured : sequence of int
        Measured qubit indices ``K``; the bit vector ``y`` passed to
        :meth:`expectation` is ordered like ``sorted(measured)``.
    n_qubits : int
        Total qubit count ``N`` (needed when ``gens`` is empty).
    """

    def __init__(self, gens: Sequence[SignedPauli], measured: Sequence[int], n_qubits: int):
        self.n_qubits = n_qubits
        self.gens = tuple(gens)
        for g in self.gens:
            if g.n_qubits != n_qubits:
                raise DimensionError("generator acts on the wrong number of qubits")
            if not g.is_hermitian:
                raise ValidationError(f"generator {g} is not Hermitian")
        for i, g in enumerate(self.gens):
            for h in self.gens[i + 1 :]:
                if (_popcount(g.x_mask & h.z_mask) + _popcount(g.z_mask & h.x_mask)) & 1:
                    raise ContractViolation(f"generators {g} and {h} anticommute")
        self.measured = tuple(sorted(set(measured)))
        if len(self.measured) != len(tuple(measured)):
            raise ValidationError("measured qubits must be distinct")
        for q in self.measured:
            if not 0 <= q < n_qubits:
                raise ValidationError(f"measured qubit {q} out of range")
        self.k_mask = bits_to_int(1 if q in self.measured else 0 for q in range(n_qubits))
        self._free_mask = ((1 << n_qubits) - 1) & ~self.k_mask
        self._reducer = SpanReducer(self._constraint(g.x_mask, g.z_mask) for g in self.gens)
        # kernel elements are +-Z_T with T inside K; keep (sign bit, T)
        self._kernel = []
        for combo in self._reducer.kernel:
            x, z, ph = self._subset_product(combo)
            assert x == 0 and z & self._free_mask == 0 and ph % 2 == 0
            self._kernel.append((ph >> 1, z))
        self.log2_scale = (
            n_qubits - len(self.gens) - len(self.measured) + len(self._kernel)
        )

    def _constraint(self, x: int, z: int) -> int:
        return x | ((z & self._free_mask) << self.n_qubits)

    def _subset_product(self, combo: int):
        x = z = ph = 0
        i = 0
        while combo:
            if combo & 1:
                g = self.gens[i]
                x, z, ph = mul_raw(x, z, ph, g.x_mask, g.z_mask, g.phase)
            combo >>= 1
            i += 1
        return x, z, ph

    def y_mask(self, y: Sequence[int]) -> int:
        """Spread ``y`` (ordered like the measured set) onto qubit bits."""
        if len(y) != len(self.measured):
            raise DimensionError(f"y has length {len(y)}, expected {len(self.measured)}")
        out = 0
        for q, b in zip(self.measured, y):
            if int(b) & 1:
                out |= 1 << q
        return out

    def outcome_allowed(self, ymask: int) -> bool:
        """False when the kernel character is nontrivial for this outcome."""
        return all((sign + _popcount(ymask & t)) % 2 == 0 for sign, t in self._kernel)

    def resolve_raw(self, x: int, z: int, ph: int, check: bool = True):
        """Reduce ``q = i^ph X^x Z^z``.

        Returns ``None`` when no subset product matches ``q``; otherwise
        ``(unit_power, t_mask)`` with ``g_S0 q = i^unit_power Z^t_mask``.
        """
        if check:
            for g in self.gens:
                if (_popcount(g.x_mask & z) + _popcount(g.z_mask & x)) & 1:
                    raise ContractViolation(f"q does not commute with generator {g}")
        combo = self._reducer.reduce(self._constraint(x, z))
        if combo is None:
            return None
        gx, gz, gph = self._subset_product(combo)
        rx, rz, rph = mul_raw(gx, gz, gph, x, z, ph)
        if rx or rz & self._free_mask:
            raise AssertionError("span reduction produced a non-diagonal product")
        return rph, rz

    def expectation_raw(self, x: int, z: int, ph: int, ymask: int, check: bool = True) -> complex:
        if not self.outcome_allowed(ymask):
            return 0j
        hit = self.resolve_raw(x, z, ph, check)
        if hit is None:
            return 0j
        unit, t = hit
        unit = (unit + 2 * _popcount(ymask & t)) & 3
        return _UNITS[unit] * math.ldexp(1.0, self.log2_scale)

    def expectation(self, q: SignedPauli, y: Sequence[int]) -> complex:
        if q.n_qubits != self.n_qubits:
            raise DimensionError("q acts on the wrong number of qubits")
        return self.expectation_raw(q.x_mask, q.z_mask, q.phase, self.y_mask(y))


def projector_expectation(
    gens: Sequence[SignedPauli],
    q: SignedPauli,
    measured: Sequence[int],
    y: Sequence[int],
) -> complex:
    """``Tr[prod_i (I+g_i)/2 . q . (|y><y|_K (x) I)]`` exactly.

    >>> z0 = SignedPauli.from_label("Z")
    >>> projector_expectation([z0], SignedPauli.identity(1), [0], [0])
    (1+0j)
    """
    return ProjectorEvaluator(gens, measured, q.n_qubits).expectation(q, y)
