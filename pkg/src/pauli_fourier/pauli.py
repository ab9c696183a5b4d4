"""Phase-tracked Pauli operators on bit-packed X/Z masks.

A :class:`SignedPauli` stands for ``i**phase * X^x Z^z`` where ``X^x Z^z`` is the
tensor product over qubits of ``X^{x_q} Z^{z_q}`` (X written before Z on every
qubit).  Bit ``q`` of a mask refers to qubit ``q``; in textual literals qubit 0
is the leftmost letter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DimensionError, ValidationError

_LITERAL = re.compile(r"^([+-]?)(i?)([IXYZ]+)$")
_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


def _popcount(v: int) -> int:
    return bin(v).count("1")


def bits_to_int(bits: Iterable[int]) -> int:
    """Pack a 0/1 sequence into an int, element ``j`` going to bit ``j``."""
    out = 0
    for j, b in enumerate(bits):
        if b & 1:
            out |= 1 << j
    return out


def int_to_bits(v: int, length: int) -> list[int]:
    return [(v >> j) & 1 for j in range(length)]


@dataclass(frozen=True, slots=True)
class SignedPauli:
    """``i**phase * X^x_mask Z^z_mask`` on ``n_qubits`` qubits."""

    n_qubits: int
    x_mask: int
    z_mask: int
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValidationError(f"masks do not fit in {self.n_qubits} qubits")
        if not 0 <= self.phase <= 3:
            object.__setattr__(self, "phase", self.phase % 4)

    # -- constructors ----------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> SignedPauli:
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> SignedPauli:
        """Hermitian single-qubit Pauli ``letter`` acting on ``qubit``."""
        if not 0 <= qubit < n_qubits:
            raise ValidationError(f"qubit {qubit} out of range")
        bit = 1 << qubit
        if letter == "I":
            return cls(n_qubits, 0, 0, 0)
        if letter == "X":
            return cls(n_qubits, bit, 0, 0)
        if letter == "Z":
            return cls(n_qubits, 0, bit, 0)
        if letter == "Y":
            return cls(n_qubits, bit, bit, 1)
        raise ValidationError(f"unknown Pauli letter {letter!r}")

    @classmethod
    def from_bits(
        cls, x: Sequence[int], z: Sequence[int], phase: int = 0
    ) -> SignedPauli:
        if len(x) != len(z):
            raise DimensionError("x and z bit vectors differ in length")
        return cls(len(x), bits_to_int(x), bits_to_int(z), phase)

    @classmethod
    def from_label(cls, label: str) -> SignedPauli:
        """Parse literals such as ``"+XIZ"``, ``"-iYY"`` or ``"ZZ"``."""
        m = _LITERAL.match(label.strip())
        if m is None:
            raise ValidationError(f"bad Pauli literal {label!r}")
        sign, imag, letters = m.groups()
        phase = (2 if sign == "-" else 0) + (1 if imag else 0)
        x = z = 0
        for q, ch in enumerate(letters):
            if ch in "XY":
                x |= 1 << q
            if ch in "ZY":
                z |= 1 << q
            if ch == "Y":
                # Y = i X Z
                phase += 1
        return cls(len(letters), x, z, phase % 4)

    # -- views -----------------------------------------------------------

    @property
    def x_bits(self) -> list[int]:
        return int_to_bits(self.x_mask, self.n_qubits)

    @property
    def z_bits(self) -> list[int]:
        return int_to_bits(self.z_mask, self.n_qubits)

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    @property
    def is_hermitian(self) -> bool:
        return (self.phase - _popcount(self.x_mask & self.z_mask)) % 2 == 0

    @property
    def is_identity_up_to_phase(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def letters(self) -> str:
        out = []
        for q in range(self.n_qubits):
            xb = (self.x_mask >> q) & 1
            zb = (self.z_mask >> q) & 1
            out.append("IZXY"[2 * xb + zb])
        return "".join(out)

    def label(self) -> str:
        n_y = _popcount(self.x_mask & self.z_mask)
        return _PREFIX[(self.phase - n_y) % 4] + self.letters()

    def __str__(self) -> str:
        return self.label()

    def __repr__(self) -> str:
        return f"SignedPauli({self.label()!r})"

    def __mul__(self, other: SignedPauli) -> SignedPauli:
        return pauli_mul(self, other)

    def with_phase(self, phase: int) -> SignedPauli:
        return SignedPauli(self.n_qubits, self.x_mask, self.z_mask, phase % 4)

    def adjoint(self) -> SignedPauli:
        # (X^x Z^z)^dagger = Z^z X^x = (-1)^{|x&z|} X^x Z^z
        extra = 2 * _popcount(self.x_mask & self.z_mask)
        return self.with_phase(-self.phase + extra)

    def commutes_with(self, other: SignedPauli) -> bool:
        return commutes(self, other)


def _check_sizes(p: SignedPauli, q: SignedPauli) -> None:
    if p.n_qubits != q.n_qubits:
        raise DimensionError(
            f"qubit count mismatch: {p.n_qubits} vs {q.n_qubits}"
        )


def mul_raw(x1: int, z1: int, p1: int, x2: int, z2: int, p2: int):
    """Product of ``(x1, z1, p1)`` and ``(x2, z2, p2)`` in raw form."""
    # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
    return x1 ^ x2, z1 ^ z2, (p1 + p2 + 2 * _popcount(z1 & x2)) & 3


def pauli_mul(p: SignedPauli, q: SignedPauli) -> SignedPauli:
    """Exact operator product ``p @ q``."""
    _check_sizes(p, q)
    x, z, ph = mul_raw(p.x_mask, p.z_mask, p.phase, q.x_mask, q.z_mask, q.phase)
    return SignedPauli(p.n_qubits, x, z, ph)


def commutes(p: SignedPauli, q: SignedPauli) -> bool:
    """True iff ``p q == q p`` (symplectic inner product is zero)."""
    _check_sizes(p, q)
    return (_popcount(p.x_mask & q.z_mask) + _popcount(p.z_mask & q.x_mask)) % 2 == 0


def product(paulis: Iterable[SignedPauli], n_qubits: int) -> SignedPauli:
    """Ordered product of ``paulis``; identity when empty."""
    x = z = ph = 0
    for p in paulis:
        if p.n_qubits != n_qubits:
            raise DimensionError("qubit count mismatch in product")
        x, z, ph = mul_raw(x, z, ph, p.x_mask, p.z_mask, p.phase)
    return SignedPauli(n_qubits, x, z, ph)
