"""Single-qubit input states and their magic / mixedness diagnostics.

A state is stored by its Bloch vector.  The coefficient table used by the
Fourier expansion is ``coeff[s][t] = Tr[X^s rho Z^t]``, so that
``rho = 1/2 sum_{s,t} coeff[s][t] X^s Z^t``; with ``XZ = -iY`` this gives
``coeff[1][1] = i * r_y``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import CAPACITY, TOL
from .errors import CapacityError, DomainError, ValidationError

_SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class QubitInput:
    bloch: tuple[float, float, float]

    def __post_init__(self):
        b = tuple(float(v) for v in self.bloch)
        if len(b) != 3 or not all(math.isfinite(v) for v in b):
            raise ValidationError("Bloch vector must be three finite reals")
        if b[0] ** 2 + b[1] ** 2 + b[2] ** 2 > 1 + 2 * TOL.purity_slack:
            raise ValidationError(f"Bloch vector {b} lies outside the unit ball")
        object.__setattr__(self, "bloch", b)

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> QubitInput:
        """``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
        return cls((math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
                    math.cos(theta)))

    @classmethod
    def parse(cls, spec: str) -> QubitInput:
        return parse_input(spec)

    def depolarize(self, eps: float) -> QubitInput:
        """``(1-eps) rho + eps I/2``."""
        if not 0 <= eps <= 1:
            raise DomainError("depolarizing strength must lie in [0, 1]")
        return QubitInput(tuple((1 - eps) * v for v in self.bloch))

    # -- views -----------------------------------------------------------

    @property
    def radius(self) -> float:
        return math.sqrt(sum(v * v for v in self.bloch))

    @property
    def purity(self) -> float:
        """``Tr rho^2``."""
        return (1 + sum(v * v for v in self.bloch)) / 2

    @property
    def is_pure(self) -> bool:
        return self.purity >= 1 - TOL.purity_slack

    @property
    def coefficients(self) -> np.ndarray:
        rx, ry, rz = self.bloch
        return np.array([[1.0, rz], [rx, 1j * ry]], dtype=complex)

    def coefficient(self, s: int, t: int) -> complex:
        rx, ry, rz = self.bloch
        if s:
            return complex(0, ry) if t else complex(rx)
        return complex(rz) if t else 1 + 0j

    def density_matrix(self) -> np.ndarray:
        rx, ry, rz = self.bloch
        return 0.5 * np.array([[1 + rz, rx - 1j * ry], [rx + 1j * ry, 1 - rz]], dtype=complex)

    def state_vector(self) -> np.ndarray:
        if not self.is_pure:
            raise DomainError("state vector requested for a mixed state")
        rx, ry, rz = self.bloch
        theta = math.acos(max(-1.0, min(1.0, rz / self.radius)))
        phi = math.atan2(ry, rx)
        return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])

    def __str__(self) -> str:
        return "bloch({:.17g},{:.17g},{:.17g})".format(*self.bloch)


# named states --------------------------------------------------------------

NAMED_STATES = {
    "zero": (0.0, 0.0, 1.0),
    "one": (0.0, 0.0, -1.0),
    "plus": (1.0, 0.0, 0.0),
    "minus": (-1.0, 0.0, 0.0),
    "mixed": (0.0, 0.0, 0.0),
    # (|0> + e^{i pi/4}|1>)/sqrt2
    "T": (_SQRT_HALF, _SQRT_HALF, 0.0),
    # cos(pi/8)|0> + sin(pi/8)|1>
    "H": (_SQRT_HALF, 0.0, _SQRT_HALF),
}

_CALL = re.compile(r"^\s*([A-Za-z]+)\s*\((.*)\)\s*$")


def parse_input(spec: str) -> QubitInput:
    """Parse a state spec.

    Accepted forms: a name from ``NAMED_STATES``; ``magicT(eps)`` for the
    depolarized T state; ``bloch(x,y,z)``; ``angles(theta,phi)``.
    """
    text = spec.strip()
    if text in NAMED_STATES:
        return QubitInput(NAMED_STATES[text])
    m = _CALL.match(text)
    if m is None:
        raise ValidationError(f"unknown input state {spec!r}")
    head, body = m.groups()
    try:
        args = [float(a) for a in body.split(",")] if body.strip() else []
    except ValueError:
        raise ValidationError(f"non-numeric argument in {spec!r}") from None
    if head == "magicT" and len(args) == 1:
        return QubitInput(NAMED_STATES["T"]).depolarize(args[0])
    if head == "bloch" and len(args) == 3:
        return QubitInput(tuple(args))
    if head == "angles" and len(args) == 2:
        return QubitInput.from_angles(*args)
    raise ValidationError(f"cannot parse input state {spec!r}")


# diagnostics ---------------------------------------------------------------


def _require_pure(q: QubitInput) -> None:
    if not q.is_pure:
        raise DomainError(f"operation needs a pure state, got purity {q.purity:.15g}")


def mixedness(q: QubitInput) -> float:
    """``1 - sqrt(2 Tr rho^2 - 1)``, i.e. one minus the Bloch radius."""
    radicand = 2 * q.purity - 1
    if radicand < 0:
        if radicand < -TOL.radicand_clamp:
            raise ValidationError("purity below 1/2")
        radicand = 0.0
    return 1 - math.sqrt(min(radicand, 1.0))


def stabilizer_fidelity(q: QubitInput) -> float:
    """Largest overlap with one of the six single-qubit stabilizer states."""
    _require_pure(q)
    return (1 + max(abs(v) for v in q.bloch)) / 2


def magic_mu(q: QubitInput) -> float:
    """``2 (1 - F)``; zero exactly on stabilizer states."""
    _require_pure(q)
    return 1 - max(abs(v) for v in q.bloch)


def pauli_rank_single(q: QubitInput, tol: float = TOL.rank_zero) -> int:
    """Number of nonzero entries of the coefficient table."""
    _require_pure(q)
    return 1 + sum(1 for v in q.bloch if abs(v) > tol)


@dataclass(frozen=True)
class ReferenceOperator:
    """``(I + a X + b Z + c iXZ)/2`` with ``a, b, c`` in {0, 1}."""

    coefficients: np.ndarray
    pauli_rank: int

    def matrix(self) -> np.ndarray:
        c = self.coefficients
        a, y, b = c[1, 0].real, c[1, 1].imag, c[0, 1].real
        return 0.5 * np.array([[1 + b, a - 1j * y], [a + 1j * y, 1 - b]], dtype=complex)

    def coefficient(self, s: int, t: int) -> complex:
        return complex(self.coefficients[s, t])


def reference_operator(q: QubitInput, tol: float = TOL.rank_zero) -> ReferenceOperator:
    _require_pure(q)
    a, c, b = (1.0 if abs(v) > tol else 0.0 for v in q.bloch)
    table = np.array([[1.0, b], [a, 1j * c]], dtype=complex)
    return ReferenceOperator(table, 1 + int(a + b + c))


def random_pure_input(rng: np.random.Generator) -> QubitInput:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return QubitInput(tuple(v))


def random_mixed_input(rng: np.random.Generator, min_mixedness: float = 0.05) -> QubitInput:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    radius = rng.uniform(0.0, 1.0 - min_mixedness)
    return QubitInput(tuple(radius * v))


# n-qubit Pauli rank ----------------------------------------------------------


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis."""
    a = np.array(a, dtype=complex, copy=True)
    n = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < n:
        v = a.reshape(*lead, n // (2 * h), 2, h)
        u0 = v[..., 0, :].copy()
        u1 = v[..., 1, :]
        v[..., 0, :] = u0 + u1
        v[..., 1, :] = u0 - u1
        a = v.reshape(*lead, n)
        h *= 2
    return a


def pauli_coefficients(state: Sequence[complex]) -> np.ndarray:
    """Table ``C[s, t] = <psi| Z^t X^s |psi>`` over basis-index masks.

    ``s`` and ``t`` index X and Z masks in the same bit order as basis
    indices.  ``C[s, t] = Tr[X^s rho Z^t]`` for ``rho = |psi><psi|``.
    """
    psi = np.asarray(state, dtype=complex).ravel()
    dim = psi.size
    n = dim.bit_length() - 1
    if dim != 1 << n or n < 1:
        raise ValidationError("state length must be a power of two")
    if n > CAPACITY.pauli_rank_max_qubits:
        raise CapacityError(f"dense Pauli decomposition limited to {CAPACITY.pauli_rank_max_qubits} qubits")
    if abs(np.vdot(psi, psi).real - 1) > 1e-10:
        raise ValidationError("state vector is not normalized")
    idx = np.arange(dim)
    out = np.empty((dim, dim), dtype=complex)
    chunk = max(1, (1 << 22) // dim)
    for start in range(0, dim, chunk):
        s = idx[start : start + chunk]
        rows = psi.conj()[None, :] * psi[idx[None, :] ^ s[:, None]]
        out[start : start + chunk] = fwht(rows)
    return out


def pauli_rank_n(state: Sequence[complex], tol: float = TOL.rank_zero) -> int:
    """Number of ``(s, t)`` with ``|Tr[X^s rho Z^t]| > tol`` for a pure state."""
    return int(np.count_nonzero(np.abs(pauli_coefficients(state)) > tol))
