"""Brute-force dense simulation used as ground truth.

Qubit 0 is the most significant bit of a basis index, matching the leftmost
letter of a Pauli literal.  Nothing here is fast; it is written to be easy to
check by eye.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import CAPACITY, TOL
from .errors import CapacityError, DimensionError, ValidationError
from .pauli import SignedPauli

log = logging.getLogger(__name__)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)
_T = np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex)

GATE_MATRICES = {
    "I": _I2,
    "H": _H,
    "S": _S,
    "SDG": _S.conj().T,
    "T": _T,
    "TDG": _T.conj().T,
    "X": _X,
    "Y": _Y,
    "Z": _Z,
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}

_MAGIC = b"PFDENSE1"


def pauli_matrix(p: SignedPauli) -> np.ndarray:
    """Dense ``2^N x 2^N`` matrix of a :class:`SignedPauli`."""
    factors = []
    for q in range(p.n_qubits):
        m = _I2
        if (p.x_mask >> q) & 1:
            m = m @ _X
        if (p.z_mask >> q) & 1:
            m = m @ _Z
        factors.append(m)
    return (1j**p.phase) * reduce(np.kron, factors)


def basis_index(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | (int(b) & 1)
    return out


def _check_capacity(n_qubits: int, pure: bool) -> None:
    limit = CAPACITY.dense_pure_qubits if pure else CAPACITY.dense_mixed_qubits
    n_bytes = 16 * (2**n_qubits if pure else 4**n_qubits)
    log.info("dense %s state on %d qubits needs %.1f MiB", "pure" if pure else "mixed",
             n_qubits, n_bytes / 2**20)
    if n_qubits > limit:
        raise CapacityError(
            f"{n_qubits} qubits exceeds the dense {'pure' if pure else 'mixed'} limit "
            f"of {limit} (would need {n_bytes / 2**20:.1f} MiB)"
        )


@dataclass
class DenseState:
    """Pure state vector or density matrix on ``n_qubits`` qubits."""

    n_qubits: int
    data: np.ndarray
    pure: bool

    def __post_init__(self):
        _check_capacity(self.n_qubits, self.pure)
        dim = 2**self.n_qubits
        self.data = np.asarray(self.data, dtype=complex)
        if self.pure:
            if self.data.shape != (dim,):
                raise DimensionError(f"expected a vector of length {dim}")
            if abs(np.vdot(self.data, self.data).real - 1) > TOL.dense_norm:
                raise ValidationError("state vector is not normalized")
        else:
            if self.data.shape != (dim, dim):
                raise DimensionError(f"expected a {dim}x{dim} matrix")
            if abs(np.trace(self.data) - 1) > TOL.dense_norm:
                raise ValidationError("density matrix does not have unit trace")
            if np.max(np.abs(self.data - self.data.conj().T)) > TOL.dense_norm:
                raise ValidationError("density matrix is not Hermitian")

    @classmethod
    def zero(cls, n_qubits: int, pure: bool = True) -> DenseState:
        dim = 2**n_qubits
        if pure:
            v = np.zeros(dim, dtype=complex)
            v[0] = 1
            return cls(n_qubits, v, True)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1
        return cls(n_qubits, rho, False)

    @classmethod
    def product(cls, factors: Sequence[np.ndarray]) -> DenseState:
        """Tensor product of single-qubit vectors (pure) or 2x2 matrices."""
        arrs = [np.asarray(f, dtype=complex) for f in factors]
        pure = all(a.ndim == 1 for a in arrs)
        if not pure:
            arrs = [np.outer(a, a.conj()) if a.ndim == 1 else a for a in arrs]
        return cls(len(arrs), reduce(np.kron, arrs), pure)

    def density_matrix(self) -> np.ndarray:
        if self.pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def copy(self) -> DenseState:
        return DenseState(self.n_qubits, self.data.copy(), self.pure)

    def to_bytes(self) -> bytes:
        header = struct.pack("<8sII", _MAGIC, self.n_qubits, 1 if self.pure else 0)
        return header + self.data.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> DenseState:
        magic, n, flag = struct.unpack("<8sII", blob[:16])
        if magic != _MAGIC:
            raise ValidationError("not a dense state dump")
        data = np.frombuffer(blob[16:], dtype="<c16").astype(complex)
        if flag:
            return cls(n, data, True)
        dim = 2**n
        return cls(n, data.reshape(dim, dim), False)


def _apply_local(tensor: np.ndarray, mat: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    op = mat.reshape((2,) * (2 * k))
    moved = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(moved, list(range(k)), list(axes))


def apply_circuit(state: DenseState, gates) -> DenseState:
    """Apply gates in order.  Accepts a Circuit or an iterable of (name, qubits)."""
    gate_list = getattr(gates, "gates", gates)
    n = state.n_qubits
    if state.pure:
        t = state.data.reshape((2,) * n)
    else:
        t = state.data.reshape((2,) * (2 * n))
    for name, qubits in gate_list:
        mat = GATE_MATRICES[name]
        qubits = tuple(qubits)
        if mat.shape[0] != 2 ** len(qubits):
            raise ValidationError(f"gate {name} applied to {len(qubits)} qubits")
        if any(not 0 <= q < n for q in qubits):
            raise ValidationError(f"gate {name} index out of range")
        t = _apply_local(t, mat, qubits)
        if not state.pure:
            t = _apply_local(t, mat.conj(), [q + n for q in qubits])
    shape = (2**n,) if state.pure else (2**n, 2**n)
    return DenseState(n, t.reshape(shape), state.pure)


def circuit_unitary(gates, n_qubits: int) -> np.ndarray:
    """Dense unitary of a gate list (columns are images of basis states)."""
    _check_capacity(n_qubits, True)
    dim = 2**n_qubits
    cols = []
    for j in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[j] = 1
        cols.append(apply_circuit(DenseState(n_qubits, v, True), gates).data)
    return np.stack(cols, axis=1)


def exact_probability(state: DenseState, measured: Sequence[int], y: Sequence[int]) -> float:
    """``Tr[rho (|y><y|_K (x) I)]``."""
    measured = list(measured)
    if len(measured) != len(y):
        raise DimensionError("y must have one bit per measured qubit")
    return float(marginal_distribution(state, measured)[basis_index(y)])


def marginal_distribution(state: DenseState, measured: Sequence[int]) -> np.ndarray:
    """Outcome probabilities on ``measured`` indexed by ``basis_index(y)``."""
    n = state.n_qubits
    measured = list(measured)
    if len(set(measured)) != len(measured) or any(not 0 <= q < n for q in measured):
        raise ValidationError("bad measured qubit list")
    if state.pure:
        diag = np.abs(state.data) ** 2
    else:
        diag = np.real(np.diag(state.data))
    t = diag.reshape((2,) * n)
    others = tuple(q for q in range(n) if q not in measured)
    marg = t.sum(axis=others) if others else t
    # remaining axes are in increasing qubit order; reorder to ``measured``
    order = sorted(measured)
    marg = np.transpose(marg, [order.index(q) for q in measured]) if measured else marg
    return np.asarray(marg).reshape(-1)


def l1_distance(p: Mapping, q: Mapping) -> float:
    """``sum_y |p(y) - q(y)|`` over identical key sets."""
    if set(p) != set(q):
        raise ValidationError("distributions have different supports")
    return math.fsum(abs(p[k] - q[k]) for k in p)


def all_outcomes(k: int) -> list[tuple[int, ...]]:
    return [tuple((v >> (k - 1 - j)) & 1 for j in range(k)) for v in range(2**k)]


def instance_state(inst) -> DenseState:
    """Input product state ``|0><0|^n (x) rho_1 (x) ... (x) rho_m``."""
    zero = np.array([1, 0], dtype=complex)
    factors = [zero] * inst.n
    pure = all(q.is_pure for q in inst.inputs)
    for q in inst.inputs:
        factors.append(q.state_vector() if pure else q.density_matrix())
    return DenseState.product(factors)


def instance_gates(inst):
    from .clifford import synthesize

    if inst.circuit is not None:
        return inst.circuit
    return synthesize(inst.tableau)


def dense_distribution(inst, prefix: Iterable = ()) -> dict:
    """Exact outcome distribution on the measured set, keyed by y tuples.

    ``prefix`` gates are applied to the input state before the circuit.
    """
    state = instance_state(inst)
    state = apply_circuit(state, list(prefix))
    state = apply_circuit(state, instance_gates(inst))
    probs = marginal_distribution(state, inst.measured)
    return {y: float(probs[i]) for i, y in enumerate(all_outcomes(len(inst.measured)))}


def twirl_identity_check(inst, a: Sequence[int], b: Sequence[int], tol: float = 1e-10):
    """Compare the sign-twisted Fourier sum with a dense run that inserts
    ``X^b Z^a`` on the nonstabilizer inputs.

    Returns ``(passed, max_deviation)``.
    """
    from .fourier import enumerate_terms, CoefficientEvaluator

    if inst.n + inst.m > CAPACITY.dense_mixed_qubits:
        raise CapacityError("twirl check limited to dense-oracle sizes")
    a = [int(v) & 1 for v in a]
    b = [int(v) & 1 for v in b]
    if len(a) != inst.m or len(b) != inst.m:
        raise DimensionError("a and b need one bit per nonstabilizer input")
    prefix = [("Z", (inst.n + i,)) for i in range(inst.m) if a[i]]
    prefix += [("X", (inst.n + i,)) for i in range(inst.m) if b[i]]
    direct = dense_distribution(inst, prefix)
    ev = CoefficientEvaluator(inst)
    worst = 0.0
    for y, p in direct.items():
        parts = []
        for s, t in enumerate_terms(inst.m, inst.m):
            sign = sum(si * ai + ti * bi for si, ai, ti, bi in zip(s, a, t, b)) % 2
            c = ev.coefficient(y, s, t)
            parts.append(-c if sign else c)
        worst = max(worst, abs(math.fsum(parts) - p))
    return worst <= tol, worst
