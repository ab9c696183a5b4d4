"""IQP circuits ``H^n D H^n`` with ``D`` built from CZ, Z, S and T.

``D = diag(f(x))`` with

    f(x) = (-1)^{beta.x} i^{x A x} e^{i pi t.x / 4},

where ``A`` is symmetric over {0, 1}: ``A_ii`` flags an S gate and
``A_ij`` (i != j) a CZ.  ``x A x`` is taken as an integer, so off-diagonal
entries contribute ``i^2``.  All phases are kept as integers mod 8 in units
of ``pi / 4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .clifford import conjugate_raw_by_gate
from .config import CAPACITY
from .errors import CapacityError, DimensionError, DomainError, ValidationError
from .f2 import F2Matrix, f2_rank
from .inputs import fwht

C_BOUND = math.log2(4 / 3)

# e^{i pi k / 4} for k = 0..7
OMEGA = np.exp(1j * np.pi * np.arange(8) / 4)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _local_table() -> np.ndarray:
    """``T[c, s, z, y] = <y| H S^c X^s Z^z H |y>``."""
    eye = np.eye(2, dtype=complex)
    S = np.diag([1, 1j])
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Z = np.diag([1.0 + 0j, -1.0])
    out = np.zeros((2, 2, 2, 2), dtype=complex)
    for c in range(2):
        for s in range(2):
            for z in range(2):
                w = (S if c else eye) @ (X if s else eye) @ (Z if z else eye)
                out[c, s, z] = np.diag(_H @ w @ _H)
    return out


_LOCAL = _local_table()


@dataclass(frozen=True, eq=False)
class IqpCircuit:
    """Canonical flags: ``A`` (CZ off-diagonal, S on the diagonal), ``beta`` (Z), ``t`` (T)."""

    A: np.ndarray
    beta: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.uint8) & 1
        beta = np.asarray(self.beta, dtype=np.uint8).ravel() & 1
        t = np.asarray(self.t, dtype=np.uint8).ravel() & 1
        n = beta.size
        if A.shape != (n, n) or t.size != n:
            raise DimensionError("A must be n x n and beta, t of length n")
        if not np.array_equal(A, A.T):
            raise ValidationError("A must be symmetric")
        for name, v in (("A", A), ("beta", beta), ("t", t)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def n(self) -> int:
        return self.beta.size

    @property
    def gamma(self) -> np.ndarray:
        return np.diag(self.A).copy()

    @classmethod
    def empty(cls, n: int) -> IqpCircuit:
        z = np.zeros(n, dtype=np.uint8)
        return cls(np.zeros((n, n), dtype=np.uint8), z, z)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IqpCircuit):
            return NotImplemented
        return (np.array_equal(self.A, other.A) and np.array_equal(self.beta, other.beta)
                and np.array_equal(self.t, other.t))

    def __hash__(self) -> int:
        return hash((self.A.tobytes(), self.beta.tobytes(), self.t.tobytes()))

    def gates(self) -> list[tuple[str, tuple[int, ...]]]:
        """Diagonal layer as (name, qubits) pairs; the order is irrelevant."""
        out = []
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if self.A[i, j]:
                    out.append(("CZ", (i, j)))
        for name, flags in (("Z", self.beta), ("S", self.gamma), ("T", self.t)):
            out += [(name, (i,)) for i in range(n) if flags[i]]
        return out

    def full_gates(self) -> list[tuple[str, tuple[int, ...]]]:
        """``H^n D H^n`` for the dense oracle."""
        h = [("H", (i,)) for i in range(self.n)]
        return h + self.gates() + h


def random_iqp(n: int, rng: np.random.Generator, with_t: bool = True) -> IqpCircuit:
    """Every CZ, Z, S and T flag is an independent fair coin."""
    upper = np.triu(rng.integers(0, 2, size=(n, n), dtype=np.uint8), 1)
    gamma = rng.integers(0, 2, size=n, dtype=np.uint8)
    A = upper + upper.T + np.diag(gamma)
    beta = rng.integers(0, 2, size=n, dtype=np.uint8)
    t = rng.integers(0, 2, size=n, dtype=np.uint8) if with_t else np.zeros(n, dtype=np.uint8)
    return IqpCircuit(A, beta, t)


# file format ---------------------------------------------------------------


def parse_iqp(text: str) -> IqpCircuit:
    """Read ``iqp n`` plus ``CZ i j`` / ``Z i`` / ``S i`` / ``T i`` lines.

    Repeated gates fold with T^2 = S, S^2 = Z, Z^2 = I and CZ^2 = I.
    """
    n = None
    exps: list[int] = []
    cz: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        head, args = line[0], line[1:]
        try:
            idx = [int(a) for a in args]
        except ValueError:
            raise ValidationError(f"line {lineno}: non-integer argument") from None
        if n is None:
            if head != "iqp" or len(idx) != 1 or idx[0] < 1:
                raise ValidationError("IQP file must start with 'iqp n'")
            n = idx[0]
            exps = [0] * n
            continue
        if any(not 0 <= q < n for q in idx):
            raise ValidationError(f"line {lineno}: qubit index out of range")
        if head == "CZ" and len(idx) == 2:
            if idx[0] == idx[1]:
                raise ValidationError(f"line {lineno}: CZ needs distinct qubits")
            key = tuple(sorted(idx))
            cz[key] = cz.get(key, 0) ^ 1
        elif head in ("Z", "S", "T") and len(idx) == 1:
            exps[idx[0]] = (exps[idx[0]] + {"Z": 4, "S": 2, "T": 1}[head]) % 8
        else:
            raise ValidationError(f"line {lineno}: cannot parse {raw.strip()!r}")
    if n is None:
        raise ValidationError("empty IQP file")
    e = np.array(exps, dtype=np.uint8)
    A = np.diag((e >> 1) & 1).astype(np.uint8)
    for (i, j), v in cz.items():
        A[i, j] = A[j, i] = v
    return IqpCircuit(A, (e >> 2) & 1, e & 1)


def format_iqp(c: IqpCircuit) -> str:
    lines = [f"iqp {c.n}"]
    lines += [f"{name} {' '.join(map(str, q))}" for name, q in c.gates()]
    return "\n".join(lines) + "\n"


# phase function and output distribution --------------------------------------


def phase_exponent(c: IqpCircuit, x: Sequence[int]) -> int:
    """Exponent ``k`` with ``f(x) = e^{i pi k / 4}``."""
    x = np.asarray(x, dtype=np.int64).ravel()
    if x.size != c.n:
        raise DimensionError(f"x has length {x.size}, expected {c.n}")
    A = c.A.astype(np.int64)
    xax = int(x @ A @ x)  # diagonal once, off-diagonal twice
    return int(4 * (c.beta @ x) + 2 * xax + c.t @ x) % 8


def phase_function(c: IqpCircuit, x: Sequence[int]) -> complex:
    return complex(OMEGA[phase_exponent(c, x)])


def _all_inputs(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return ((idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1).astype(np.int64)


def phase_exponents(c: IqpCircuit) -> np.ndarray:
    """Exponents for every ``x``, indexed with qubit 0 most significant."""
    xs = _all_inputs(c.n)
    A = c.A.astype(np.int64)
    xax = np.einsum("ai,ij,aj->a", xs, A, xs)
    return (4 * (xs @ c.beta.astype(np.int64)) + 2 * xax + xs @ c.t.astype(np.int64)) % 8


def _check_brute(n: int) -> None:
    if n > CAPACITY.gowers_max_qubits:
        raise CapacityError(f"brute-force IQP analysis limited to {CAPACITY.gowers_max_qubits} qubits")


def fourier_transform(c: IqpCircuit) -> np.ndarray:
    """``f_hat(y) = 2^{-n} sum_x f(x) (-1)^{x.y}`` for every ``y``."""
    _check_brute(c.n)
    return fwht(OMEGA[phase_exponents(c)]) / 2**c.n


def output_distribution(c: IqpCircuit) -> np.ndarray:
    """``p(y) = |<y| H D H |0>|^2 = |f_hat(y)|^2``."""
    return np.abs(fourier_transform(c)) ** 2


def second_moment_bruteforce(c: IqpCircuit) -> float:
    p = output_distribution(c)
    return math.fsum(p * p)


# pushing X through the diagonal layer -------------------------------------------


@dataclass(frozen=True)
class PushResult:
    """``D X^s D^dag = e^{i pi phase / 4} prod_i S_i^{c_i} X^{x_mask} Z^{z_mask}``."""

    phase: int
    s_exponents: tuple[int, ...]
    x_mask: tuple[int, ...]
    z_mask: tuple[int, ...]

    def local_factors(self) -> list[tuple[int, int, int]]:
        return list(zip(self.s_exponents, self.x_mask, self.z_mask))


def push_x_through_diagonal(c: IqpCircuit, s: Sequence[int]) -> PushResult:
    """Conjugate ``X^s`` by ``D``.

    Each T turns ``X`` into ``e^{-i pi/4} S X``; the Clifford part
    (CZ, Z, S) then maps ``X^s`` to a signed Pauli, which commutes past the
    residual S gates since all of them are diagonal or act on disjoint
    factors in the same way.
    """
    s = [int(v) & 1 for v in s]
    n = c.n
    if len(s) != n:
        raise DimensionError(f"s has length {len(s)}, expected {n}")
    residual = tuple(int(c.t[i]) & s[i] for i in range(n))
    x = sum(1 << i for i in range(n) if s[i])
    z = ph = 0
    for name, qubits in c.gates():
        if name != "T":
            x, z, ph = conjugate_raw_by_gate(name, qubits, x, z, ph)
    phase = (2 * ph - sum(residual)) % 8
    return PushResult(
        phase,
        residual,
        tuple(s),
        tuple((z >> i) & 1 for i in range(n)),
    )


def push_result_matrix(r: PushResult) -> np.ndarray:
    """Dense reconstruction of a :class:`PushResult` (qubit 0 leftmost)."""
    S = np.diag([1, 1j])
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Z = np.diag([1.0 + 0j, -1.0])
    eye = np.eye(2, dtype=complex)
    out = np.ones((1, 1), dtype=complex)
    for cexp, a, b in r.local_factors():
        w = (S if cexp else eye) @ (X if a else eye) @ (Z if b else eye)
        out = np.kron(out, w)
    return OMEGA[r.phase] * out


def _noise_weight(s: Sequence[int], eps: float) -> float:
    w = 1.0
    for v in s:
        w *= (1 - eps) / 2 if v else 0.5
    return w


def _check_eps(eps: float) -> None:
    if not 0 <= eps <= 1:
        raise DomainError("eps must lie in [0, 1]")


def iqp_fourier_coefficient(c: IqpCircuit, y: Sequence[int], s: Sequence[int], eps: float) -> float:
    """``Re[<y| V Z^s V^dag |y>] prod_i (1-eps)^{s_i}/2`` with ``V = H D H``."""
    _check_eps(eps)
    y = [int(v) & 1 for v in y]
    if len(y) != c.n:
        raise DimensionError(f"y has length {len(y)}, expected {c.n}")
    r = push_x_through_diagonal(c, s)
    amp = complex(OMEGA[r.phase])
    for (cexp, a, b), yi in zip(r.local_factors(), y):
        amp *= _LOCAL[cexp, a, b, yi]
    return amp.real * _noise_weight(s, eps)


def _coefficient_vector(c: IqpCircuit, s: Sequence[int], eps: float) -> np.ndarray:
    """Coefficient for every ``y`` at once (Kronecker product of local diagonals)."""
    r = push_x_through_diagonal(c, s)
    vec = np.ones(1, dtype=complex)
    for cexp, a, b in r.local_factors():
        vec = np.kron(vec, _LOCAL[cexp, a, b])
    return (OMEGA[r.phase] * vec).real * _noise_weight(s, eps)


def weight_patterns(n: int, l: int) -> Iterator[tuple[int, ...]]:
    """Bit vectors of Hamming weight <= l, by weight then support."""
    for w in range(min(l, n) + 1):
        for support in combinations(range(n), w):
            yield tuple(1 if i in support else 0 for i in range(n))


def iqp_approx_probability(c: IqpCircuit, eps: float, y: Sequence[int], l: int) -> float:
    _check_eps(eps)
    if not 0 <= l <= c.n:
        raise DomainError(f"level {l} outside [0, {c.n}]")
    return math.fsum(iqp_fourier_coefficient(c, y, s, eps) for s in weight_patterns(c.n, l))


def iqp_approx_distribution(c: IqpCircuit, eps: float, l: int) -> np.ndarray:
    """Truncated estimate for every ``y`` (index order: qubit 0 most significant)."""
    _check_eps(eps)
    if not 0 <= l <= c.n:
        raise DomainError(f"level {l} outside [0, {c.n}]")
    _check_brute(c.n)
    rows = np.array([_coefficient_vector(c, s, eps) for s in weight_patterns(c.n, l)])
    return np.array([math.fsum(col) for col in rows.T])


def iqp_dense_distribution(c: IqpCircuit, eps: float) -> np.ndarray:
    """Density-matrix simulation with inputs ``(1-eps)|0><0| + eps I/2``."""
    from .dense import DenseState, apply_circuit, marginal_distribution

    rho1 = np.array([[1 - eps / 2, 0], [0, eps / 2]], dtype=complex)
    state = DenseState.product([rho1] * c.n)
    state = apply_circuit(state, c.full_gates())
    return marginal_distribution(state, range(c.n))


# second moments ------------------------------------------------------------------


def _rank_of(A: np.ndarray) -> int:
    return f2_rank(F2Matrix.from_array(A)) if A.size else 0


def second_moment_exact_no_T(c: IqpCircuit) -> float:
    """``sum_y p(y)^2 = 2^{-rank A}`` for circuits without T gates."""
    if c.t.any():
        raise DomainError("circuit has T gates; use second_moment_bound")
    return 2.0 ** -_rank_of(c.A)


def second_moment_bound(c: IqpCircuit) -> float:
    """``2^{-c|t| - rank A(t)}`` with ``c = log2(4/3)``; ``A(t)`` drops T-flagged rows and columns."""
    keep = np.flatnonzero(c.t == 0)
    reduced = c.A[np.ix_(keep, keep)]
    k = int(c.t.sum())
    return (0.75**k) * 2.0 ** -_rank_of(reduced)


def gowers_u2_bruteforce(c: IqpCircuit) -> float:
    """``||f||_{U^2}^4`` from the Fourier side, ``sum_y |f_hat(y)|^4``."""
    fh = np.abs(fourier_transform(c))
    return math.fsum(fh**4)


def gowers_u2_increment(c: IqpCircuit) -> float:
    """``||f||_{U^2}^4 = E_h |E_x f(x + h) conj f(x)|^2``, straight from the definition."""
    _check_brute(c.n)
    f = OMEGA[phase_exponents(c)]
    idx = np.arange(f.size)
    inner = np.array([np.mean(f[idx ^ h] * f.conj()) for h in idx])
    return math.fsum(np.abs(inner) ** 2) / f.size


# exact arithmetic in Z[omega], omega^4 = -1


def _zw_mul(a: tuple, b: tuple) -> tuple:
    out = [0, 0, 0, 0]
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                k = i + j
                if k < 4:
                    out[k] += ai * bj
                else:
                    out[k - 4] -= ai * bj
    return tuple(out)


def _zw_conj(a: tuple) -> tuple:
    # conj(omega^k) = omega^{-k} = -omega^{4-k}
    return (a[0], -a[3], -a[2], -a[1])


def second_moment_exact_rational(c: IqpCircuit) -> Fraction:
    """``sum_y p(y)^2`` as an exact fraction via ``E_h |E_x f(x+h) conj f(x)|^2``."""
    _check_brute(c.n)
    e = phase_exponents(c)
    size = e.size
    total = [0, 0, 0, 0]
    for h in range(size):
        inner = [0, 0, 0, 0]
        for x in range(size):
            k = int(e[x ^ h] - e[x]) % 8
            if k < 4:
                inner[k] += 1
            else:
                inner[k - 4] -= 1
        sq = _zw_mul(tuple(inner), _zw_conj(tuple(inner)))
        total = [a + b for a, b in zip(total, sq)]
    # a0 + a1 w + a2 w^2 + a3 w^3 is real iff a1 = -a3 and a2 = 0, and then
    # equals a0 + sqrt(2) a1
    if total[1] != -total[3] or total[2] != 0:
        raise ValidationError("second moment is not real")
    if total[1] != 0:
        raise ValidationError("second moment is irrational")
    return Fraction(total[0], size**3)


def ensemble_moment_target(n: int) -> float:
    return 2.0 ** -(n - 1) - 2.0 ** (-2 * n)


def ensemble_moment_target_exact(n: int) -> Fraction:
    return Fraction(1, 2 ** (n - 1)) - Fraction(1, 2 ** (2 * n))


def all_iqp_circuits(n: int) -> Iterator[IqpCircuit]:
    """Every flag assignment (CZ pairs, Z, S, T)."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    n_flags = len(pairs) + 3 * n
    for code in range(2**n_flags):
        bits = [(code >> k) & 1 for k in range(n_flags)]
        A = np.zeros((n, n), dtype=np.uint8)
        for (i, j), b in zip(pairs, bits):
            A[i, j] = A[j, i] = b
        rest = bits[len(pairs):]
        A[np.arange(n), np.arange(n)] = rest[n : 2 * n]
        yield IqpCircuit(A, rest[:n], rest[2 * n :])


def exhaustive_average_second_moment(n: int) -> Fraction:
    circuits = list(all_iqp_circuits(n))
    return sum((second_moment_exact_rational(c) for c in circuits), Fraction(0)) / len(circuits)


def _trial_rng(seed, i: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))


def average_second_moment_mc(n: int, trials: int, rng) -> tuple[float, float]:
    """Monte Carlo ``E_D sum_y p_D(y)^2`` with its standard error.

    ``rng`` is a master seed (int); trial ``i`` draws from the stream with
    spawn key ``(i,)`` and results are merged by Welford updates in trial
    order, so the answer does not depend on how trials are scheduled.
    """
    if trials < 2:
        raise DomainError("need at least two trials for a standard error")
    if isinstance(rng, np.random.Generator):
        rng = int(rng.integers(2**63))
    mean = m2 = 0.0
    for i in range(trials):
        v = second_moment_bruteforce(random_iqp(n, _trial_rng(rng, i)))
        delta = v - mean
        mean += delta / (i + 1)
        m2 += delta * (v - mean)
    var = m2 / (trials - 1)
    return mean, math.sqrt(var / trials)
