"""Low-weight Pauli-Fourier approximation of Clifford output probabilities.

The input ``|0><0|^n (x) rho_1 (x) ... (x) rho_m`` is expanded in the Pauli
basis on the ``m`` nonstabilizer qubits.  Each pattern ``(s, t)`` gives a
coefficient

    q_hat[s, t](y) = Tr[U (|0><0|^n (x) X^s Z^t) U^dag (|y><y|_K (x) I)]
                     * prod_i rho_i[s_i, t_i] / 2

which is a stabilizer-projector trace and therefore exact in polynomial
time.  Keeping the patterns with at most ``l`` non-identity positions gives
the truncated estimate ``q'(y)``.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .clifford import Circuit, CliffordTableau, conjugate, from_gates, random_clifford
from .config import CAPACITY, TOL
from .errors import (
    CapacityError,
    DimensionError,
    DomainError,
    InternalConsistencyError,
    ValidationError,
)
from .inputs import (
    QubitInput,
    magic_mu,
    mixedness,
    parse_input,
    pauli_rank_single,
    random_mixed_input,
    random_pure_input,
)
from .pauli import SignedPauli, _popcount, mul_raw
from .projector import ProjectorEvaluator

log = logging.getLogger(__name__)

# per-qubit non-identity patterns (s, t) in enumeration order 01, 10, 11
PATTERNS = ((0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class SimInstance:
    """Clifford circuit on ``n + m`` qubits with product input.

    Qubits ``0..n-1`` start in ``|0>``; qubit ``n + i`` starts in
    ``inputs[i]``.  ``circuit`` is optional and only used by the dense
    oracle (otherwise the tableau is synthesized).
    """

    n: int
    inputs: tuple[QubitInput, ...]
    tableau: CliffordTableau
    measured: tuple[int, ...]
    circuit: Circuit | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.n < 0:
            raise ValidationError("n must be non-negative")
        if self.tableau.n_qubits != self.n + self.m:
            raise DimensionError(
                f"tableau acts on {self.tableau.n_qubits} qubits, expected {self.n + self.m}"
            )
        k = tuple(sorted(set(int(q) for q in self.measured)))
        if len(k) != len(tuple(self.measured)):
            raise ValidationError("measured qubits must be distinct")
        if any(not 0 <= q < self.n_qubits for q in k):
            raise ValidationError("measured qubit out of range")
        object.__setattr__(self, "measured", k)

    @classmethod
    def from_circuit(cls, n: int, inputs: Sequence[QubitInput], circuit: Circuit,
                     measured: Sequence[int] | None = None) -> SimInstance:
        if measured is None:
            measured = range(circuit.n_qubits)
        return cls(n, tuple(inputs), from_gates(circuit), tuple(measured), circuit)

    @property
    def m(self) -> int:
        return len(self.inputs)

    @property
    def n_qubits(self) -> int:
        return self.n + self.m

    @property
    def k(self) -> int:
        return len(self.measured)

    def truncation_rate(self) -> tuple[str, float]:
        """Decay rate used by the error bound.

        ``("lambda", min mixedness)`` when every input is mixed,
        ``("mu", min magic)`` when every input is pure, and
        ``("epsilon", min of both)`` for a mixture.
        """
        if self.m == 0:
            raise DomainError("no nonstabilizer inputs; nothing is truncated")
        pure = [q for q in self.inputs if q.is_pure]
        mixed = [q for q in self.inputs if not q.is_pure]
        lam = min((mixedness(q) for q in mixed), default=None)
        mu = min((magic_mu(q) for q in pure), default=None)
        if mu is None:
            return "lambda", lam
        if lam is None:
            return "mu", mu
        return "epsilon", min(lam, mu)

    def with_tableau(self, tableau: CliffordTableau) -> SimInstance:
        return SimInstance(self.n, self.inputs, tableau, self.measured)


@dataclass(frozen=True)
class FourierTerm:
    s: tuple[int, ...]
    t: tuple[int, ...]
    weight: int
    value: float


def pattern_weight(s: Sequence[int], t: Sequence[int]) -> int:
    return sum(1 for a, b in zip(s, t) if a or b)


def enumerate_terms(m: int, l: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Patterns of weight <= l: by weight, then support, then 01 < 10 < 11."""
    for w in range(0, min(l, m) + 1):
        for support in itertools.combinations(range(m), w):
            for pats in itertools.product(PATTERNS, repeat=w):
                s = [0] * m
                t = [0] * m
                for q, (a, b) in zip(support, pats):
                    s[q] = a
                    t[q] = b
                yield tuple(s), tuple(t)


def coefficient_budget(m: int, l: int) -> int:
    """``sum_{i<=l} 3^i C(m, i)``: number of patterns of weight <= l."""
    if not 0 <= l <= m:
        raise DomainError(f"level {l} outside [0, {m}]")
    total = sum(3**i * math.comb(m, i) for i in range(l + 1))
    if total > CAPACITY.max_terms:
        log.error("coefficient budget %d exceeds capacity %d", total, CAPACITY.max_terms)
        raise CapacityError(f"{total} Fourier terms exceed the capacity of {CAPACITY.max_terms}")
    return total


def truncation_level(delta: float, alpha: float, rate: float, m: int | None = None) -> int:
    """Smallest ``l`` with ``sqrt(alpha) * exp(-rate * l) <= delta``.

    Clamped to ``[0, m]`` when ``m`` is given.
    """
    if rate == 0:
        raise DomainError("truncation bound vacuous: decay rate is 0")
    if not 0 < rate <= 1:
        raise DomainError(f"decay rate {rate} outside (0, 1]")
    if delta <= 0:
        raise DomainError("delta must be positive")
    if alpha <= 2:
        raise DomainError("alpha must exceed 2")
    raw = math.log(math.sqrt(alpha) / delta) / rate
    level = max(0, math.ceil(raw - TOL.rounding_slack))
    if m is not None:
        level = min(level, m)
    return level


def error_bound(alpha: float, rate: float, level: int) -> float:
    """``sqrt(alpha) * exp(-rate * level)``."""
    return math.sqrt(alpha) * math.exp(-rate * level)


def measured_cap(inputs: Sequence[QubitInput], n: int) -> int:
    """Largest measured-qubit count covered by the pure-input guarantee."""
    if any(not q.is_pure for q in inputs):
        raise DomainError("measured-qubit cap is defined for pure inputs only")
    loss = math.fsum(math.log2(pauli_rank_single(q) / 2) for q in inputs)
    return math.floor(n + len(inputs) - loss + TOL.rounding_slack)


class CoefficientEvaluator:
    """Evaluates Fourier coefficients of one instance.

    The stabilizer generators ``U Z_i U^dag`` and their GF(2) elimination
    are shared by every pattern, so each coefficient costs a single span
    reduction.
    """

    def __init__(self, inst: SimInstance, tables: Sequence[np.ndarray] | None = None):
        """``tables`` replaces the per-input coefficient tables ``rho[s, t]``
        (used to evaluate reference-operator coefficients)."""
        self.inst = inst
        u = inst.tableau
        N = inst.n_qubits
        gens = [conjugate(u, SignedPauli.single(N, i, "Z")) for i in range(inst.n)]
        self.projector = ProjectorEvaluator(gens, inst.measured, N)
        self._x_img = [u.x_images[inst.n + j] for j in range(inst.m)]
        self._z_img = [u.z_images[inst.n + j] for j in range(inst.m)]
        if tables is None:
            tables = [q.coefficients for q in inst.inputs]
        if len(tables) != inst.m:
            raise DimensionError(f"expected {inst.m} coefficient tables")
        self._coeffs = [np.asarray(c, dtype=complex) for c in tables]

    def pattern_operator(self, s: Sequence[int], t: Sequence[int]):
        """Raw ``U (I_n (x) X^s Z^t) U^dag``."""
        if len(s) != self.inst.m or len(t) != self.inst.m:
            raise DimensionError(f"pattern needs {self.inst.m} entries")
        x = z = ph = 0
        for j, a in enumerate(s):
            if a:
                p = self._x_img[j]
                x, z, ph = mul_raw(x, z, ph, p.x_mask, p.z_mask, p.phase)
        for j, b in enumerate(t):
            if b:
                p = self._z_img[j]
                x, z, ph = mul_raw(x, z, ph, p.x_mask, p.z_mask, p.phase)
        return x, z, ph

    def input_weight(self, s: Sequence[int], t: Sequence[int]) -> complex:
        w = 1 + 0j
        for c, a, b in zip(self._coeffs, s, t):
            w *= c[a, b] / 2
        return w

    def resolve(self, s, t):
        """``(amplitude, t_mask)`` with coefficient ``Re[amplitude * (-1)^{y.t_mask}]``
        on allowed outcomes, or ``None`` when the coefficient vanishes for all y."""
        weight = self.input_weight(s, t)
        if weight == 0:
            return None
        hit = self.projector.resolve_raw(*self.pattern_operator(s, t), check=False)
        if hit is None:
            return None
        unit, tmask = hit
        amp = (1j**unit) * math.ldexp(1.0, self.projector.log2_scale) * weight
        if abs(amp.imag) > TOL.imag_residual:
            raise InternalConsistencyError(
                f"coefficient for pattern s={s}, t={t} has imaginary part {amp.imag:.3e}"
            )
        return amp.real, tmask

    def coefficient(self, y: Sequence[int], s: Sequence[int], t: Sequence[int]) -> float:
        ymask = self.projector.y_mask(y)
        if not self.projector.outcome_allowed(ymask):
            return 0.0
        hit = self.resolve(s, t)
        if hit is None:
            return 0.0
        amp, tmask = hit
        return -amp if _popcount(ymask & tmask) & 1 else amp

    def terms(self, y: Sequence[int], level: int) -> list[FourierTerm]:
        return [
            FourierTerm(s, t, pattern_weight(s, t), self.coefficient(y, s, t))
            for s, t in enumerate_terms(self.inst.m, level)
        ]

    def probability(self, y: Sequence[int], level: int) -> float:
        _check_level(level, self.inst.m)
        return math.fsum(self.coefficient(y, s, t) for s, t in enumerate_terms(self.inst.m, level))

    def distribution(self, level: int) -> dict[tuple[int, ...], float]:
        """``q'(y)`` for every outcome on the measured set."""
        _check_level(level, self.inst.m)
        k = self.inst.k
        outcomes = [tuple((v >> (k - 1 - j)) & 1 for j in range(k)) for v in range(2**k)]
        ymasks = np.array([self.projector.y_mask(y) for y in outcomes], dtype=object)
        allowed = np.array([self.projector.outcome_allowed(int(ym)) for ym in ymasks])
        amps, tmasks = [], []
        for s, t in enumerate_terms(self.inst.m, level):
            hit = self.resolve(s, t)
            if hit is not None:
                amps.append(hit[0])
                tmasks.append(hit[1])
        out = {}
        for y, ym, ok in zip(outcomes, ymasks, allowed):
            if not ok or not amps:
                out[y] = 0.0
                continue
            ym = int(ym)
            out[y] = math.fsum(-a if _popcount(ym & tm) & 1 else a for a, tm in zip(amps, tmasks))
        return out


def _check_level(level: int, m: int) -> None:
    if not 0 <= level <= m:
        raise DomainError(f"level {level} outside [0, {m}]")


def fourier_coefficient(inst: SimInstance, y: Sequence[int], term) -> float:
    """Single coefficient ``q_hat[s, t](y)`` for ``term = (s, t)``."""
    s, t = term
    return CoefficientEvaluator(inst).coefficient(y, s, t)


def approx_probability(inst: SimInstance, y: Sequence[int], level: int) -> float:
    """Raw truncated estimate ``q'(y)``; not clamped to [0, 1]."""
    return CoefficientEvaluator(inst).probability(y, level)


def approx_distribution(inst: SimInstance, level: int) -> dict[tuple[int, ...], float]:
    return CoefficientEvaluator(inst).distribution(level)


def normalized(dist: dict) -> dict:
    """Opt-in presentation helper: clip negatives and rescale to sum 1."""
    clipped = {k: max(v, 0.0) for k, v in dist.items()}
    total = math.fsum(clipped.values())
    return {k: v / total for k, v in clipped.items()} if total > 0 else clipped


# Pauli-based computation ----------------------------------------------------


def pbc_probability(gens: Sequence[SignedPauli], signs: Sequence[int], state: QubitInput,
                    level: int, n_qubits: int | None = None) -> float:
    """Truncated ``<psi^n| prod_i (I + (-1)^sigma_i P_i)/2 |psi^n>``.

    Expands ``psi^{(x)n}`` in the Pauli basis and keeps patterns of weight
    ``<= level``; patterns that anticommute with some ``P_i`` have zero
    trace against the projector and are skipped.
    """
    if len(signs) != len(gens):
        raise DimensionError("one outcome bit per measured Pauli")
    if n_qubits is None:
        if not gens:
            raise ValidationError("n_qubits is required when no Paulis are given")
        n_qubits = gens[0].n_qubits
    n = n_qubits
    _check_level(level, n)
    signed = [g.with_phase(g.phase + 2 * (int(b) & 1)) for g, b in zip(gens, signs)]
    proj = ProjectorEvaluator(signed, (), n)
    coeffs = state.coefficients
    parts = []
    for s, t in enumerate_terms(n, level):
        w = 1 + 0j
        for a, b in zip(s, t):
            w *= coeffs[a, b] / 2
        if w == 0:
            continue
        x = sum(1 << q for q, a in enumerate(s) if a)
        z = sum(1 << q for q, b in enumerate(t) if b)
        if any((_popcount(g.x_mask & z) + _popcount(g.z_mask & x)) & 1 for g in signed):
            continue
        val = proj.expectation_raw(x, z, 0, 0, check=False) * w
        if abs(val.imag) > TOL.imag_residual:
            raise InternalConsistencyError("PBC term has a non-negligible imaginary part")
        parts.append(val.real)
    return math.fsum(parts)


# instance construction and files ----------------------------------------------


def random_instance(rng: np.random.Generator, n: int, m: int, k: int | None = None,
                    pure: bool | None = None) -> SimInstance:
    """Random Clifford, random inputs (pure, mixed, or a coin per input) and
    a random measured subset of size ``k`` (all qubits by default)."""
    N = n + m
    tab = random_clifford(N, rng)
    inputs = []
    for _ in range(m):
        is_pure = bool(rng.integers(2)) if pure is None else pure
        inputs.append(random_pure_input(rng) if is_pure else random_mixed_input(rng))
    if k is None:
        measured = tuple(range(N))
    else:
        measured = tuple(sorted(rng.choice(N, size=k, replace=False).tolist()))
    return SimInstance(n, tuple(inputs), tab, measured)


def dump_instance(inst: SimInstance) -> str:
    from .clifford import synthesize

    circuit = inst.circuit if inst.circuit is not None else synthesize(inst.tableau)
    lines = [f"n {inst.n}", f"m {inst.m}"]
    lines += [f"input {q}" for q in inst.inputs]
    lines.append("measured " + " ".join(map(str, inst.measured)))
    return "\n".join(lines) + "\n" + circuit.to_text()


def load_instance(text: str) -> SimInstance:
    """Parse an instance file: header lines, then a circuit from ``qubits N``."""
    header: dict = {"inputs": []}
    lines = text.splitlines()
    for i, raw in enumerate(lines):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "qubits":
            circuit = Circuit.from_text("\n".join(lines[i:]))
            break
        if key in ("n", "m"):
            header[key] = int(rest)
        elif key == "input":
            header["inputs"].append(parse_input(rest))
        elif key == "measured":
            header["measured"] = tuple(int(v) for v in rest.replace(",", " ").split())
        else:
            raise ValidationError(f"unknown instance header line {raw!r}")
    else:
        raise ValidationError("instance file has no circuit section")
    missing = {"n", "m", "measured"} - set(header)
    if missing:
        raise ValidationError(f"instance header missing {sorted(missing)}")
    if len(header["inputs"]) != header["m"]:
        raise ValidationError("number of input lines does not match m")
    return SimInstance.from_circuit(header["n"], header["inputs"], circuit, header["measured"])


def probability_records(inst: SimInstance, level: int, outcomes=None) -> list[dict]:
    """JSON-ready records ``{y, l, q_approx, coeff_count, wall_ms}``."""
    ev = CoefficientEvaluator(inst)
    count = coefficient_budget(inst.m, level)
    if outcomes is None:
        k = inst.k
        outcomes = [tuple((v >> (k - 1 - j)) & 1 for j in range(k)) for v in range(2**k)]
    records = []
    for y in outcomes:
        start = time.perf_counter()
        value = ev.probability(y, level)
        records.append({
            "y": "".join(map(str, y)),
            "l": level,
            "q_approx": value,
            "coeff_count": count,
            "wall_ms": (time.perf_counter() - start) * 1e3,
        })
    return records


def records_to_json(records: list[dict]) -> str:
    return json.dumps(records, indent=1)
