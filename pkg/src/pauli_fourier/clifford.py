"""Clifford tableaus, gate lists, synthesis and uniform sampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, ValidationError
from .f2 import f2_nullspace
from .pauli import SignedPauli, _popcount, mul_raw

ONE_QUBIT_GATES = ("H", "S", "X", "Y", "Z")
TWO_QUBIT_GATES = ("CNOT", "CZ", "SWAP")


class Gate(NamedTuple):
    name: str
    qubits: tuple[int, ...]

    def __str__(self) -> str:
        return " ".join([self.name, *map(str, self.qubits)])


def gate(name: str, *qubits: int) -> Gate:
    return Gate(name, tuple(qubits))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on ``n_qubits`` qubits; the first gate acts first."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(Gate(g[0], tuple(g[1])) for g in self.gates))
        for g in self.gates:
            _validate_gate(g, self.n_qubits)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        if other.n_qubits != self.n_qubits:
            raise DimensionError("cannot concatenate circuits of different widths")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def to_text(self) -> str:
        lines = [f"qubits {self.n_qubits}"]
        lines.extend(str(g) for g in self.gates)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        """Parse the line format: ``qubits N`` header, one gate per line."""
        n_qubits = None
        gates = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            head = parts[0]
            if head.lower() == "qubits":
                if n_qubits is not None or len(parts) != 2:
                    raise ValidationError(f"line {lineno}: bad qubits header")
                n_qubits = int(parts[1])
                continue
            if n_qubits is None:
                raise ValidationError(f"line {lineno}: gate before 'qubits' header")
            name = head.upper()
            try:
                qubits = tuple(int(p) for p in parts[1:])
            except ValueError:
                raise ValidationError(f"line {lineno}: non-integer qubit index") from None
            gates.append(Gate(name, qubits))
        if n_qubits is None:
            raise ValidationError("missing 'qubits N' header")
        return cls(n_qubits, tuple(gates))


def _validate_gate(g: Gate, n_qubits: int) -> None:
    if g.name in ONE_QUBIT_GATES:
        arity = 1
    elif g.name in TWO_QUBIT_GATES:
        arity = 2
    else:
        raise ValidationError(f"unsupported gate {g.name!r}")
    if len(g.qubits) != arity:
        raise ValidationError(f"{g.name} takes {arity} qubit(s), got {len(g.qubits)}")
    for q in g.qubits:
        if not 0 <= q < n_qubits:
            raise ValidationError(f"qubit index {q} out of range for {n_qubits} qubits")
    if arity == 2 and g.qubits[0] == g.qubits[1]:
        raise ValidationError(f"{g.name} needs two distinct qubits")


def conjugate_raw_by_gate(name: str, qubits: Sequence[int], x: int, z: int, ph: int):
    """Return ``G P G^dagger`` for raw ``P = i^ph X^x Z^z``."""
    a = qubits[0]
    ba = 1 << a
    xa = (x >> a) & 1
    za = (z >> a) & 1
    if name == "H":
        # H X^x Z^z H = Z^x X^z = (-1)^{xz} X^z Z^x
        if xa != za:
            x ^= ba
            z ^= ba
        return x, z, (ph + 2 * (xa & za)) & 3
    if name == "S":
        # S X S^dag = i X Z
        if xa:
            z ^= ba
        return x, z, (ph + xa) & 3
    if name == "X":
        return x, z, (ph + 2 * za) & 3
    if name == "Z":
        return x, z, (ph + 2 * xa) & 3
    if name == "Y":
        return x, z, (ph + 2 * (xa ^ za)) & 3
    b = qubits[1]
    bb = 1 << b
    xb = (x >> b) & 1
    zb = (z >> b) & 1
    if name == "CNOT":
        # X_c -> X_c X_t, Z_t -> Z_c Z_t
        if xa:
            x ^= bb
        if zb:
            z ^= ba
        return x, z, ph
    if name == "CZ":
        # X_a -> X_a Z_b, X_b -> Z_a X_b; reordering costs (-1)^{xa xb}
        if xa:
            z ^= bb
        if xb:
            z ^= ba
        return x, z, (ph + 2 * (xa & xb)) & 3
    if name == "SWAP":
        if xa != xb:
            x ^= ba | bb
        if za != zb:
            z ^= ba | bb
        return x, z, ph
    raise ValidationError(f"unsupported gate {name!r}")


def hermitian_phase(x: int, z: int, negative: bool = False) -> int:
    """Phase making ``i^ph X^x Z^z`` Hermitian, with the requested sign."""
    return (_popcount(x & z) + (2 if negative else 0)) & 3


@dataclass(frozen=True)
class CliffordTableau:
    """Images ``U X_i U^dagger`` and ``U Z_i U^dagger`` of a Clifford ``U``."""

    n_qubits: int
    x_images: tuple[SignedPauli, ...]
    z_images: tuple[SignedPauli, ...]

    def __post_init__(self):
        n = self.n_qubits
        object.__setattr__(self, "x_images", tuple(self.x_images))
        object.__setattr__(self, "z_images", tuple(self.z_images))
        if len(self.x_images) != n or len(self.z_images) != n:
            raise DimensionError("tableau needs one X and one Z image per qubit")
        for p in self.x_images + self.z_images:
            if p.n_qubits != n:
                raise DimensionError("image acts on the wrong number of qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> CliffordTableau:
        return cls(
            n_qubits,
            tuple(SignedPauli.single(n_qubits, q, "X") for q in range(n_qubits)),
            tuple(SignedPauli.single(n_qubits, q, "Z") for q in range(n_qubits)),
        )

    def validate(self) -> None:
        """Raise :class:`ValidationError` unless the images form a Clifford."""
        imgs = self.x_images + self.z_images
        n = self.n_qubits
        for p in imgs:
            if not p.is_hermitian:
                raise ValidationError(f"image {p} is not Hermitian")
            if p.is_identity_up_to_phase:
                raise ValidationError("image is proportional to the identity")
        for i, p in enumerate(imgs):
            for j in range(i + 1, len(imgs)):
                q = imgs[j]
                anti = (_popcount(p.x_mask & q.z_mask) + _popcount(p.z_mask & q.x_mask)) & 1
                paired = j == i + n and i < n
                if anti != paired:
                    raise ValidationError("images violate the symplectic relations")

    @property
    def is_valid(self) -> bool:
        try:
            self.validate()
        except ValidationError:
            return False
        return True

    def conjugate_raw(self, x: int, z: int, ph: int):
        return _conjugate_raw(self, x, z, ph)

    def conjugate(self, p: SignedPauli) -> SignedPauli:
        return conjugate(self, p)

    def then(self, other: CliffordTableau) -> CliffordTableau:
        """Tableau of ``other @ self`` (``self`` acts first)."""
        if other.n_qubits != self.n_qubits:
            raise DimensionError("qubit count mismatch")
        return CliffordTableau(
            self.n_qubits,
            tuple(other.conjugate(p) for p in self.x_images),
            tuple(other.conjugate(p) for p in self.z_images),
        )

    def apply_gate(self, g: Gate) -> CliffordTableau:
        """Tableau after appending gate ``g`` to the circuit."""
        _validate_gate(g, self.n_qubits)
        n = self.n_qubits

        def push(p: SignedPauli) -> SignedPauli:
            x, z, ph = conjugate_raw_by_gate(g.name, g.qubits, p.x_mask, p.z_mask, p.phase)
            return SignedPauli(n, x, z, ph)

        return CliffordTableau(
            n, tuple(map(push, self.x_images)), tuple(map(push, self.z_images))
        )

    def canonical_key(self) -> tuple:
        return tuple((p.x_mask, p.z_mask, p.phase) for p in self.x_images + self.z_images)


def _conjugate_raw(u: CliffordTableau, x: int, z: int, ph: int):
    rx = rz = 0
    rph = ph
    q = 0
    while x:
        if x & 1:
            p = u.x_images[q]
            rx, rz, rph = mul_raw(rx, rz, rph, p.x_mask, p.z_mask, p.phase)
        x >>= 1
        q += 1
    q = 0
    while z:
        if z & 1:
            p = u.z_images[q]
            rx, rz, rph = mul_raw(rx, rz, rph, p.x_mask, p.z_mask, p.phase)
        z >>= 1
        q += 1
    return rx, rz, rph


def conjugate(u: CliffordTableau, p: SignedPauli) -> SignedPauli:
    """``U p U^dagger`` with exact phase."""
    if u.n_qubits != p.n_qubits:
        raise DimensionError(f"tableau on {u.n_qubits} qubits, Pauli on {p.n_qubits}")
    x, z, ph = _conjugate_raw(u, p.x_mask, p.z_mask, p.phase)
    return SignedPauli(p.n_qubits, x, z, ph)


def from_gates(circuit: Circuit | Iterable[Gate], n_qubits: int | None = None) -> CliffordTableau:
    """Tableau of a gate list applied in order (first gate first)."""
    if isinstance(circuit, Circuit):
        n_qubits = circuit.n_qubits
        gates = circuit.gates
    else:
        if n_qubits is None:
            raise ValidationError("n_qubits is required for a bare gate list")
        gates = Circuit(n_qubits, tuple(circuit)).gates
    n = n_qubits
    imgs = [(1 << q, 0, 0) for q in range(n)] + [(0, 1 << q, 0) for q in range(n)]
    for g in gates:
        imgs = [conjugate_raw_by_gate(g.name, g.qubits, *img) for img in imgs]
    paulis = [SignedPauli(n, *img) for img in imgs]
    return CliffordTableau(n, tuple(paulis[:n]), tuple(paulis[n:]))


# -- synthesis -------------------------------------------------------------


class _Reducer:
    """Mutable working copy used by :func:`synthesize`."""

    def __init__(self, u: CliffordTableau):
        self.n = u.n_qubits
        self.imgs = [[p.x_mask, p.z_mask, p.phase] for p in u.x_images + u.z_images]
        self.log: list[Gate] = []

    def apply(self, name: str, *qubits: int) -> None:
        for img in self.imgs:
            img[:] = conjugate_raw_by_gate(name, qubits, *img)
        self.log.append(Gate(name, qubits))

    def bits(self, row: int, q: int) -> tuple[int, int]:
        x, z, _ = self.imgs[row]
        return (x >> q) & 1, (z >> q) & 1


def synthesize(u: CliffordTableau) -> Circuit:
    """Gate list whose tableau is exactly ``u`` (signs included).

    Column-by-column elimination: for each qubit ``i`` the X image is mapped
    to ``X_i`` and then the Z image to ``Z_i`` using gates that leave the
    already cleared qubits alone.  O(n) gates per qubit, O(n^2) in total.
    """
    u.validate()
    n = u.n_qubits
    r = _Reducer(u)
    for i in range(n):
        xi, zi = i, n + i
        # X image -> X-type on qubits >= i
        for j in range(i, n):
            xb, zb = r.bits(xi, j)
            if zb and not xb:
                r.apply("H", j)
            elif zb and xb:
                r.apply("S", j)
        if not r.bits(xi, i)[0]:
            j = next(j for j in range(i + 1, n) if r.bits(xi, j)[0])
            r.apply("SWAP", i, j)
        for j in range(i + 1, n):
            if r.bits(xi, j)[0]:
                r.apply("CNOT", i, j)
        # Z image: anticommutes with X_i, so it carries Z or Y on qubit i
        if r.bits(zi, i)[0]:
            # H S H fixes X and sends Y to Z
            r.apply("H", i)
            r.apply("S", i)
            r.apply("H", i)
        for j in range(i + 1, n):
            xb, zb = r.bits(zi, j)
            if xb and not zb:
                r.apply("H", j)
            elif xb and zb:
                r.apply("S", j)
                r.apply("H", j)
        for j in range(i + 1, n):
            if r.bits(zi, j)[1]:
                r.apply("CNOT", j, i)
    # residual signs are fixed by a Pauli applied first
    prefix = []
    for q in range(n):
        flip_x = r.imgs[q][2] == 2
        flip_z = r.imgs[n + q][2] == 2
        if flip_x and flip_z:
            prefix.append(Gate("Y", (q,)))
        elif flip_x:
            prefix.append(Gate("Z", (q,)))
        elif flip_z:
            prefix.append(Gate("X", (q,)))
    inverse = []
    for g in reversed(r.log):
        if g.name == "S":
            inverse.extend([g, g, g])
        else:
            inverse.append(g)
    return Circuit(n, tuple(prefix + inverse))


# -- sampling ---------------------------------------------------------------


def _symplectic_dual(v: int, n: int) -> int:
    """Row ``w`` with ``popcount(w & u)`` = symplectic product of ``v`` and ``u``."""
    mask = (1 << n) - 1
    return (v >> n) | ((v & mask) << n)


def _symplectic_product(v: int, w: int, n: int) -> int:
    return _popcount(_symplectic_dual(v, n) & w) & 1


def _random_combination(basis: list[int], rng: np.random.Generator) -> int:
    coeffs = rng.integers(0, 2, size=len(basis))
    out = 0
    for c, b in zip(coeffs, basis):
        if c:
            out ^= b
    return out


def random_clifford(n: int, rng: np.random.Generator | int | None = None) -> CliffordTableau:
    """Uniformly random element of the n-qubit Clifford group (mod phase).

    Builds a random symplectic basis pair by pair: each new X image is a
    uniform nonzero vector of the symplectic complement of the pairs chosen
    so far, and its partner Z image is uniform among complement vectors that
    anticommute with it.  The number of choices at each step does not depend
    on earlier choices, so the resulting symplectic matrix is uniform; the
    2n image signs are independent fair coins.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    rng = np.random.default_rng(rng)
    chosen: list[int] = []
    x_vecs, z_vecs = [], []
    for _ in range(n):
        basis = f2_nullspace([_symplectic_dual(c, n) for c in chosen], 2 * n)
        while True:
            v = _random_combination(basis, rng)
            if v:
                break
        while True:
            w = _random_combination(basis, rng)
            if _symplectic_product(v, w, n):
                break
        chosen.extend([v, w])
        x_vecs.append(v)
        z_vecs.append(w)
    signs = rng.integers(0, 2, size=2 * n)
    mask = (1 << n) - 1

    def to_pauli(v: int, negative) -> SignedPauli:
        x, z = v & mask, v >> n
        return SignedPauli(n, x, z, hermitian_phase(x, z, bool(negative)))

    return CliffordTableau(
        n,
        tuple(to_pauli(v, s) for v, s in zip(x_vecs, signs[:n])),
        tuple(to_pauli(v, s) for v, s in zip(z_vecs, signs[n:])),
    )
