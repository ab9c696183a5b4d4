"""Linear algebra over GF(2) with rows packed into Python ints.

Bit ``j`` of a packed row is column ``j``.  Python ints serve as arbitrary
width bitsets, so a row XOR is a single operation regardless of width.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ValidationError
from .pauli import bits_to_int, int_to_bits


@dataclass(frozen=True)
class F2Matrix:
    n_rows: int
    n_cols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise ValidationError("matrix shape must be non-negative")
        if len(self.rows) != self.n_rows:
            raise ValidationError("row count does not match n_rows")
        limit = 1 << self.n_cols
        for r in self.rows:
            if not 0 <= r < limit:
                raise ValidationError("row wider than n_cols")

    @classmethod
    def from_array(cls, a) -> F2Matrix:
        arr = np.asarray(a, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-d array")
        rows = tuple(bits_to_int(int(v) & 1 for v in row) for row in arr)
        return cls(arr.shape[0], arr.shape[1], rows)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> F2Matrix:
        return cls(n_rows, n_cols, (0,) * n_rows)

    @classmethod
    def identity(cls, n: int) -> F2Matrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i] = int_to_bits(r, self.n_cols)
        return out

    def columns(self) -> list[int]:
        """Columns packed as ints (bit ``i`` = row ``i``)."""
        cols = [0] * self.n_cols
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    cols[j] |= 1 << i
                r >>= 1
                j += 1
        return cols

    def transpose(self) -> F2Matrix:
        return F2Matrix(self.n_cols, self.n_rows, tuple(self.columns()))

    def submatrix(self, keep: Sequence[int]) -> F2Matrix:
        """Principal submatrix on the index set ``keep`` (square matrices)."""
        keep = list(keep)
        rows = []
        for i in keep:
            r = self.rows[i]
            rows.append(bits_to_int((r >> j) & 1 for j in keep))
        return F2Matrix(len(keep), len(keep), tuple(rows))

    def matvec(self, x: int) -> int:
        """``A @ x`` with ``x`` packed over columns; result packed over rows."""
        out = 0
        for i, r in enumerate(self.rows):
            if bin(r & x).count("1") & 1:
                out |= 1 << i
        return out

    @property
    def is_symmetric(self) -> bool:
        return self.n_rows == self.n_cols and self.rows == tuple(self.columns())


def span_decompose(vectors: Sequence[int], target: int):
    """Express ``target`` as an XOR of ``vectors``.

    Returns ``(combo, kernel)`` where ``combo`` is a bitmask over the indices
    of ``vectors`` whose XOR is ``target`` and ``kernel`` is a basis (as index
    bitmasks) of the combinations that XOR to zero.  Returns ``None`` when
    ``target`` is outside the span.
    """
    reducer = SpanReducer(vectors)
    combo = reducer.reduce(target)
    if combo is None:
        return None
    return combo, list(reducer.kernel)


class SpanReducer:
    """Echelon form of a vector list that remembers how each pivot was built.

    After construction, :meth:`reduce` answers membership queries in
    O(rank) XORs, which is what repeated coefficient evaluation needs.
    """

    def __init__(self, vectors: Iterable[int]):
        self.pivots: dict[int, tuple[int, int]] = {}
        self.kernel: list[int] = []
        self.size = 0
        for i, v in enumerate(vectors):
            combo = 1 << i
            self.size = i + 1
            while v:
                top = v.bit_length() - 1
                hit = self.pivots.get(top)
                if hit is None:
                    self.pivots[top] = (v, combo)
                    break
                v ^= hit[0]
                combo ^= hit[1]
            else:
                self.kernel.append(combo)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, target: int) -> int | None:
        combo = 0
        pivots = self.pivots
        while target:
            hit = pivots.get(target.bit_length() - 1)
            if hit is None:
                return None
            target ^= hit[0]
            combo ^= hit[1]
        return combo


def _as_matrix(a) -> F2Matrix:
    return a if isinstance(a, F2Matrix) else F2Matrix.from_array(a)


def f2_solve(a, b):
    """Solve ``a @ x = b`` over GF(2).

    Returns ``(particular, kernel_basis)`` as uint8 arrays of length
    ``a.n_cols``, or ``None`` if the system is inconsistent.
    """
    a = _as_matrix(a)
    b_bits = np.asarray(b, dtype=np.int64).ravel()
    if b_bits.size != a.n_rows:
        raise DimensionError(f"b has length {b_bits.size}, expected {a.n_rows}")
    hit = span_decompose(a.columns(), bits_to_int(int(v) for v in b_bits))
    if hit is None:
        return None
    combo, kernel = hit
    to_arr = lambda v: np.array(int_to_bits(v, a.n_cols), dtype=np.uint8)
    return to_arr(combo), [to_arr(k) for k in kernel]


def f2_rank(a) -> int:
    a = _as_matrix(a)
    return SpanReducer(a.rows).rank


def f2_nullspace(rows: Sequence[int], n_cols: int) -> list[int]:
    """Basis of ``{u : popcount(r & u) even for all r}`` as packed ints."""
    mat = F2Matrix(len(rows), n_cols, tuple(rows))
    return list(SpanReducer(mat.columns()).kernel) if n_cols else []
