"""Exact arithmetic over prime fields GF(p) and dense matrices over them.

Matrices are stored as read-only ``int64`` numpy arrays with every entry
reduced into ``[0, p-1]``.  The modulus is capped at ``2**31 - 1`` so a
single product of two reduced entries stays below ``2**62``; matrix products
accumulate in chunks small enough that partial sums never overflow ``int64``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import FieldMismatchError, ShapeError, SingularMatrixError

MAX_MODULUS = 2**31 - 1
_ACC_LIMIT = 2**62


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field of integers modulo a prime ``modulus``."""

    modulus: int

    def __post_init__(self) -> None:
        p = self.modulus
        if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
            raise ValueError(f"field modulus must be an integer, got {p!r}")
        if p > MAX_MODULUS:
            raise ValueError(f"modulus {p} exceeds the supported cap {MAX_MODULUS}")
        if not _is_prime(int(p)):
            raise ValueError(f"field modulus must be prime, got {p}")
        object.__setattr__(self, "modulus", int(p))

    @property
    def p(self) -> int:
        return self.modulus

    def inv(self, a: int) -> int:
        a %= self.modulus
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, -1, self.modulus)

    def matrix(self, rows: Sequence[Sequence[int]] | np.ndarray) -> "FieldMatrix":
        return FieldMatrix.from_rows(self, rows)

    def column(self, values: Iterable[int]) -> "FieldMatrix":
        arr = np.asarray(list(values), dtype=np.int64).reshape(-1, 1)
        return FieldMatrix(self, arr)

    def zeros(self, rows: int, cols: int) -> "FieldMatrix":
        return FieldMatrix(self, np.zeros((rows, cols), dtype=np.int64))

    def identity(self, n: int) -> "FieldMatrix":
        return FieldMatrix(self, np.eye(n, dtype=np.int64))

    def __str__(self) -> str:
        return f"GF({self.modulus})"


class FieldMatrix:
    """Immutable dense matrix over a :class:`PrimeField`.

    ``data`` is a read-only 2-D ``int64`` array; entries are reduced on
    construction.
    """

    __slots__ = ("field", "data")

    def __init__(self, field: PrimeField, data: np.ndarray) -> None:
        arr = np.array(data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ShapeError(f"FieldMatrix needs a 2-D array, got ndim={arr.ndim}")
        arr %= field.modulus
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("FieldMatrix is immutable")

    @classmethod
    def from_rows(cls, field: PrimeField, rows) -> "FieldMatrix":
        arr = np.asarray(rows, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
        return cls(field, arr)

    @classmethod
    def _wrap(cls, field: PrimeField, arr: np.ndarray) -> "FieldMatrix":
        # arr must already be reduced int64; skips the copy.
        obj = object.__new__(cls)
        arr.setflags(write=False)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "data", arr)
        return obj

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.data.ravel())

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def vector(self) -> list[int]:
        """Entries of a single-column (or single-row) matrix as a flat list."""
        if self.cols != 1 and self.rows != 1:
            raise ShapeError(f"not a vector: shape {self.shape}")
        return [int(x) for x in self.data.ravel()]

    def __getitem__(self, key) -> "FieldMatrix":
        sub = self.data[key]
        if sub.ndim != 2:
            raise ShapeError("indexing must keep both axes; use slices")
        return FieldMatrix._wrap(self.field, np.ascontiguousarray(sub))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self.data.tobytes()))

    def _check(self, other: "FieldMatrix") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return FieldMatrix._wrap(self.field, (self.data + other.data) % self.field.p)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {other.shape} from {self.shape}")
        return FieldMatrix._wrap(self.field, (self.data - other.data) % self.field.p)

    def __neg__(self) -> "FieldMatrix":
        return FieldMatrix._wrap(self.field, (-self.data) % self.field.p)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        return mat_mul(self, other)

    def scale(self, c: int) -> "FieldMatrix":
        return FieldMatrix._wrap(self.field, (self.data * (c % self.field.p)) % self.field.p)

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix._wrap(self.field, np.ascontiguousarray(self.data.T))

    def is_zero(self) -> bool:
        return not self.data.any()

    def __repr__(self) -> str:
        return f"FieldMatrix({self.field}, {self.tolist()})"


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact ``a @ b mod p`` on reduced int64 arrays without overflow."""
    n = a.shape[1]
    if b.shape[0] != n:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    step = max(1, _ACC_LIMIT // max(1, (p - 1) ** 2))
    if n <= step:
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for s in range(0, n, step):
        out = (out + a[:, s : s + step] @ b[s : s + step]) % p
    return out


def mat_mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return FieldMatrix._wrap(a.field, matmul_mod(a.data, b.data, a.field.p))


def rref_inplace(m: np.ndarray, p: int, ncols: int | None = None) -> list[int]:
    """Gauss-Jordan reduce ``m`` in place over GF(p); returns pivot columns.

    Pivots are searched left to right among the first ``ncols`` columns; the
    pivot row is the lowest-indexed row with a nonzero entry.  Row operations
    act on the full width so augmented columns follow along.
    """
    nrows = m.shape[0]
    if ncols is None:
        ncols = m.shape[1]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        lead = int(m[r, c])
        if lead != 1:
            m[r] = (m[r] * pow(lead, -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            m[others] = (m[others] - np.outer(col[others], m[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def echelon_inplace(m: np.ndarray, p: int) -> list[int]:
    """Forward elimination only (row-echelon form, unnormalized); returns pivot columns."""
    nrows, ncols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = m[r:, c].nonzero()[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        below = nz[1:] + r
        if below.size:
            f = (m[below, c] * pow(int(m[r, c]), -1, p)) % p
            m[below, c:] = (m[below, c:] - np.outer(f, m[r, c:])) % p
        pivots.append(c)
        r += 1
    return pivots


def rank_mod(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(echelon_inplace(a.copy(), p))


def rank(a: FieldMatrix) -> int:
    return rank_mod(a.data, a.field.p)


def rref_with_transform(a: FieldMatrix) -> tuple[FieldMatrix, FieldMatrix, int]:
    """Return ``(r, t, rank)`` with ``t @ a == r``, ``r`` in RREF, ``t`` invertible."""
    p = a.field.p
    m, n = a.shape
    aug = np.concatenate([a.data, np.eye(m, dtype=np.int64)], axis=1)
    pivots = rref_inplace(aug, p, ncols=n)
    r = FieldMatrix._wrap(a.field, np.ascontiguousarray(aug[:, :n]))
    t = FieldMatrix._wrap(a.field, np.ascontiguousarray(aug[:, n:]))
    return r, t, len(pivots)


def invert(a: FieldMatrix) -> FieldMatrix:
    if a.rows != a.cols:
        raise ShapeError(f"only square matrices are invertible, got {a.shape}")
    r, t, rk = rref_with_transform(a)
    if rk != a.rows:
        raise SingularMatrixError(f"matrix of size {a.rows} has rank {rk}")
    return t


def rowspace_contains(big: FieldMatrix, probe: FieldMatrix) -> bool:
    """True iff every row of ``probe`` is a combination of the rows of ``big``."""
    if big.field != probe.field:
        raise FieldMismatchError(f"{big.field} vs {probe.field}")
    if big.cols != probe.cols:
        raise ShapeError(f"column counts differ: {big.cols} vs {probe.cols}")
    if probe.rows == 0 or probe.is_zero():
        return True
    p = big.field.p
    basis = big.data.copy()
    pivots = echelon_inplace(basis, p)
    rest = probe.data.copy()
    # reducing probe against big's echelon basis leaves zeros iff the rank is unchanged
    for i, c in enumerate(pivots):
        col = rest[:, c]
        hit = col.nonzero()[0]
        if hit.size:
            f = (col[hit] * pow(int(basis[i, c]), -1, p)) % p
            rest[hit, c:] = (rest[hit, c:] - np.outer(f, basis[i, c:])) % p
    return not rest.any()


def vstack(blocks: Sequence[FieldMatrix], cols: int | None = None) -> FieldMatrix:
    if not blocks:
        raise ShapeError("vstack needs at least one block")
    field = blocks[0].field
    for b in blocks:
        if b.field != field:
            raise FieldMismatchError(f"{b.field} vs {field}")
    widths = {b.cols for b in blocks if b.rows}
    if len(widths) > 1:
        raise ShapeError(f"column counts differ: {sorted(widths)}")
    width = widths.pop() if widths else (cols if cols is not None else blocks[0].cols)
    parts = [b.data if b.rows else np.zeros((0, width), dtype=np.int64) for b in blocks]
    return FieldMatrix._wrap(field, np.concatenate(parts, axis=0))


def hstack(blocks: Sequence[FieldMatrix]) -> FieldMatrix:
    if not blocks:
        raise ShapeError("hstack needs at least one block")
    field = blocks[0].field
    for b in blocks:
        if b.field != field:
            raise FieldMismatchError(f"{b.field} vs {field}")
    heights = {b.rows for b in blocks}
    if len(heights) > 1:
        raise ShapeError(f"row counts differ: {sorted(heights)}")
    return FieldMatrix._wrap(field, np.concatenate([b.data for b in blocks], axis=1))
