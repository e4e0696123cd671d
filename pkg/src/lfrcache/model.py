"""System-model value types: configuration, library, demands, caches, transcripts.

All rationals are :class:`fractions.Fraction`.  Everything here is immutable
and JSON round-trippable (field elements as ints, matrices as nested lists).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, ShapeError
from .field import FieldMatrix, PrimeField, matmul_mod

INTERPOLATE = "interpolate"
TOP = "top"


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or an integer string.  Decimal input is rejected."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational of the form p/q: {text!r}") from None
    if d <= 0:
        raise ValueError(f"denominator must be positive: {text!r}")
    return Fraction(n, d)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Regime:
    """Memory-sharing regime: ``branch`` is ``"interpolate"`` (group size ``g``)
    or ``"top"`` (the K-user corner), with sharing weight ``alpha``."""

    branch: str
    g: int
    alpha: Fraction

    def to_dict(self) -> dict:
        return {"branch": self.branch, "g": self.g, "alpha": format_rational(self.alpha)}

    @classmethod
    def from_dict(cls, d: dict) -> "Regime":
        return cls(d["branch"], int(d["g"]), parse_rational(d["alpha"]))


@dataclass(frozen=True)
class SystemConfig:
    users: int
    symbols: int
    demand_rows: int
    field_order: int
    cache_size: int

    def __post_init__(self) -> None:
        K, F, L, M = self.users, self.symbols, self.demand_rows, self.cache_size
        if K < 1:
            raise ConfigurationError(f"need at least one user, got K={K}")
        if not 1 <= L <= F:
            raise ConfigurationError(f"need 1 <= L <= F, got L={L}, F={F}")
        if not 0 <= M <= F:
            raise ConfigurationError(f"need 0 <= M <= F, got M={M}, F={F}")
        try:
            PrimeField(self.field_order)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None

    @classmethod
    def from_fractions(
        cls, users: int, mu: Fraction, lam: Fraction, field_order: int, symbols: int
    ) -> "SystemConfig":
        m, l = mu * symbols, lam * symbols
        if m.denominator != 1 or l.denominator != 1:
            raise ConfigurationError(
                f"F={symbols} does not make mu*F={m} and lambda*F={l} integral"
            )
        return cls(users, symbols, int(l), field_order, int(m))

    @property
    def K(self) -> int:
        return self.users

    @property
    def F(self) -> int:
        return self.symbols

    @property
    def L(self) -> int:
        return self.demand_rows

    @property
    def M(self) -> int:
        return self.cache_size

    @property
    def q(self) -> int:
        return self.field_order

    @property
    def mu(self) -> Fraction:
        return Fraction(self.cache_size, self.symbols)

    @property
    def lam(self) -> Fraction:
        return Fraction(self.demand_rows, self.symbols)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.field_order)

    def to_dict(self) -> dict:
        return {
            "users": self.users,
            "symbols": self.symbols,
            "demand_rows": self.demand_rows,
            "field_order": self.field_order,
            "cache_size": self.cache_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SystemConfig":
        return cls(
            int(d["users"]),
            int(d["symbols"]),
            int(d["demand_rows"]),
            int(d["field_order"]),
            int(d["cache_size"]),
        )


@dataclass(frozen=True)
class Library:
    """The server's library as one flat column vector of F symbols."""

    w: FieldMatrix

    def __post_init__(self) -> None:
        if self.w.cols != 1:
            raise ShapeError(f"library must be a column vector, got {self.w.shape}")

    @property
    def symbols(self) -> int:
        return self.w.rows

    def to_list(self) -> list[int]:
        return self.w.vector() if self.w.rows else []


@dataclass(frozen=True)
class DemandSet:
    """One L x F demand matrix per user."""

    matrices: tuple[FieldMatrix, ...]

    def __post_init__(self) -> None:
        if not self.matrices:
            raise ShapeError("a demand set needs at least one user")
        shape = self.matrices[0].shape
        fld = self.matrices[0].field
        for d in self.matrices:
            if d.shape != shape:
                raise ShapeError(f"demand shapes differ: {d.shape} vs {shape}")
            if d.field != fld:
                raise ShapeError("demand matrices live in different fields")

    def __len__(self) -> int:
        return len(self.matrices)

    def __getitem__(self, k: int) -> FieldMatrix:
        return self.matrices[k]

    def __iter__(self):
        return iter(self.matrices)

    @property
    def field(self) -> PrimeField:
        return self.matrices[0].field

    def stacked(self) -> FieldMatrix:
        return FieldMatrix(self.field, np.concatenate([d.data for d in self.matrices]))

    def to_list(self) -> list:
        return [d.tolist() for d in self.matrices]

    @classmethod
    def from_list(cls, field_: PrimeField, rows: list, symbols: int) -> "DemandSet":
        mats = []
        for m in rows:
            arr = np.asarray(m, dtype=np.int64).reshape(-1, symbols)
            mats.append(FieldMatrix(field_, arr))
        return cls(tuple(mats))


@dataclass(frozen=True)
class CacheContents:
    """Per-user placement matrices ``P_k`` and cached values ``Z_k = P_k w``.

    ``columns[k]`` lists, in order, the library coordinates user ``k`` stores
    verbatim (uncoded placement), so row ``r`` of ``P_k`` is the standard
    basis vector of ``columns[k][r]``.
    """

    placements: tuple[FieldMatrix, ...]
    values: tuple[FieldMatrix, ...]
    columns: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.placements)

    def usage(self, k: int) -> int:
        return self.placements[k].rows


@dataclass(frozen=True)
class Segment:
    label: str
    start: int
    stop: int

    def __len__(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class Transcript:
    """Broadcast message: coefficient rows ``coeff`` over ``w`` and ``values = coeff @ w``."""

    coeff: FieldMatrix
    values: FieldMatrix
    segments: tuple[Segment, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.values.cols != 1 or self.values.rows != self.coeff.rows:
            raise ShapeError(
                f"values shape {self.values.shape} does not match coeff rows {self.coeff.rows}"
            )
        covered = sorted((s.start, s.stop) for s in self.segments)
        pos = 0
        for start, stop in covered:
            if start != pos or stop < start:
                raise ShapeError(f"segments must tile the transcript, gap at row {pos}")
            pos = stop
        if self.segments and pos != self.coeff.rows:
            raise ShapeError("segments do not cover the whole transcript")

    @property
    def length(self) -> int:
        return self.coeff.rows

    def segment(self, label: str) -> Segment | None:
        for s in self.segments:
            if s.label == label:
                return s
        return None

    def is_consistent(self, library: Library) -> bool:
        p = self.coeff.field.p
        expect = matmul_mod(self.coeff.data, library.w.data, p)
        return bool(np.array_equal(expect, self.values.data))

    @classmethod
    def from_blocks(
        cls, field_: PrimeField, blocks: Sequence[tuple[str, np.ndarray]], library: Library
    ) -> "Transcript":
        """Assemble labelled coefficient blocks and evaluate them on ``library``."""
        F = library.symbols
        segments = []
        parts = []
        pos = 0
        for label, rows in blocks:
            rows = np.asarray(rows, dtype=np.int64).reshape(-1, F)
            segments.append(Segment(label, pos, pos + rows.shape[0]))
            parts.append(rows)
            pos += rows.shape[0]
        coeff = np.concatenate(parts, axis=0) if parts else np.zeros((0, F), dtype=np.int64)
        coeff %= field_.p
        values = matmul_mod(coeff, library.w.data, field_.p)
        return cls(FieldMatrix(field_, coeff), FieldMatrix(field_, values), tuple(segments))

    def to_dict(self) -> dict:
        return {
            "coeff": self.coeff.tolist(),
            "values": [int(x) for x in self.values.data.ravel()],
            "segments": [
                {"label": s.label, "start": s.start, "stop": s.stop} for s in self.segments
            ],
        }

    @classmethod
    def from_dict(cls, field_: PrimeField, d: dict, symbols: int) -> "Transcript":
        coeff = np.asarray(d["coeff"], dtype=np.int64).reshape(-1, symbols)
        values = np.asarray(d["values"], dtype=np.int64).reshape(-1, 1)
        segs = tuple(Segment(s["label"], int(s["start"]), int(s["stop"])) for s in d["segments"])
        return cls(FieldMatrix(field_, coeff), FieldMatrix(field_, values), segs)


def _lcm_denominators(fracs: Iterable[Fraction]) -> int:
    out = 1
    for f in fracs:
        out = math.lcm(out, Fraction(f).denominator)
    return out


def divisibility_fractions(K: int, mu: Fraction, lam: Fraction, regime: Regime) -> list[Fraction]:
    """Fractions of F that must be integral for the regime's subfile layout."""
    g, a = regime.g, regime.alpha
    if regime.branch == INTERPOLATE:
        return [mu, lam, a / g, (1 - a) / (g + 1)]
    return [mu, lam, a / K, 1 - a]


def validate_divisibility(K: int, mu: Fraction, lam: Fraction, regime: Regime) -> int:
    """Least F making every cache, demand and subfile size an integer."""
    for name, v in (("mu", mu), ("lambda", lam)):
        if not 0 <= v <= 1:
            raise DomainError(f"{name}={v} outside [0, 1]")
    return _lcm_denominators(divisibility_fractions(K, mu, lam, regime))


def random_instance(config: SystemConfig, seed: int) -> tuple[Library, DemandSet]:
    """Uniform library and demands from numpy's PCG64 seeded with ``seed``."""
    rng = np.random.default_rng(seed)
    q, F, L, K = config.q, config.F, config.L, config.K
    fld = config.field
    w = rng.integers(0, q, size=(F, 1), dtype=np.int64)
    d = rng.integers(0, q, size=(K, L, F), dtype=np.int64)
    return Library(FieldMatrix(fld, w)), DemandSet(tuple(FieldMatrix(fld, d[k]) for k in range(K)))


def structured_scalar_demands(
    config: SystemConfig, files: int, ys: Sequence[Sequence[int]]
) -> DemandSet:
    """Demands ``[y_1 I_L, ..., y_N I_L]`` of the scalar (file-wise) retrieval special case."""
    L, F = config.L, config.F
    if F % L != 0 or F != files * L:
        raise ShapeError(f"F={F} must equal N*L with N={files}, L={L}")
    if len(ys) != config.K:
        raise ShapeError(f"need {config.K} demand vectors, got {len(ys)}")
    fld = config.field
    eye = np.eye(L, dtype=np.int64)
    mats = []
    for y in ys:
        if len(y) != files:
            raise ShapeError(f"demand vector must have {files} entries, got {len(y)}")
        mats.append(FieldMatrix(fld, np.concatenate([c * eye for c in y], axis=1)))
    return DemandSet(tuple(mats))
