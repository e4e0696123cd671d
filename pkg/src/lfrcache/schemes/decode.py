"""User-side decoders.

A decoder sees only what a real user has: its own cache, the broadcast
values, the segment labels and the (public) demand matrices.  Library
symbols are read exclusively through :class:`CacheView`, which refuses
coordinates the user did not store.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DecodeFailureError
from ..field import FieldMatrix, matmul_mod
from ..model import CacheContents, DemandSet, Transcript
from .delivery import (
    CORNER_SEG,
    FULL_SEG,
    PART1,
    RHO2_STEP2,
    RHO3_SEG,
    VIRTUAL,
    corner_stacks,
    rho1_virtual_stacks,
    rho2_step1_label,
    rho2_step2_stacks,
    rho3_stacks,
    unicast_label,
)
from .plan import (
    BASELINE_FULL,
    BASELINE_UNICAST,
    CORNER,
    RHO1,
    RHO2,
    RHO3,
    SchemePlan,
    ceil_div,
    layout_for,
    mod1,
)
from .transforms import build_transforms


class CacheView:
    """Read access to one user's cached symbols by library coordinate."""

    def __init__(self, cache: CacheContents, k: int) -> None:
        self.columns = cache.columns[k - 1]
        self.values = cache.values[k - 1].data[:, 0] if self.columns else np.zeros(0, np.int64)
        self._index = {c: i for i, c in enumerate(self.columns)}

    def get(self, cols: range | Sequence[int]) -> np.ndarray:
        try:
            idx = [self._index[c] for c in cols]
        except KeyError as exc:
            raise DecodeFailureError(f"symbol {exc.args[0]} is not cached") from None
        return self.values[idx]


def _segment(transcript: Transcript, label: str, expected: int) -> np.ndarray:
    seg = transcript.segment(label)
    if seg is None:
        raise DecodeFailureError(f"transcript has no segment {label!r}")
    if len(seg) != expected:
        raise DecodeFailureError(f"segment {label!r} has {len(seg)} rows, expected {expected}")
    return transcript.values.data[seg.start : seg.stop, 0]


def _peel(
    x: np.ndarray,
    own: int,
    subfiles: Sequence[range],
    stacks: Sequence[np.ndarray] | None,
    view: CacheView,
    p: int,
) -> np.ndarray:
    """Subtract every summand but ``subfiles[own]``'s from a multicast."""
    acc = x.copy()
    for j, sub in enumerate(subfiles):
        if j == own:
            continue
        vals = view.get(sub)
        acc -= vals if stacks is None else matmul_mod(stacks[j], vals.reshape(-1, 1), p)[:, 0]
    return acc % p


def _mv(m: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    return matmul_mod(m, v.reshape(-1, 1), p)[:, 0]


def _own_share(rec, coded: bool, slot: int, rows: int, block: np.ndarray, p: int) -> np.ndarray:
    """This user's rows of a virtual-user product (coded) or its block times the raw subfile."""
    if coded:
        return rec[slot * rows : (slot + 1) * rows]
    return _mv(block, rec, p)


def decode(
    k: int,
    plan: SchemePlan,
    cache: CacheContents,
    transcript: Transcript,
    demands: DemandSet,
) -> FieldMatrix:
    """Reconstruct ``D_k w`` for user ``k`` (1-based) from its cache and the broadcast."""
    K = len(demands)
    if not 1 <= k <= K:
        raise DecodeFailureError(f"user {k} outside [1, {K}]")
    fld = demands.field
    p = fld.p
    D = demands[k - 1].data
    L, F = D.shape
    if transcript.coeff.cols != F:
        raise DecodeFailureError("transcript width does not match the demand matrices")
    view = CacheView(cache, k)
    cached_cols = list(view.columns)
    cached = _mv(D[:, cached_cols], view.values, p) if cached_cols else np.zeros(L, np.int64)
    layout = plan.layout if plan.layout is not None and plan.layout.symbols == F else layout_for(plan, F)
    v = plan.variant

    if v == BASELINE_UNICAST:
        missing = _segment(transcript, unicast_label(k), L)
    elif v == BASELINE_FULL:
        M = len(cached_cols)
        rest = _segment(transcript, FULL_SEG, F - M)
        view.get(range(M))
        missing = _mv(D[:, M:], rest, p)
    elif v == CORNER:
        g = plan.g
        _, stacks, n = corner_stacks(K, g, demands, F)
        i = mod1(k, g) - 1
        x = _segment(transcript, CORNER_SEG, n)
        rec = _peel(x, i, layout.part1, stacks, view, p)
        sub = layout.part1[i]
        missing = _own_share(rec, stacks is not None, (k - 1) // g, L, D[:, sub.start : sub.stop], p)
    elif v == RHO1:
        g = layout.g
        i1 = mod1(k, g) - 1
        x1 = _segment(transcript, PART1, len(layout.part1[0]))
        w1 = _peel(x1, i1, layout.part1, None, view, p)
        sub1 = layout.part1[i1]
        missing = _mv(D[:, sub1.start : sub1.stop], w1, p)
        if layout.part2:
            plan_b = SchemePlan(plan.variant, plan.users, plan.regime, layout)
            stacks, n = rho1_virtual_stacks(plan_b, demands)
            i2 = mod1(k, g + 1) - 1
            x2 = _segment(transcript, VIRTUAL, n)
            rec = _peel(x2, i2, layout.part2, stacks, view, p)
            sub2 = layout.part2[i2]
            missing = missing + _own_share(
                rec, stacks is not None, (k - 1) // (g + 1), L, D[:, sub2.start : sub2.stop], p
            )
        else:
            _segment(transcript, VIRTUAL, 0)
    elif v == RHO2:
        missing = _decode_rho2(k, SchemePlan(v, plan.users, plan.regime, layout), transcript, demands, view, p)
    elif v == RHO3:
        stacks, n = rho3_stacks(K, layout, demands)
        x = _segment(transcript, RHO3_SEG, n)
        rec = _peel(x, k - 1, layout.part1, stacks, view, p)
        sub = layout.part1[k - 1]
        missing = _own_share(rec, stacks is not None, 0, L, D[:, sub.start : sub.stop], p)
    else:
        raise DecodeFailureError(f"unknown variant {v!r}")
    return FieldMatrix(fld, ((cached + missing) % p).reshape(-1, 1))


def _decode_rho2(
    k: int, plan: SchemePlan, transcript: Transcript, demands: DemandSet, view: CacheView, p: int
) -> np.ndarray:
    layout = plan.layout
    K, g = plan.users, layout.g
    transforms = build_transforms(plan, demands)
    mine = transforms[k - 1]
    top, bottom = mine.top, mine.bottom

    # step 1: peers' first blocks are computable from cache
    i = ceil_div(k, g)
    acc = _segment(transcript, rho2_step1_label(i), top).copy()
    for j in range(1, g + 1):
        k1 = (i - 1) * g + j
        if k1 > K:
            break
        if k1 == k:
            continue
        t = transforms[k1 - 1]
        known = np.concatenate([view.get(t.a_cols), view.get(t.c_cols)])
        acc -= _mv(t.step1_rows(), known, p)
    own1 = acc % p

    # step 2: virtual users over the part-2 subfiles
    if layout.part2:
        stacks, n = rho2_step2_stacks(plan, transforms)
        i2 = mod1(k, g + 1) - 1
        x2 = _segment(transcript, RHO2_STEP2, n)
        rec = _peel(x2, i2, layout.part2, stacks, view, p)
        own2 = _own_share(rec, stacks is not None, (k - 1) // (g + 1), bottom, mine.step2_rows(), p)
    else:
        _segment(transcript, RHO2_STEP2, 0)
        own2 = np.zeros(bottom, np.int64)

    b_prime = np.concatenate([own1, own2])
    b = _mv(mine.T_inv.data, b_prime, p)
    return b
