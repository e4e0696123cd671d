"""Uncoded placement and the server-side encoders of every scheme.

Every delivery is linear in ``w``: each function builds the coefficient rows
of the broadcast and evaluates them once, so a transcript always satisfies
``values == coeff @ w``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ConfigurationError
from ..field import FieldMatrix
from ..model import CacheContents, DemandSet, Library, SystemConfig, Transcript
from .plan import (
    BASELINE_FULL,
    BASELINE_UNICAST,
    CORNER,
    RHO1,
    RHO2,
    RHO3,
    SchemePlan,
    bind,
    ceil_div,
    interpolate_layout,
    make_plan,
    mod1,
)
from .transforms import build_transforms

PART1 = "part1-multicast"
VIRTUAL = "virtual-step"
CORNER_SEG = "corner-multicast"
RHO2_STEP2 = "rho2-step2"
RHO3_SEG = "rho3-multicast"
FULL_SEG = "full-library"


def rho2_step1_label(i: int) -> str:
    return f"rho2-step1:{i}"


def unicast_label(k: int) -> str:
    return f"unicast:{k}"


def place(plan: SchemePlan, config: SystemConfig, library: Library) -> CacheContents:
    """Fill every cache with verbatim library symbols according to ``plan``."""
    plan = bind(plan, config)
    F, M = config.F, config.M
    if library.symbols != F:
        raise ConfigurationError(f"library has {library.symbols} symbols, config says {F}")
    fld = config.field
    w = library.w.data
    placements, values, columns = [], [], []
    for k in range(1, config.K + 1):
        if plan.variant == BASELINE_UNICAST:
            cols: list[int] = []
        elif plan.variant == BASELINE_FULL:
            cols = list(range(M))
        else:
            cols = plan.layout.cached_columns(k)
        if len(cols) > M:
            raise ConfigurationError(f"user {k} would cache {len(cols)} > M={M} symbols")
        P = np.zeros((len(cols), F), dtype=np.int64)
        P[np.arange(len(cols)), cols] = 1
        placements.append(FieldMatrix(fld, P))
        values.append(FieldMatrix(fld, w[cols].reshape(-1, 1)))
        columns.append(tuple(cols))
    return CacheContents(tuple(placements), tuple(values), tuple(columns))


def class_members(K: int, size: int) -> list[list[int]]:
    """Users of each residue class ``Mod(k, size) = i``, for ``i = 1..size``."""
    out: list[list[int]] = [[] for _ in range(size)]
    for k in range(1, K + 1):
        out[mod1(k, size) - 1].append(k)
    return out


def stack_blocks(blocks: Sequence[np.ndarray], slots: int, rows: int, width: int) -> np.ndarray:
    """Stack per-user blocks of ``rows`` rows, zero-padded to ``slots`` blocks."""
    out = np.zeros((slots * rows, width), dtype=np.int64)
    for s, b in enumerate(blocks):
        out[s * rows : (s + 1) * rows] = b
    return out


def multicast_rows(
    F: int, subfiles: Sequence[range], stacks: Sequence[np.ndarray] | None, p: int
) -> np.ndarray:
    """Coefficients of ``sum_i stacks[i] w[subfiles[i]]`` (raw subfiles when ``stacks`` is None)."""
    if stacks is None:
        n = len(subfiles[0]) if subfiles else 0
        out = np.zeros((n, F), dtype=np.int64)
        for sub in subfiles:
            out[np.arange(n), list(sub)] += 1
        return out % p
    n = stacks[0].shape[0] if stacks else 0
    out = np.zeros((n, F), dtype=np.int64)
    for sub, st in zip(subfiles, stacks):
        out[:, sub.start : sub.stop] += st
    return out % p


def virtual_user_stacks(
    K: int, classes: int, subfiles: Sequence[range], per_user: dict[int, np.ndarray], rows: int
) -> tuple[list[np.ndarray] | None, int]:
    """Stacked virtual-user demands, or None when sending raw subfiles is no longer.

    Returns ``(stacks, length)``; ``length = min(ceil(K/classes)*rows, |subfile|)``.
    """
    slots = ceil_div(K, classes)
    width = len(subfiles[0]) if subfiles else 0
    n = slots * rows
    if n >= width:
        return None, width
    members = class_members(K, classes)
    stacks = [
        stack_blocks([per_user[k] for k in members[i]], slots, rows, width)
        for i in range(classes)
    ]
    return stacks, n


def deliver_baseline(
    config: SystemConfig, demands: DemandSet, library: Library, which: str
) -> Transcript:
    fld = config.field
    if which in ("unicast", BASELINE_UNICAST):
        blocks = [(unicast_label(k + 1), demands[k].data) for k in range(config.K)]
    elif which in ("full_library", "full", BASELINE_FULL):
        rows = np.eye(config.F, dtype=np.int64)[config.M :]
        blocks = [(FULL_SEG, rows)]
    else:
        raise ConfigurationError(f"unknown baseline {which!r}")
    return Transcript.from_blocks(fld, blocks, library)


def corner_stacks(K: int, g: int, demands: DemandSet, F: int):
    layout = interpolate_layout(F, g, 1)
    L = demands[0].rows
    per_user = {}
    for k in range(1, K + 1):
        sub = layout.part1[mod1(k, g) - 1]
        per_user[k] = demands[k - 1].data[:, sub.start : sub.stop]
    stacks, n = virtual_user_stacks(K, g, layout.part1, per_user, L)
    return layout, stacks, n


def deliver_corner_grouped(
    config: SystemConfig, demands: DemandSet, library: Library, g: int
) -> Transcript:
    """One multicast serving ``g`` groups of users that share a cache."""
    if config.F % g:
        raise ConfigurationError(f"F={config.F} not divisible by g={g}")
    layout, stacks, _ = corner_stacks(config.K, g, demands, config.F)
    rows = multicast_rows(config.F, layout.part1, stacks, config.q)
    return Transcript.from_blocks(config.field, [(CORNER_SEG, rows)], library)


def _require(plan: SchemePlan, config: SystemConfig, variant: str) -> SchemePlan:
    if plan.variant != variant:
        raise ConfigurationError(f"plan is {plan.variant!r}, expected {variant!r}")
    return bind(plan, config)


def rho1_virtual_stacks(plan: SchemePlan, demands: DemandSet):
    layout = plan.layout
    g = layout.g
    per_user = {}
    for k in range(1, plan.users + 1):
        sub = layout.part2[mod1(k, g + 1) - 1]
        per_user[k] = demands[k - 1].data[:, sub.start : sub.stop]
    return virtual_user_stacks(plan.users, g + 1, layout.part2, per_user, demands[0].rows)


def deliver_rho1(
    plan: SchemePlan, config: SystemConfig, demands: DemandSet, library: Library
) -> Transcript:
    """Part 1 as a raw-subfile multicast, part 2 through virtual users."""
    plan = _require(plan, config, RHO1)
    layout, F, p = plan.layout, config.F, config.q
    blocks = [(PART1, multicast_rows(F, layout.part1, None, p))]
    if layout.part2:
        stacks, _ = rho1_virtual_stacks(plan, demands)
        blocks.append((VIRTUAL, multicast_rows(F, layout.part2, stacks, p)))
    else:
        blocks.append((VIRTUAL, np.zeros((0, F), dtype=np.int64)))
    return Transcript.from_blocks(config.field, blocks, library)


def rho2_step2_stacks(plan: SchemePlan, transforms):
    layout = plan.layout
    g = layout.g
    bottom = transforms[0].bottom
    per_user = {t.user: t.step2_rows() for t in transforms}
    return virtual_user_stacks(plan.users, g + 1, layout.part2, per_user, bottom)


def deliver_rho2(
    plan: SchemePlan, config: SystemConfig, demands: DemandSet, library: Library
) -> Transcript:
    """Transform each user's residual demand, then deliver its two blocks separately."""
    plan = _require(plan, config, RHO2)
    layout, F, K, p = plan.layout, config.F, config.K, config.q
    g = layout.g
    transforms = build_transforms(plan, demands)
    blocks = []
    for i in range(1, ceil_div(K, g) + 1):
        rows = np.zeros((transforms[0].top, F), dtype=np.int64)
        for j in range(1, g + 1):
            k = (i - 1) * g + j
            if k > K:
                break
            t = transforms[k - 1]
            s1 = t.step1_rows()
            rows[:, t.a_cols.start : t.a_cols.stop] += s1[:, : t.a_width]
            rows[:, t.c_cols.start : t.c_cols.stop] += s1[:, t.a_width :]
        blocks.append((rho2_step1_label(i), rows % p))
    if layout.part2:
        stacks, _ = rho2_step2_stacks(plan, transforms)
        blocks.append((RHO2_STEP2, multicast_rows(F, layout.part2, stacks, p)))
    else:
        blocks.append((RHO2_STEP2, np.zeros((0, F), dtype=np.int64)))
    return Transcript.from_blocks(config.field, blocks, library)


def rho3_stacks(K: int, layout, demands: DemandSet):
    per_user = {
        k: demands[k - 1].data[:, layout.part1[k - 1].start : layout.part1[k - 1].stop]
        for k in range(1, K + 1)
    }
    return virtual_user_stacks(K, K, layout.part1, per_user, demands[0].rows)


def deliver_rho3(
    config: SystemConfig, demands: DemandSet, library: Library, plan: SchemePlan | None = None
) -> Transcript:
    """Top-branch delivery: one multicast of demanded combinations or of raw missing symbols."""
    if plan is None:
        plan = make_plan(config.K, config.mu, config.lam, RHO3)
    plan = _require(plan, config, RHO3)
    stacks, _ = rho3_stacks(config.K, plan.layout, demands)
    rows = multicast_rows(config.F, plan.layout.part1, stacks, config.q)
    return Transcript.from_blocks(config.field, [(RHO3_SEG, rows)], library)


def deliver(
    plan: SchemePlan, config: SystemConfig, demands: DemandSet, library: Library
) -> Transcript:
    if len(demands) != config.K or demands[0].shape != (config.L, config.F):
        raise ConfigurationError("demand set does not match the configuration")
    v = plan.variant
    if v == BASELINE_UNICAST:
        return deliver_baseline(config, demands, library, "unicast")
    if v == BASELINE_FULL:
        return deliver_baseline(config, demands, library, "full_library")
    if v == CORNER:
        bind(plan, config)
        return deliver_corner_grouped(config, demands, library, plan.g)
    if v == RHO1:
        return deliver_rho1(plan, config, demands, library)
    if v == RHO2:
        return deliver_rho2(plan, config, demands, library)
    if v == RHO3:
        return deliver_rho3(config, demands, library, plan)
    raise ConfigurationError(f"unknown variant {v!r}")
