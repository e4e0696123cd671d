"""Per-user invertible row transforms used by the two-step (rho2) delivery."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..field import FieldMatrix, invert, matmul_mod, rref_with_transform
from ..model import DemandSet
from .plan import SchemePlan, layout_for, mod1


@dataclass(frozen=True)
class UserTransform:
    """``T_k`` and the split of ``T_k [A | C]`` into ``top`` and ``bottom`` rows.

    ``A`` is user ``k``'s demand restricted to its missing part-1 subfile and
    ``C`` to its missing part-2 subfile.  The bottom rows of ``transformed``
    have an all-zero ``A`` block.
    """

    user: int
    T: FieldMatrix
    T_inv: FieldMatrix
    top: int
    bottom: int
    a_cols: range
    c_cols: range
    transformed: FieldMatrix

    @property
    def a_width(self) -> int:
        return len(self.a_cols)

    def step1_rows(self) -> np.ndarray:
        """Coefficients of ``B'_{k,1}`` over ``[w_A; w_C]``."""
        return self.transformed.data[: self.top]

    def step2_rows(self) -> np.ndarray:
        """Coefficients of ``B'_{k,2}`` over ``w_C`` alone."""
        return self.transformed.data[self.top :, self.a_width :]


def build_transforms(plan: SchemePlan, demands: DemandSet) -> tuple[UserTransform, ...]:
    """Deterministic ``T_k`` for every user, derived from the RREF of ``A``.

    The split follows the fixed sizing ``top = min(|A cols|, L)`` even when
    ``rank(A)`` is smaller, so segment lengths never depend on the demand.
    """
    F = demands[0].cols
    if plan.layout is None or plan.layout.symbols != F:
        plan = SchemePlan(plan.variant, plan.users, plan.regime, layout_for(plan, F))
    return _build_transforms(plan, demands)


@lru_cache(maxsize=64)
def _build_transforms(plan: SchemePlan, demands: DemandSet) -> tuple[UserTransform, ...]:
    # cached: every decoder needs every user's transform, all derived from public D
    L = demands[0].rows
    layout = plan.layout
    g = layout.g
    p = demands.field.p
    out = []
    for k in range(1, plan.users + 1):
        a_cols = layout.part1[mod1(k, g) - 1]
        c_cols = layout.part2[mod1(k, g + 1) - 1] if layout.part2 else range(0)
        d = demands[k - 1].data
        A = FieldMatrix(demands.field, d[:, a_cols.start : a_cols.stop])
        _, t, _ = rref_with_transform(A)
        AC = np.concatenate([d[:, a_cols.start : a_cols.stop], d[:, c_cols.start : c_cols.stop]], axis=1)
        top = min(len(a_cols), L)
        out.append(
            UserTransform(
                user=k,
                T=t,
                T_inv=invert(t),
                top=top,
                bottom=L - top,
                a_cols=a_cols,
                c_cols=c_cols,
                transformed=FieldMatrix(demands.field, matmul_mod(t.data, AC, p)),
            )
        )
    return tuple(out)
