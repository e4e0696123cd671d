"""Regime selection, subfile layout and scheme plans.

Users are numbered ``1..K`` throughout this subpackage, matching the group
arithmetic ``Mod(b, a) in {1, ..., a}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ConfigurationError, DomainError
from ..model import (
    INTERPOLATE,
    TOP,
    Regime,
    SystemConfig,
    _lcm_denominators,
    divisibility_fractions,
)

BASELINE_UNICAST = "baseline-unicast"
BASELINE_FULL = "baseline-full"
CORNER = "corner"
RHO1 = "rho1"
RHO2 = "rho2"
RHO3 = "rho3"
VARIANTS = (BASELINE_UNICAST, BASELINE_FULL, CORNER, RHO1, RHO2, RHO3)


def mod1(b: int, a: int) -> int:
    """Modulo with representatives ``1..a`` (``a`` itself when ``a`` divides ``b``)."""
    return (b - 1) % a + 1


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def choose_regime(K: int, mu: Fraction) -> Regime:
    """Write ``mu`` as a memory-sharing point between neighbouring corners.

    Below ``(K-1)/K`` the interpolate branch is used with the largest ``g``
    such that ``(g-1)/g <= mu``; from ``(K-1)/K`` upward the top branch.
    """
    mu = Fraction(mu)
    if not 0 <= mu <= 1:
        raise DomainError(f"mu={mu} outside [0, 1]")
    if mu >= Fraction(K - 1, K):
        return Regime(TOP, K, K * (1 - mu))
    g = math.floor(1 / (1 - mu))
    alpha = g * g - mu * g * (g + 1)
    return Regime(INTERPOLATE, g, alpha)


def regime_memory(K: int, regime: Regime) -> Fraction:
    g, a = regime.g, regime.alpha
    if regime.branch == TOP:
        return a * Fraction(K - 1, K) + (1 - a)
    return a * Fraction(g - 1, g) + (1 - a) * Fraction(g, g + 1)


@dataclass(frozen=True)
class PartitionLayout:
    """Column ranges of every subfile of ``w``.

    Interpolate branch: ``part1[i-1]`` is the part-1 subfile missed by group
    ``i`` of ``g`` (size ``alpha F/g``), ``part2[i-1]`` the part-2 subfile
    missed by group ``i`` of ``g+1`` (size ``(1-alpha)F/(g+1)``).  Top branch:
    ``part1[k-1]`` is the range only user ``k`` lacks and ``shared`` is cached
    by everyone.
    """

    branch: str
    g: int
    alpha: Fraction
    symbols: int
    part1: tuple[range, ...]
    part2: tuple[range, ...]
    shared: range

    def missing(self, k: int) -> list[range]:
        if self.branch == TOP:
            return [self.part1[k - 1]]
        out = [self.part1[mod1(k, self.g) - 1]]
        if self.part2:
            out.append(self.part2[mod1(k, self.g + 1) - 1])
        return out

    def cached_columns(self, k: int) -> list[int]:
        lacking = set()
        for r in self.missing(k):
            lacking.update(r)
        return [c for c in range(self.symbols) if c not in lacking]

    def ranges(self) -> list[range]:
        return list(self.part1) + list(self.part2) + ([self.shared] if len(self.shared) else [])


def _integral(x: Fraction, what: str) -> int:
    if x.denominator != 1 or x < 0:
        raise ConfigurationError(f"{what}={x} is not a nonnegative integer")
    return int(x)


def _consecutive(start: int, size: int, count: int) -> tuple[range, ...]:
    return tuple(range(start + i * size, start + (i + 1) * size) for i in range(count))


def interpolate_layout(F: int, g: int, alpha: Fraction) -> PartitionLayout:
    alpha = Fraction(alpha)
    a1 = _integral(alpha * F / g, "alpha*F/g")
    a2 = _integral((1 - alpha) * F / (g + 1), "(1-alpha)*F/(g+1)")
    part1 = _consecutive(0, a1, g)
    part2 = _consecutive(g * a1, a2, g + 1) if a2 else ()
    return PartitionLayout(INTERPOLATE, g, alpha, F, part1, part2, range(F, F))


def top_layout(F: int, K: int, alpha: Fraction) -> PartitionLayout:
    alpha = Fraction(alpha)
    a1 = _integral(alpha * F / K, "alpha*F/K")
    part1 = _consecutive(0, a1, K)
    return PartitionLayout(TOP, K, alpha, F, part1, (), range(K * a1, F))


@dataclass(frozen=True)
class SchemePlan:
    """A feasible variant together with its subfile layout.

    Baselines carry no layout.  ``corner`` uses the ``g``-group layout with
    ``alpha = 1`` (memory ``(g-1)/g``, every user in class ``Mod(k, g)``
    shares a cache).
    """

    variant: str
    users: int
    regime: Regime | None
    layout: PartitionLayout | None

    @property
    def g(self) -> int:
        return self.regime.g if self.regime else 0

    def group1(self, k: int) -> int:
        return mod1(k, self.g)

    def group2(self, k: int) -> int:
        return mod1(k, self.g + 1)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "users": self.users,
            "regime": self.regime.to_dict() if self.regime else None,
        }


def peers(k: int, g: int, K: int) -> set[int]:
    """Users sharing ``k``'s step-1 multicast who cache both of ``k``'s missing subfiles."""
    a_k = ceil_div(k, g) - 1
    own = mod1(k, g)
    return {a_k * g + j for j in range(1, g + 1) if j != own and a_k * g + j <= K}


def _rho_condition(K: int, lam: Fraction, regime: Regime) -> bool:
    """True when the interpolate regime needs the two-part solutions."""
    return regime.alpha / regime.g <= ceil_div(K, regime.g) * lam


def achievable_variants(K: int, mu: Fraction, lam: Fraction) -> tuple[Regime, list[str]]:
    """Variants realising the achievable load at ``(mu, lam)`` for the chosen regime."""
    regime = choose_regime(K, mu)
    if regime.branch == TOP:
        return regime, [RHO3]
    if regime.alpha / regime.g >= ceil_div(K, regime.g) * lam:
        return regime, [CORNER]
    return regime, [RHO1, RHO2]


def variant_fractions(K: int, mu: Fraction, lam: Fraction, plan: SchemePlan) -> list[Fraction]:
    fr = [Fraction(mu), Fraction(lam)]
    if plan.variant == CORNER:
        fr.append(Fraction(1, plan.g))
    elif plan.variant in (RHO1, RHO2, RHO3):
        fr += divisibility_fractions(K, mu, lam, plan.regime)
    return fr


def minimal_symbols(K: int, mu: Fraction, lam: Fraction, plan: SchemePlan) -> int:
    """Smallest F realising ``plan`` at normalized memory ``mu`` and demand ``lam``."""
    return _lcm_denominators(variant_fractions(K, mu, lam, plan))


def make_plan(
    K: int,
    mu: Fraction,
    lam: Fraction,
    variant: str,
    *,
    g: int | None = None,
    regime: Regime | None = None,
) -> SchemePlan:
    """Plan ``variant`` at normalized ``(mu, lam)``, checking feasibility.

    ``g`` selects the group count for ``corner`` (default: the regime's).
    ``regime`` overrides the automatic regime for the interpolated schemes and
    must reproduce ``mu`` exactly.
    """
    mu, lam = Fraction(mu), Fraction(lam)
    if variant not in VARIANTS:
        raise ConfigurationError(f"unknown variant {variant!r}")
    if not 0 <= mu <= 1 or not 0 < lam <= 1:
        raise DomainError(f"need mu in [0,1] and lambda in (0,1], got {mu}, {lam}")
    if variant in (BASELINE_UNICAST, BASELINE_FULL):
        return SchemePlan(variant, K, None, None)
    if regime is None:
        regime = choose_regime(K, mu)
    elif regime_memory(K, regime) != mu:
        raise ConfigurationError(f"regime {regime} does not reproduce mu={mu}")
    if variant == CORNER:
        gc = g if g is not None else (K if regime.branch == TOP else regime.g)
        if not 1 <= gc <= K:
            raise ConfigurationError(f"corner group count g={gc} outside [1, {K}]")
        if mu < 1 - Fraction(1, gc):
            raise ConfigurationError(f"corner g={gc} needs mu >= {1 - Fraction(1, gc)}, got {mu}")
        return SchemePlan(CORNER, K, Regime(INTERPOLATE, gc, Fraction(1)), None)
    if variant == RHO3:
        if regime.branch != TOP:
            raise ConfigurationError(f"rho3 needs mu >= (K-1)/K, got mu={mu}")
        return SchemePlan(RHO3, K, regime, None)
    if regime.branch != INTERPOLATE:
        raise ConfigurationError(f"{variant} needs mu < (K-1)/K, got mu={mu}")
    if not _rho_condition(K, lam, regime):
        raise ConfigurationError(
            f"{variant} needs alpha/g <= ceil(K/g)*lambda; "
            f"alpha/g={regime.alpha / regime.g}, ceil(K/g)*lambda={ceil_div(K, regime.g) * lam}"
        )
    return SchemePlan(variant, K, regime, None)


def layout_for(plan: SchemePlan, F: int) -> PartitionLayout | None:
    if plan.regime is None:
        return None
    if plan.regime.branch == TOP:
        return top_layout(F, plan.users, plan.regime.alpha)
    return interpolate_layout(F, plan.regime.g, plan.regime.alpha)


def bind(plan: SchemePlan, config: SystemConfig) -> SchemePlan:
    """Attach the concrete column layout for ``config.F``; raises on divisibility."""
    if plan.users != config.K:
        raise ConfigurationError(f"plan for K={plan.users} used with K={config.K}")
    if plan.layout is not None and plan.layout.symbols == config.F:
        return plan
    layout = layout_for(plan, config.F)
    if plan.variant == CORNER and config.M < (plan.g - 1) * config.F // plan.g:
        raise ConfigurationError("cache too small for the corner placement")
    return SchemePlan(plan.variant, plan.users, plan.regime, layout)


def feasible_variants(config: SystemConfig) -> list[SchemePlan]:
    """Every variant runnable on ``config`` (baselines, the theorem's variants, corner)."""
    K, mu, lam = config.K, config.mu, config.lam
    plans = [make_plan(K, mu, lam, BASELINE_UNICAST), make_plan(K, mu, lam, BASELINE_FULL)]
    regime, names = achievable_variants(K, mu, lam)
    for name in names:
        plans.append(make_plan(K, mu, lam, name))
    if CORNER not in names:
        gc = K if regime.branch == TOP else regime.g
        plans.append(make_plan(K, mu, lam, CORNER, g=gc))
    out = []
    for p in plans:
        try:
            out.append(bind(p, config))
        except ConfigurationError:
            continue
    return out
