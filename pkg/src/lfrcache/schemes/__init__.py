"""Placement, delivery and decoding for the baseline and grouped coded schemes."""

from .decode import CacheView, decode
from .delivery import (
    deliver,
    deliver_baseline,
    deliver_corner_grouped,
    deliver_rho1,
    deliver_rho2,
    deliver_rho3,
    place,
)
from .plan import (
    BASELINE_FULL,
    BASELINE_UNICAST,
    CORNER,
    RHO1,
    RHO2,
    RHO3,
    VARIANTS,
    PartitionLayout,
    SchemePlan,
    bind,
    ceil_div,
    choose_regime,
    feasible_variants,
    interpolate_layout,
    make_plan,
    minimal_symbols,
    mod1,
    peers,
    achievable_variants,
    top_layout,
)
from .transforms import UserTransform, build_transforms

__all__ = [
    "BASELINE_FULL",
    "BASELINE_UNICAST",
    "CORNER",
    "RHO1",
    "RHO2",
    "RHO3",
    "VARIANTS",
    "CacheView",
    "PartitionLayout",
    "SchemePlan",
    "UserTransform",
    "bind",
    "build_transforms",
    "ceil_div",
    "choose_regime",
    "decode",
    "deliver",
    "deliver_baseline",
    "deliver_corner_grouped",
    "deliver_rho1",
    "deliver_rho2",
    "deliver_rho3",
    "feasible_variants",
    "interpolate_layout",
    "make_plan",
    "minimal_symbols",
    "mod1",
    "peers",
    "place",
    "achievable_variants",
    "top_layout",
]
