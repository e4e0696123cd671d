"""Exact-rational load formulas and memory-load tradeoff curves."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .errors import DomainError
from .model import TOP, Regime, format_rational
from .schemes.plan import (
    BASELINE_FULL,
    BASELINE_UNICAST,
    CORNER,
    RHO1,
    RHO2,
    RHO3,
    SchemePlan,
    ceil_div,
    choose_regime,
)

CSV_HEADER = ["mu", "rho_proposed", "rho_baseline", "rho_scalar", "variant", "g", "alpha"]
_DECIMAL_COLUMNS = ["mu_dec", "rho_proposed_dec", "rho_baseline_dec", "rho_scalar_dec", "alpha_dec"]


def _pos(x: Fraction) -> Fraction:
    return x if x > 0 else Fraction(0)


def _check_unit(name: str, x: Fraction) -> Fraction:
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError(f"{name}={x} outside [0, 1]")
    return x


def binom(n: int, k: int) -> int:
    """Binomial coefficient that is zero whenever ``n < 0``, ``k < 0`` or ``n < k``."""
    if n < 0 or k < 0 or n < k:
        return 0
    return comb(n, k)


@dataclass(frozen=True)
class LoadPoint:
    mu: Fraction
    rho_proposed: Fraction
    rho_baseline: Fraction
    rho_scalar: Fraction | None
    regime: Regime
    chosen_variant: str
    rho1: Fraction | None = None
    rho2: Fraction | None = None


def baseline_load(K: int, mu: Fraction, lam: Fraction) -> Fraction:
    mu, lam = _check_unit("mu", mu), _check_unit("lambda", lam)
    return min(K * lam, 1 - mu)


def rho1_load(K: int, g: int, alpha: Fraction, lam: Fraction) -> Fraction:
    return alpha / g + min(ceil_div(K, g + 1) * lam, (1 - alpha) / (g + 1))


def rho2_load(K: int, g: int, alpha: Fraction, lam: Fraction) -> Fraction:
    return ceil_div(K, g) * min(alpha / g, lam) + min(
        ceil_div(K, g + 1) * _pos(lam - alpha / g), (1 - alpha) / (g + 1)
    )


def rho3_load(K: int, alpha: Fraction, lam: Fraction) -> Fraction:
    return min(alpha / K, lam)


def corner_load(K: int, g: int, lam: Fraction) -> Fraction:
    """Load of the ``g``-group corner at memory ``1 - 1/g``."""
    return min(Fraction(1, g), ceil_div(K, g) * lam)


def theorem_load(K: int, mu: Fraction, lam: Fraction) -> LoadPoint:
    """Achievable load at ``(mu, lam)`` and the variant that attains it."""
    mu, lam = _check_unit("mu", mu), _check_unit("lambda", lam)
    if lam == 0:
        raise DomainError("lambda must be positive")
    regime = choose_regime(K, mu)
    g, a = regime.g, regime.alpha
    r1 = r2 = None
    if regime.branch == TOP:
        rho, variant = rho3_load(K, a, lam), RHO3
    elif a / g >= ceil_div(K, g) * lam:
        rho, variant = ceil_div(K, g) * lam, CORNER
    else:
        r1, r2 = rho1_load(K, g, a, lam), rho2_load(K, g, a, lam)
        rho, variant = (r1, RHO1) if r1 <= r2 else (r2, RHO2)
    scalar = None
    if (1 / lam).denominator == 1:
        scalar = scalar_lfr_curve(K, lam, mu)
    return LoadPoint(mu, rho, baseline_load(K, mu, lam), scalar, regime, variant, r1, r2)


def variant_load(K: int, mu: Fraction, lam: Fraction, plan: SchemePlan) -> Fraction:
    """Closed-form normalized load of one concrete plan."""
    mu, lam = Fraction(mu), Fraction(lam)
    v = plan.variant
    if v == BASELINE_UNICAST:
        return K * lam
    if v == BASELINE_FULL:
        return 1 - mu
    if v == CORNER:
        return corner_load(K, plan.g, lam)
    g, a = plan.regime.g, plan.regime.alpha
    if v == RHO1:
        return rho1_load(K, g, a, lam)
    if v == RHO2:
        return rho2_load(K, g, a, lam)
    if v == RHO3:
        return rho3_load(K, a, lam)
    raise DomainError(f"unknown variant {v!r}")


def scalar_lfr_load(K: int, lam: Fraction, t: int) -> Fraction:
    """Scalar (file-wise) retrieval load at corner ``mu = t/K`` with ``N = 1/lam`` files."""
    lam = Fraction(lam)
    if lam <= 0 or (1 / lam).denominator != 1:
        raise DomainError(f"1/lambda must be a positive integer, got lambda={lam}")
    if not 0 <= t <= K:
        raise DomainError(f"t={t} outside [0, {K}]")
    N = int(1 / lam)
    return lam * Fraction(binom(K, t + 1) - binom(K - min(K, N), t + 1), binom(K, t))


def scalar_lfr_curve(K: int, lam: Fraction, mu: Fraction) -> Fraction:
    """Piecewise-linear interpolation of the scalar corners ``(t/K, rho(t))``."""
    mu = _check_unit("mu", mu)
    t = min(int(mu * K), K - 1) if K > 0 else 0
    lo, hi = Fraction(t, K), Fraction(t + 1, K)
    r_lo, r_hi = scalar_lfr_load(K, lam, t), scalar_lfr_load(K, lam, t + 1)
    return r_lo + (r_hi - r_lo) * (mu - lo) / (hi - lo)


def grouped_scalar_load(K: int, lam: Fraction, g: int, t: int) -> Fraction:
    """Load of the grouped scalar scheme at ``mu = t/g``."""
    return Fraction(lam) * ceil_div(K, g) * binom(g, t + 1)


def grouped_scalar_inferior(K: int, lam: Fraction, g: int, t: int) -> bool:
    """Whether the grouped scalar point is no better than the baseline at ``mu = t/g``."""
    return grouped_scalar_load(K, lam, g, t) >= baseline_load(K, Fraction(t, g), lam)


def uniform_grid(n: int) -> list[Fraction]:
    if n < 2:
        return [Fraction(0)] if n == 1 else []
    return [Fraction(i, n - 1) for i in range(n)]


def sweep_curve(K: int, lam: Fraction, grid: Iterable[Fraction]) -> list[LoadPoint]:
    return [theorem_load(K, Fraction(mu), Fraction(lam)) for mu in sorted(set(map(Fraction, grid)))]


def _dec(x: Fraction | None) -> str:
    if x is None:
        return ""
    return f"{float(x):.15g}"


def curve_csv(points: Sequence[LoadPoint]) -> str:
    """CSV with exact ``p/q`` columns followed by 15-significant-digit decimals."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER + _DECIMAL_COLUMNS)
    for pt in points:
        scalar = "" if pt.rho_scalar is None else format_rational(pt.rho_scalar)
        writer.writerow(
            [
                format_rational(pt.mu),
                format_rational(pt.rho_proposed),
                format_rational(pt.rho_baseline),
                scalar,
                pt.chosen_variant,
                pt.regime.g,
                format_rational(pt.regime.alpha),
                _dec(pt.mu),
                _dec(pt.rho_proposed),
                _dec(pt.rho_baseline),
                _dec(pt.rho_scalar),
                _dec(pt.regime.alpha),
            ]
        )
    return buf.getvalue()


def curve_svg(points: Sequence[LoadPoint], title: str = "", width: int = 480, height: int = 360) -> str:
    """Minimal standalone SVG line chart of proposed, baseline and scalar loads."""
    pad = 48
    ymax = max([float(p.rho_baseline) for p in points] + [float(p.rho_proposed) for p in points] + [1e-9])

    def xy(mu, rho):
        x = pad + float(mu) * (width - 2 * pad)
        y = height - pad - float(rho) / ymax * (height - 2 * pad)
        return f"{x:.2f},{y:.2f}"

    series = [
        ("proposed", "#1f77b4", [(p.mu, p.rho_proposed) for p in points]),
        ("baseline", "#d62728", [(p.mu, p.rho_baseline) for p in points]),
        ("scalar", "#2ca02c", [(p.mu, p.rho_scalar) for p in points if p.rho_scalar is not None]),
    ]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 10}" text-anchor="middle" font-size="12">mu</text>',
        f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2:.0f})">rho</text>',
        f'<text x="{pad}" y="{height - pad + 14}" font-size="10" text-anchor="middle">0</text>',
        f'<text x="{width - pad}" y="{height - pad + 14}" font-size="10" text-anchor="middle">1</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" font-size="10" text-anchor="end">{ymax:.3g}</text>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-size="13">{title}</text>')
    for i, (name, color, pts) in enumerate(series):
        if not pts:
            continue
        coords = " ".join(xy(m, r) for m, r in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = pad + 14 * i
        out.append(
            f'<text x="{width - pad - 4}" y="{ly}" font-size="11" fill="{color}" text-anchor="end">{name}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
