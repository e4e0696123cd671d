import csv
import io
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfrcache.analysis import (
    CSV_HEADER,
    baseline_load,
    binom,
    corner_load,
    curve_csv,
    curve_svg,
    grouped_scalar_inferior,
    grouped_scalar_load,
    rho1_load,
    rho2_load,
    scalar_lfr_load,
    sweep_curve,
    theorem_load,
    uniform_grid,
)
from lfrcache.errors import DomainError

F_ = Fraction


def test_theorem_load_examples():
    pt = theorem_load(6, F_(47, 72), F_(1, 12))
    assert pt.rho_proposed == F_(5, 24) and pt.rho1 == pt.rho2 == F_(5, 24)
    assert pt.rho_baseline == F_(25, 72)
    assert theorem_load(6, F_(1), F_(1, 12)).rho_proposed == 0
    pt = theorem_load(10, F_(1, 2), F_(1, 50))
    assert (pt.regime.g, pt.regime.alpha) == (2, 1)
    assert pt.rho_proposed == F_(1, 10) and pt.chosen_variant == "corner"


def test_k6_instance_segment_formulas():
    assert rho1_load(6, 2, F_(1, 12), F_(1, 12)) == F_(1, 24) + F_(1, 6)
    assert rho2_load(6, 2, F_(1, 12), F_(1, 12)) == F_(1, 8) + F_(1, 12)


def test_baseline_examples():
    assert baseline_load(6, F_(47, 72), F_(1, 12)) == F_(25, 72)
    assert baseline_load(6, F_(1), F_(1, 12)) == 0
    assert baseline_load(6, F_(0), F_(1)) == 1
    with pytest.raises(DomainError):
        baseline_load(6, F_(2), F_(1))


def test_scalar_examples():
    assert scalar_lfr_load(6, F_(1, 15), 6) == 0
    for K, N in ((4, 4), (5, 9), (6, 15)):
        assert scalar_lfr_load(K, F_(1, N), 0) == K * F_(1, N)
    assert scalar_lfr_load(6, F_(1, 15), 3) == F_(1, 20)
    with pytest.raises(DomainError):
        scalar_lfr_load(6, F_(2, 15), 1)


def test_scalar_fewer_files_than_users():
    # N < K: users beyond the file count add nothing
    K, N, t = 6, 2, 1
    expect = F_(comb(K, t + 1) - comb(K - N, t + 1), comb(K, t)) / N
    assert scalar_lfr_load(K, F_(1, N), t) == expect


def test_grouped_scalar_examples():
    for K, g in ((6, 4), (7, 3), (10, 10)):
        lam = F_(1, 2 * K)
        assert grouped_scalar_load(K, lam, g, g - 1) == lam * -(-K // g)
        assert corner_load(K, g, lam) == min(F_(1, g), lam * -(-K // g))
        assert grouped_scalar_load(K, lam, g, g) == 0
    assert grouped_scalar_load(6, F_(1, 12), 4, 1) == 1


def test_binom_zero_outside_range():
    assert binom(3, 5) == 0 and binom(-1, 0) == 0 and binom(4, -1) == 0 and binom(5, 2) == 10


def test_sweep_examples():
    pts = sweep_curve(6, F_(1, 12), [F_(47, 72), F_(0), F_(1)])
    assert [p.mu for p in pts] == [0, F_(47, 72), 1]
    assert pts[1].rho_proposed == F_(5, 24) and pts[1].rho_baseline == F_(25, 72)
    assert pts[0].rho_proposed == min(6 * F_(1, 12), 1) and pts[2].rho_proposed == 0


@pytest.mark.parametrize("K", [2, 3, 5, 6, 10, 13])
def test_corners_equal_baseline_at_lambda_one_over_k(K):
    lam = F_(1, K)
    for g in range(1, K + 1):
        mu = 1 - F_(1, g)
        pt = theorem_load(K, mu, lam)
        assert pt.rho_proposed == pt.rho_baseline


@pytest.mark.parametrize("K,lam", [(6, F_(1, 15)), (6, F_(1, 10)), (10, F_(1, 50)), (10, F_(1, 10)), (7, F_(1, 3))])
def test_dominance_and_monotonicity(K, lam):
    pts = sweep_curve(K, lam, uniform_grid(101))
    assert len(pts) == 101
    for a, b in zip(pts, pts[1:]):
        assert b.rho_proposed <= a.rho_proposed
    assert all(p.rho_proposed <= p.rho_baseline for p in pts)


lams = st.builds(Fraction, st.integers(1, 10), st.integers(1, 80)).filter(lambda x: x <= 1)
mus = st.builds(Fraction, st.integers(0, 100), st.integers(1, 100)).filter(lambda x: x <= 1)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 14), mus, lams)
def test_dominance_property(K, mu, lam):
    pt = theorem_load(K, mu, lam)
    assert 0 <= pt.rho_proposed <= pt.rho_baseline


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 14), mus, mus, lams)
def test_monotone_in_memory(K, a, b, lam):
    lo, hi = sorted((a, b))
    assert theorem_load(K, hi, lam).rho_proposed <= theorem_load(K, lo, lam).rho_proposed


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 14), st.integers(1, 13), lams)
def test_continuous_at_corners(K, g, lam):
    g = min(g, K - 1)
    mu = 1 - F_(1, g)
    eps = F_(1, 10**9)
    at = theorem_load(K, mu, lam).rho_proposed
    assert abs(theorem_load(K, mu + eps, lam).rho_proposed - at) < F_(1, 10**6)
    if mu > 0:
        assert abs(theorem_load(K, mu - eps, lam).rho_proposed - at) < F_(1, 10**6)


@pytest.mark.parametrize("K", range(2, 13))
def test_grouped_scalar_never_beats_baseline(K):
    for g in range(1, K + 1):
        for t in range(1, g - 1):
            for lam in (F_(1, K), F_(1, 2 * K), F_(1, 5 * K)):
                assert grouped_scalar_inferior(K, lam, g, t)


def test_csv_layout_and_determinism():
    pts = sweep_curve(6, F_(1, 12), [F_(47, 72), F_(1, 2)])
    text = curve_csv(pts)
    assert text == curve_csv(pts)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][: len(CSV_HEADER)] == CSV_HEADER
    assert rows[2][:3] == ["47/72", "5/24", "25/72"]
    assert rows[2][CSV_HEADER.index("variant")] == "rho1"
    # no scalar value when 1/lambda is not an integer
    assert curve_csv(sweep_curve(6, F_(2, 15), [F_(1, 2)])).splitlines()[1].split(",")[3] == ""


def test_svg_is_standalone():
    svg = curve_svg(sweep_curve(6, F_(1, 15), uniform_grid(11)), "t")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 3 and "href" not in svg


def test_uniform_grid():
    assert uniform_grid(3) == [0, F_(1, 2), 1]
    assert uniform_grid(1) == [0] and uniform_grid(0) == []
