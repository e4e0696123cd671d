"""Acceptance gate: one test per criterion, each reported as a PASS/FAIL line."""

import random
import time
from fractions import Fraction

import pytest

from lfrcache.analysis import (
    baseline_load,
    grouped_scalar_load,
    sweep_curve,
    theorem_load,
    uniform_grid,
)
from lfrcache.model import SystemConfig, random_instance
from lfrcache.schemes import feasible_variants, make_plan
from lfrcache.verify import (
    end_to_end_suite,
    worked_example_report,
    feasible_grid,
    peer_residue_exhaustive,
    run_trial,
    tiny_minrank_instances,
)

F_ = Fraction


@pytest.fixture
def report(record_property):
    def _report(number, detail):
        record_property("acceptance", (number, detail))
        print(f"criterion {number}: {detail}")

    return _report


@pytest.fixture(scope="module")
def sweep():
    """The full end-to-end run shared by criteria 2 and 3."""
    configs = [
        SystemConfig.from_fractions(K, mu, lam, q, F)
        for q in (2, 3, 7)
        for K in range(2, 11)
        for mu, lam, F in feasible_grid(K, 30)
    ]
    start = time.perf_counter()
    rep = end_to_end_suite(configs, 20, seed=2024, oracle=False)
    return configs, rep, time.perf_counter() - start


def test_criterion_1_k6_instance(report):
    start = time.perf_counter()
    rep = worked_example_report((72, 144), q=2, seed=1)
    elapsed = time.perf_counter() - start
    rows = {(r["F"], r["variant"]): r for r in rep["rows"]}
    report(1, f"rho1/rho2 = 5F/24 at F=72,144, baseline 25/72, {elapsed:.2f}s")
    for F in (72, 144):
        assert rows[(F, "rho1")]["symbols"] == 5 * F // 24
        assert rows[(F, "rho2")]["symbols"] == 5 * F // 24
        assert rows[(F, "rho1")]["measured"] == ["1/24", "1/6", "5/24"]
        assert rows[(F, "rho2")]["measured"] == ["1/8", "1/12", "5/24"]
        assert rows[(F, "baseline-full")]["symbols"] == 25 * F // 72
    assert baseline_load(6, F_(47, 72), F_(1, 12)) == F_(25, 72)
    assert rep["pass"]
    assert elapsed < 1.0


def test_criterion_2_end_to_end(sweep, report):
    configs, rep, elapsed = sweep
    cases = rep["cases"]
    variants = {c["variant"] for c in cases}
    decoded = sum(c["decoded"] for c in cases)
    total = sum(c["trials"] for c in cases)
    report(2, f"{decoded}/{total} trials decoded over {len(configs)} configs, {len(cases)} cases, {elapsed:.0f}s")
    assert variants == {"baseline-unicast", "baseline-full", "corner", "rho1", "rho2", "rho3"}
    for K in range(2, 11):
        assert sum(1 for c in configs if c.K == K and c.q == 2) >= 30
    assert decoded == total
    assert all(c["decoded"] == c["trials"] == 20 for c in cases)
    assert elapsed < 300


def test_criterion_3_formula_transcript(sweep, report):
    configs, rep, _ = sweep
    mismatches = [c for c in rep["cases"] if c["lengths"] != [c["expected_length"]]]
    chosen_seen = set()
    for c in rep["cases"]:
        if c["variant"] == c["achievable_variant"]:
            cfg = c["config"]
            rho = F_(c["lengths"][0], cfg["symbols"])
            assert rho == F_(c["achievable_load"])
            chosen_seen.add(tuple(sorted(cfg.items())))
    report(3, f"{len(mismatches)} length mismatches, chosen variant simulated at {len(chosen_seen)}/{len(configs)} configs")
    assert not mismatches
    assert len(chosen_seen) == len(configs)


@pytest.mark.parametrize("K,lam", [(6, F_(1, 15)), (6, F_(1, 10)), (10, F_(1, 50)), (10, F_(1, 10))])
def test_criterion_4_dominance(K, lam, report):
    pts = sweep_curve(K, lam, uniform_grid(101))
    bad = [p.mu for p in pts if p.rho_proposed > p.rho_baseline]
    report(4, f"K={K} lambda={lam}: {len(pts)} points, {len(bad)} violations")
    assert len(pts) == 101 and not bad


def test_criterion_5_corner_equality(report):
    checked = bad = 0
    for K in range(1, 25):
        lam = F_(1, K)
        for g in range(1, K + 1):
            pt = theorem_load(K, 1 - F_(1, g), lam)
            checked += 1
            bad += pt.rho_proposed != pt.rho_baseline
    report(5, f"{checked} corners with lambda=1/K, {bad} unequal")
    assert bad == 0


def test_criterion_6_peer_residues(report):
    start = time.perf_counter()
    rep = peer_residue_exhaustive(24)
    elapsed = time.perf_counter() - start
    report(6, f"K<=24: {rep.checked} peer checks, {len(rep.violations)} violations, {elapsed:.2f}s")
    assert rep.ok and rep.checked > 0 and elapsed < 10


def test_criterion_7_grouped_inferior(report):
    checked = bad = 0
    for K in range(1, 13):
        for g in range(1, K + 1):
            for t in range(1, g - 1):
                for lam in (F_(1, K), F_(1, 2 * K), F_(1, 5 * K)):
                    checked += 1
                    mu = F_(t, g)
                    bad += grouped_scalar_load(K, lam, g, t) < baseline_load(K, mu, lam)
    report(7, f"{checked} (K, g, t, lambda) points, {bad} below baseline")
    assert checked > 0 and bad == 0


def test_criterion_8_oracles(report):
    rng = random.Random(8)
    pool = []
    for K in range(2, 9):
        for mu, lam, F in feasible_grid(K, 30, max_symbols=60):
            for q in (2, 3, 7):
                pool.append(SystemConfig.from_fractions(K, mu, lam, q, F))
    trials = agree = 0
    while trials < 200:
        cfg = rng.choice(pool)
        plan = rng.choice(feasible_variants(cfg))
        lib, dem = random_instance(cfg, rng.getrandbits(63))
        out, _, _ = run_trial(plan, cfg, lib, dem, oracle=True)
        trials += 1
        agree += out.oracle == out.decoded
    probes = tiny_minrank_instances(50, seed=8)
    instances = {(p["F"], p["M"], p["seed"]) for p in probes}
    ok_probes = sum(p["pass"] for p in probes)
    report(8, f"oracle agreement {agree}/{trials}; minrank <= scheme on {ok_probes}/{len(probes)} comparisons over {len(instances)} instances")
    assert agree == trials == 200
    assert len(instances) == 50 and ok_probes == len(probes)
