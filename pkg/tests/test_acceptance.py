"""Acceptance criteria, one test each.

Every test prints a single PASS/FAIL line (visible even under captured
output) and then asserts.  Run standalone with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from anticonc.distribution import concentration_probability, direction_census
from anticonc.domain import VectorSet, hypercube
from anticonc.harness import ExperimentConfig, run_theorem1_experiment, run_theorem2_experiment
from anticonc.harness.generators import GeneratorSpec, generate
from anticonc.harness.verify import (
    check_entropy_solver,
    check_lemma_tech,
    check_lemma_techU,
    check_lemma_techU2,
    check_moments,
    check_r_ell,
    check_x_roundtrip,
    check_y_roundtrip,
    suite_analytic,
)
from anticonc.structure import solve_parameters

SEED = 20240601


def report(capsys, number, title, ok, elapsed, limit, detail=""):
    ok = ok and elapsed < limit
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({elapsed:.2f}s, limit {limit:g}s)"
    if detail:
        line += f" {detail}"
    with capsys.disabled():
        print("\n" + line)
    return ok


def summarize(checks):
    return ", ".join(f"{c.name} {c.violations}/{c.instances}" for c in checks)


def test_binomial_baseline(capsys):
    t0 = time.perf_counter()
    ok = True
    rng = np.random.default_rng(SEED)
    for n in range(1, 17):
        expected = Fraction(math.comb(n, math.ceil(n / 2)), 2 ** n)
        full = VectorSet.full(n)
        if n <= 12:
            # every direction, generic census over explicit member lists
            rec = direction_census(full, full, Fraction(1))
            ok &= rec.concentrations() == [(expected, 2 ** n)]
        else:
            rec = direction_census(hypercube(n), full, Fraction(1))
            ok &= rec.concentrations() == [(expected, 2 ** n)]
            for code in rng.choice(2 ** n, size=64, replace=False):
                x = [1 if (int(code) >> (n - 1 - j)) & 1 else -1 for j in range(n)]
                ok &= concentration_probability(x, full) == expected
    elapsed = time.perf_counter() - t0
    assert report(capsys, 1, "binomial baseline, n <= 16", ok, elapsed, 10)


def test_sharpness_reproduction(capsys):
    t0 = time.perf_counter()
    A, B = generate(GeneratorSpec("sharpness_pair", 12, {"beta": 0.5}))
    rec = direction_census(A, B, Fraction(1, 2))
    ok = rec.concentrations() == [(Fraction(1), len(A))] and rec.exceed_count == len(A)
    elapsed = time.perf_counter() - t0
    assert report(capsys, 2, "sharpness pair n=12", ok, elapsed, 5, f"|A|={len(A)} |B|={len(B)}")


def test_distinct_differences_exponent(capsys):
    t0 = time.perf_counter()
    rep = run_theorem2_experiment(ExperimentConfig(seed=SEED), "distinct_cube", range(8, 25, 2))
    elapsed = time.perf_counter() - t0
    ok = -1.7 <= rep.exponent <= -1.3
    assert report(capsys, 3, "distinct differences exponent", ok, elapsed, 120, f"exponent={rep.exponent:.4f}")


def test_fourier_product_bound(capsys):
    t0 = time.perf_counter()
    res = check_lemma_tech(ExperimentConfig(seed=SEED), 10_000, n_max=10, max_size=128)
    elapsed = time.perf_counter() - t0
    ok = res.instances == 10_000 and res.violations == 0
    assert report(capsys, 4, "product bound, 10^4 instances", ok, elapsed, 120, summarize([res]))


def test_power_bounds(capsys):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(seed=SEED)
    checks = [
        check_lemma_techU(cfg, 1000, n_max=8, kappa=0.1, nus=(0.1, 0.5, 1.0)),
        check_lemma_techU2(cfg, 1000, n_max=8, kappa=0.1, nus=(0.1, 0.5, 1.0)),
    ]
    elapsed = time.perf_counter() - t0
    ok = all(c.instances == 3000 and c.violations == 0 for c in checks)
    assert report(capsys, 5, "power bounds, 10^3 instances each", ok, elapsed, 300, summarize(checks))


def test_moment_identity(capsys):
    t0 = time.perf_counter()
    checks = check_moments(ExperimentConfig(seed=SEED), 300, g_max=6, ell_max=3)
    elapsed = time.perf_counter() - t0
    ok = all(c.passed for c in checks)
    assert report(capsys, 6, "moment identity", ok, elapsed, 60, summarize(checks))


def test_r_ell_oracle(capsys):
    t0 = time.perf_counter()
    res = check_r_ell(ExperimentConfig(seed=SEED), 100, n_max=8, ell_max=3)
    elapsed = time.perf_counter() - t0
    assert report(capsys, 7, "zero-sum count vs brute force", res.passed, elapsed, 120, summarize([res]))


def test_encoding_roundtrips(capsys):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(seed=SEED)
    checks = check_y_roundtrip(cfg, 50, n_max=12) + check_x_roundtrip(cfg, 50, n_max=12)
    elapsed = time.perf_counter() - t0
    ok = all(c.passed for c in checks)
    assert report(capsys, 8, "encoding round-trips and censuses", ok, elapsed, 300, summarize(checks))


def test_analytic_claims(capsys):
    t0 = time.perf_counter()
    checks = suite_analytic(ExperimentConfig(seed=SEED))
    elapsed = time.perf_counter() - t0
    ok = all(c.passed for c in checks)
    ok &= all(c.instances >= 100_000 for c in checks )
    assert report(capsys, 9, "analytic claims on dense grids", ok, elapsed, 60, summarize(checks))


def test_entropy_solver(capsys):
    t0 = time.perf_counter()
    res = check_entropy_solver(ExperimentConfig(seed=SEED), lams=(0.1, 0.3, 0.5, 1.0))
    ok = res.passed and solve_parameters(1.0).kappa == 0.25
    elapsed = time.perf_counter() - t0
    assert report(capsys, 10, "entropy parameter solver", ok, elapsed, 1, summarize([res]))


def test_desk_scale_concentration(capsys):
    t0 = time.perf_counter()
    n, delta = 16, 0.05
    p95, fractions = [], []
    for seed in range(10):
        rep = run_theorem1_experiment(ExperimentConfig(n=n, beta=0.6, delta=delta, seed=seed), c_values=(3.0,))
        p95.append(rep.p95_scaled)
        fractions.append(rep.exceed_fraction(3.0))
    elapsed = time.perf_counter() - t0
    ratio = max(p95) / min(p95)
    below = sum(f < 2 ** (-delta * n) for f in fractions)
    ok = ratio < 3 and below >= 9
    detail = f"p95*sqrt(n) in [{min(p95):.3f}, {max(p95):.3f}], ratio={ratio:.3f}, seeds below 2^-0.8: {below}/10"
    assert report(capsys, 11, "desk-scale concentration, n=16", ok, elapsed, 600, detail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
