"""Named property suites with machine-readable pass/fail reports.

Every check draws its instances from ``numpy.random.default_rng(instance_seed)``
with ``instance_seed = seed * 1_000_000 + i``, so a violation record is enough
to rebuild the offending instance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import numpy as np

from .. import oracles
from ..distribution import (
    concentration_probability,
    cube_sum_distribution,
    direction_census,
    inner_product_distribution,
    interval_mass,
)
from ..domain import CubeSubset, TwoCube, VectorSet, make_two_cube, pack_signs
from ..encoding import (
    AdjacentEncoder,
    Budget,
    J_sizes,
    MemberEncoder,
    all_directions,
    bad_x_census,
    entropy_space_bound,
    small_J_census,
)
from ..errors import HypothesisFailed, UnknownSuite
from ..fourier import (
    PrefixTree,
    c1_estimate,
    convexity_gap,
    d_function,
    d_mean_exact,
    d_moment_exact,
    d_moment_quadrature,
    lemma_tech_check,
    lemma_techU2_check,
    lemma_techU_check,
    max_c0,
    sine_max_gap,
    star_bound,
)
from ..structure import r_ell, sidon_classify, solve_parameters
from .config import ExperimentConfig

SLACK = 1e-9
ROUNDTRIP_TAU = 0.4
SUITES = ("fourier-inequalities", "encodings", "structure-oracles", "distribution-oracles", "analytic-claims")


@dataclass
class CheckResult:
    name: str
    instances: int = 0
    violations: int = 0
    worst_margin: float = math.inf
    records: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def inequality(self, instance_seed: int, lhs: float, rhs: float, slack: float = SLACK) -> None:
        """Record lhs <= rhs (+ slack)."""
        self.instances += 1
        margin = rhs - lhs
        self.worst_margin = min(self.worst_margin, margin)
        if not lhs <= rhs + slack:
            self.fail(instance_seed, lhs, rhs)

    def equality(self, instance_seed: int, ok: bool, lhs=None, rhs=None) -> None:
        self.instances += 1
        if not ok:
            self.fail(instance_seed, lhs, rhs)

    def fail(self, instance_seed, lhs, rhs) -> None:
        self.violations += 1
        if len(self.records) < 100:
            margin = rhs - lhs if isinstance(lhs, (int, float)) and isinstance(rhs, (int, float)) else None
            self.records.append({
                "check": self.name, "instance_seed": instance_seed,
                "lhs": _jsonable(lhs), "rhs": _jsonable(rhs), "margin": margin,
            })

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.instances > 0

    def as_dict(self) -> dict:
        return {
            "check": self.name,
            "instances": self.instances,
            "violations": self.violations,
            "worst_margin": None if math.isinf(self.worst_margin) else self.worst_margin,
            "passed": self.passed,
            "notes": self.notes,
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.integer, np.floating)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(e) for e in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(e) for k, e in v.items()}
    return v


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks)

    def to_json(self) -> str:
        return json.dumps(
            {"suite": self.suite, "seed": self.seed, "passed": self.passed,
             "checks": [c.as_dict() for c in self.checks]},
            sort_keys=True, indent=2,
        )

    def violation_lines(self) -> list[str]:
        """One JSON object per violated inequality."""
        return [json.dumps(r, sort_keys=True) for c in self.checks for r in c.records]


def _rng(seed: int, i: int) -> tuple[int, np.random.Generator]:
    s = seed * 1_000_000 + i
    return s, np.random.default_rng(s)


def random_set(rng: np.random.Generator, n: int, max_size: int) -> VectorSet:
    size = int(rng.integers(1, min(max_size, 1 << n) + 1))
    return VectorSet(n, np.sort(rng.choice(1 << n, size=size, replace=False)).astype(np.uint64))


def biased_set(rng: np.random.Generator, n: int, rows: int, p_minus: float = 0.12) -> VectorSet:
    """Members sampled from a lopsided product measure; many low-entropy coordinates."""
    S = np.where(rng.random((rows, n)) < p_minus, -1, 1)
    return VectorSet(n, sorted({pack_signs(r) for r in S}))


def random_cube(rng: np.random.Generator, n: int, mag: int = 5) -> TwoCube:
    pairs = []
    for _ in range(n):
        u, v = rng.integers(-mag, mag + 1, size=2)
        while u == v:
            v = rng.integers(-mag, mag + 1)
        pairs.append((int(u), int(v)))
    return make_two_cube(pairs)


# ---------------------------------------------------------------------------
# fourier-inequalities

def check_lemma_tech(config: ExperimentConfig, count: int, n_max: int = 10, max_size: int = 128) -> CheckResult:
    res = CheckResult("fourier_product_bound")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(1, n_max + 1))
        B = random_set(rng, n, max_size)
        x = rng.integers(-3, 4, size=n)
        eta = float(rng.uniform(0, math.pi))
        chk = lemma_tech_check(x, B, eta)
        res.inequality(s, chk.lhs, chk.rhs)
    return res


def check_lemma_techU(
    config: ExperimentConfig, count: int, n_max: int = 8, kappa: float = 0.1, nus=(0.1, 0.5, 1.0)
) -> CheckResult:
    res = CheckResult("fourier_power_bound")
    c0 = max_c0(kappa)
    res.notes.append(f"kappa = {kappa}, c0 = {c0:.6g}")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(1, n_max + 1))
        B = random_set(rng, n, 1 << n)
        x = random_cube(rng, n).point(int(rng.integers(0, 1 << n)))
        eta = float(rng.uniform(0, math.pi))
        tree = PrefixTree(B)
        for nu in nus:
            chk = lemma_techU_check(x, B, eta, nu, kappa, c0, tree=tree)
            res.inequality(s, chk.lhs, chk.rhs)
    return res


def check_lemma_techU2(
    config: ExperimentConfig, count: int, n_max: int = 8, kappa: float = 0.1, nus=(0.1, 0.5, 1.0)
) -> CheckResult:
    res = CheckResult("averaged_power_bound")
    c0 = max_c0(kappa)
    for i in range(count):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(1, n_max + 1))
        cube = random_cube(rng, n)
        A0 = CubeSubset(cube, random_set(rng, n, 1 << n))
        B = random_set(rng, n, 1 << n)
        y = B.signs[int(rng.integers(0, len(B)))]
        eta = float(rng.uniform(0, math.pi))
        for nu in nus:
            chk = lemma_techU2_check(A0, B, y, eta, nu, kappa, c0)
            res.inequality(s, chk.lhs, chk.rhs)
    return res


def check_star(config: ExperimentConfig, count: int, n_max: int = 10) -> CheckResult:
    res = CheckResult("star_inequality")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(1, n_max + 1))
        B = random_set(rng, n, 256)
        x = random_cube(rng, n).point(int(rng.integers(0, 1 << n)))
        res.inequality(s, float(concentration_probability(x, B)), star_bound(x, B).value)
    return res


def suite_fourier(config: ExperimentConfig) -> list[CheckResult]:
    k = config.instances
    return [
        check_lemma_tech(config, k),
        check_lemma_techU(config, k),
        check_lemma_techU2(config, k),
        check_star(config, k),
    ]


# ---------------------------------------------------------------------------
# encodings

def check_y_roundtrip(config: ExperimentConfig, settings: int, n_max: int = 12) -> list[CheckResult]:
    trip = CheckResult("encode_y_roundtrip")
    space = CheckResult("small_J_census_codewords")
    lemma = CheckResult("small_J_census_bound")
    for i in range(settings):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(4, n_max + 1))
        B = biased_set(rng, n, int(rng.integers(8, 4 * n * n)))
        lam = 1.01 / n
        # a coarse kappa exercises both branches of the decoder
        for kappa in (0.3, None):
            budget = Budget.for_set(B, lam, kappa=kappa)
            enc = MemberEncoder(B, budget)
            for y in B.signs:
                try:
                    code = enc.encode(y)
                except HypothesisFailed:
                    continue
                back = enc.decode(code)
                trip.equality(s, back == tuple(int(e) for e in y), code.render(), list(back))
            census = small_J_census(B, budget)
            space.inequality(s, census.count, min(census.codeword_space, entropy_space_bound(budget)), slack=0)
            if kappa is None and not census.vacuous:
                lemma.inequality(s, census.count, census.bound, slack=0)
    return [trip, space, lemma]


def check_x_roundtrip(config: ExperimentConfig, settings: int, n_max: int = 12, eta: float = 0.9) -> list[CheckResult]:
    trip = CheckResult("encode_x_roundtrip")
    space = CheckResult("bad_x_census_codewords")
    lemma = CheckResult("bad_x_census_bound")
    skipped = 0
    for i in range(settings):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(4, n_max + 1))
        beta = float(rng.uniform(0.3, 0.9))
        size = math.ceil(2.0 ** (beta * n))
        B = VectorSet(n, np.sort(rng.choice(1 << n, size=size, replace=False)).astype(np.uint64))
        budget = Budget.for_set(B, max(B.beta / 6, 1.01 / n))
        eligible = np.flatnonzero(J_sizes(B, budget.kappa) > budget.t_y_raw)
        if eligible.size == 0:
            skipped += 1
            continue
        y = B.signs[int(rng.choice(eligible))]
        X = all_directions(n)
        # at these sizes the solved tau gives floor(tau n) = 0 almost always; a
        # looser tau also exercises the r part of the codeword
        for tau in (budget.tau, ROUNDTRIP_TAU):
            enc = AdjacentEncoder(B, y, eta, replace(budget, tau=tau))
            codes = enc.encode_many(X)
            keep = [j for j, c in enumerate(codes) if c is not None]
            decoded = enc.decode_many([codes[j] for j in keep])
            for j, back in zip(keep, decoded):
                trip.equality(s, back == tuple(int(e) for e in X[j]), codes[j].render(), list(back))
        census = bad_x_census(B, y, eta, budget)
        space.inequality(s, census.count, census.codeword_space, slack=0)
        # the integer floors allow a factor 2 over the real-valued bound
        lemma.inequality(s, census.count, 2 * census.bound, slack=0)
    if skipped:
        trip.notes.append(f"{skipped} settings had no member with large J(y)")
    return [trip, space, lemma]


def suite_encodings(config: ExperimentConfig) -> list[CheckResult]:
    settings = min(config.instances, 50)
    n_max = min(config.n, 12)
    return check_y_roundtrip(config, settings, n_max) + check_x_roundtrip(config, settings, n_max)


# ---------------------------------------------------------------------------
# structure-oracles

def check_r_ell(config: ExperimentConfig, count: int, n_max: int = 8, ell_max: int = 3) -> CheckResult:
    res = CheckResult("r_ell_vs_brute_force")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        cube = random_cube(rng, int(rng.integers(1, n_max + 1)), mag=9)
        for ell in range(ell_max + 1):
            fast, slow = r_ell(cube, ell), oracles.brute_r_ell(cube.pairs, ell)
            res.equality(s, fast == slow, fast, slow)
    return res


def check_moments(config: ExperimentConfig, count: int, g_max: int = 6, ell_max: int = 3) -> list[CheckResult]:
    exact = CheckResult("moment_exact_vs_brute_force")
    quad = CheckResult("moment_exact_vs_quadrature")
    mean = CheckResult("mean_D_is_half_G")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        d = rng.integers(-12, 13, size=int(rng.integers(1, g_max + 1))).tolist()
        for ell in range(1, ell_max + 1):
            m = d_moment_exact(d, ell)
            brute = Fraction(oracles.brute_zero_sum_count(d, ell), 4 ** ell)
            exact.equality(s, m == brute, m, brute)
            q = d_moment_quadrature(d, ell)
            quad.inequality(s, abs(float(m) - q), 1e-8, slack=0)
        nodes = 8 * max(1, max(abs(e) for e in d)) + 8
        numeric = oracles.riemann_mean(lambda t: d_function(d, range(len(d)), t), nodes)
        mean.inequality(s, abs(float(d_mean_exact(d)) - numeric), 1e-9, slack=0)
    return [exact, quad, mean]


def _brute_sidon_counts(S):
    v = np.asarray(S, dtype=np.int64)
    pair = (v[:, None] + v[None, :]).ravel()
    _, c = np.unique(pair, return_counts=True)
    signed = np.concatenate([v, -v])
    spair = (signed[:, None] + signed[None, :]).ravel()
    _, sc = np.unique(spair, return_counts=True)
    return int((c * c).sum()), int((sc * sc).sum())


def check_sidon(config: ExperimentConfig, count: int) -> CheckResult:
    res = CheckResult("sidon_counts_vs_brute_force")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        S = rng.choice(np.arange(1, 200), size=int(rng.integers(1, 12)), replace=False).tolist()
        rep = sidon_classify(S)
        brute = _brute_sidon_counts(S)
        res.equality(s, (rep.sum_count, rep.signed_count) == brute, [rep.sum_count, rep.signed_count], list(brute))
    return res


def check_entropy_solver(config: ExperimentConfig, lams=(0.1, 0.3, 0.5, 1.0)) -> CheckResult:
    res = CheckResult("entropy_parameter_residuals")
    for lam in lams:
        p = solve_parameters(lam)
        r1, r2 = p.residuals()
        res.inequality(int(lam * 1000), max(abs(r1), abs(r2)), 1e-10, slack=0)
    res.equality(1000, solve_parameters(1.0).kappa == 0.25, solve_parameters(1.0).kappa, 0.25)
    return res


def suite_structure(config: ExperimentConfig) -> list[CheckResult]:
    k = min(config.instances, 100)
    return [check_r_ell(config, k), *check_moments(config, k), check_sidon(config, k), check_entropy_solver(config)]


# ---------------------------------------------------------------------------
# distribution-oracles

def check_cube_sum(config: ExperimentConfig, count: int, n_max: int = 12) -> CheckResult:
    res = CheckResult("cube_sum_vs_enumeration")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        w = rng.integers(-20, 21, size=int(rng.integers(1, n_max + 1))).tolist()
        fast = cube_sum_distribution(w).as_dict()
        slow = oracles.enumerated_cube_sum(w)
        res.equality(s, fast == slow, len(fast), len(slow))
    return res


def check_inner_products(config: ExperimentConfig, count: int, n_max: int = 10) -> CheckResult:
    res = CheckResult("inner_product_vs_naive")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(1, n_max + 1))
        B = random_set(rng, n, 200)
        x = random_cube(rng, n).point(int(rng.integers(0, 1 << n)))
        fast = inner_product_distribution(x, B).as_dict()
        slow = oracles.naive_distribution(x.tolist(), B.signs.tolist())
        res.equality(s, fast == slow)
    return res


def check_census(config: ExperimentConfig, count: int, n_max: int = 6) -> CheckResult:
    res = CheckResult("census_vs_naive")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(1, n_max + 1))
        cube = random_cube(rng, n)
        B = VectorSet.full(n) if rng.random() < 0.2 else random_set(rng, n, 1 << n)
        thr = Fraction(int(rng.integers(1, 8)), 8)
        rec = direction_census(cube, B, thr, keep_per_direction=True, block=int(rng.integers(1, 9)))
        exceed, table = oracles.naive_census(cube.pairs, B.signs.tolist(), thr)
        rows_ok = all(table[idx] == (conc, k) for idx, conc, k in rec.per_direction)
        res.equality(s, rec.exceed_count == exceed and rows_ok and len(rec.per_direction) == 1 << n,
                     rec.exceed_count, exceed)
    return res


def check_interval_mass(config: ExperimentConfig, count: int, n_max: int = 8) -> CheckResult:
    res = CheckResult("interval_mass_vs_naive")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        n = int(rng.integers(1, n_max + 1))
        A, B = random_set(rng, n, 64), random_set(rng, n, 64)
        c = float(rng.uniform(0, 1.5))
        limit = c * math.sqrt(n)
        hits = sum(1 for x in A.signs.tolist() for y in B.signs.tolist()
                   if abs(sum(a * b for a, b in zip(x, y))) <= limit)
        res.equality(s, interval_mass(A, B, c) == Fraction(hits, len(A) * len(B)))
    return res


def suite_distribution(config: ExperimentConfig) -> list[CheckResult]:
    k = min(config.instances, 200)
    return [
        check_cube_sum(config, k, n_max=min(config.n, 12)),
        check_inner_products(config, k),
        check_census(config, min(k, 60)),
        check_interval_mass(config, k),
    ]


# ---------------------------------------------------------------------------
# analytic-claims

def check_sine_gap(config: ExperimentConfig, side: int = 48) -> CheckResult:
    res = CheckResult("sine_gap")
    phi = np.linspace(-math.pi, math.pi, side)[:, None, None, None]
    eta = np.linspace(0, math.pi, side)[None, :, None, None]
    vals = np.arange(-5, 6)
    u = vals[None, None, :, None]
    v = vals[None, None, None, :]
    gap = sine_max_gap(phi, eta, u, v)
    keep = np.broadcast_to(u != v, gap.achieved.shape)
    ach, bnd = gap.achieved[keep], gap.bound[keep]
    res.instances = int(ach.size)
    res.worst_margin = float((ach - bnd).min())
    bad = np.flatnonzero(ach < bnd - 1e-12)
    res.violations = int(bad.size)
    for b in bad[:20]:
        res.records.append({"check": res.name, "instance_seed": int(b), "lhs": float(bnd[b]),
                            "rhs": float(ach[b]), "margin": float(ach[b] - bnd[b])})
    return res


def check_convexity(config: ExperimentConfig, side: int = 50) -> CheckResult:
    res = CheckResult("convexity_gap_nonnegative")
    xi = np.linspace(0, 0.5, side)[:, None, None]
    p = np.linspace(0, 1, side)[None, :, None]
    nu = np.linspace(0, 1, side)[None, None, :]
    gap = convexity_gap(xi, p, nu)
    res.instances = int(gap.size)
    res.worst_margin = float(gap.min())
    res.violations = int(np.count_nonzero(gap < -1e-12))
    return res


def check_c1_lower_bound(config: ExperimentConfig, kappas=None, nu_points: int = 5000) -> CheckResult:
    res = CheckResult("convexity_ratio_above_c1")
    kappas = np.linspace(0.02, 0.38, 20) if kappas is None else kappas
    nu = np.concatenate([np.logspace(-8, -2, 200), np.linspace(0.01, 1, nu_points - 200)])
    for kappa in kappas:
        c1 = c1_estimate(float(kappa))
        ratio = convexity_gap(0.5, float(kappa), nu) / nu
        res.instances += int(ratio.size)
        res.worst_margin = min(res.worst_margin, float((ratio - c1).min()))
        bad = np.flatnonzero(ratio < c1 - 1e-9)
        res.violations += int(bad.size)
        for b in bad[:5]:
            res.records.append({"check": res.name, "instance_seed": float(kappa), "lhs": c1,
                                "rhs": float(ratio[b]), "margin": float(ratio[b] - c1)})
    return res


def check_sumset(config: ExperimentConfig, count: int = 2000, per: int = 64) -> CheckResult:
    res = CheckResult("sumset_containment")
    for i in range(count):
        s, rng = _rng(config.seed, i)
        d = rng.integers(-30, 31, size=int(rng.integers(1, 9))).tolist()
        G = list(range(len(d)))
        m = int(rng.integers(1, 6))
        th = rng.random((per, m))
        lhs = d_function(d, G, np.mod(th.sum(axis=1), 1.0))
        rhs = m * m * d_function(d, G, th.ravel()).reshape(per, m).max(axis=1)
        for a, b in zip(np.atleast_1d(lhs), rhs):
            res.inequality(s, float(a), float(b))
    return res


def suite_analytic(config: ExperimentConfig) -> list[CheckResult]:
    return [check_sine_gap(config), check_convexity(config), check_c1_lower_bound(config), check_sumset(config)]


_SUITES: dict[str, Callable[[ExperimentConfig], list[CheckResult]]] = {
    "fourier-inequalities": suite_fourier,
    "encodings": suite_encodings,
    "structure-oracles": suite_structure,
    "distribution-oracles": suite_distribution,
    "analytic-claims": suite_analytic,
}


def verify(suite: str, config: ExperimentConfig | None = None) -> SuiteReport:
    if suite not in _SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    config = config or ExperimentConfig()
    return SuiteReport(suite, config.seed, _SUITES[suite](config))
