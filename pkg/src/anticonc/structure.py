"""Additive structure of two-cubes and the Halasz-type bound calculus.

Zero-sum counts are computed as constant coefficients of Laurent
polynomials ``(sum_j z^{d_j} + z^{-d_j})^{2l}``.  Because that polynomial
is symmetric, the constant coefficient of ``P^{2l}`` is the sum of the
squared coefficients of ``P^l``, which halves the work.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .domain import TwoCube
from .errors import DomainError, NoSolution, OverflowRisk

MAGNITUDE_BOUND = 1 << 62
DENSE_LIMIT = 1 << 23
DEFAULT_ELL_MAX = 8
DEFAULT_NU_GRID_SIZE = 64


# ---------------------------------------------------------------------------
# zero-sum counting

def _laurent_power(mults: dict[int, int], ell: int) -> dict[int, int] | np.ndarray:
    """Coefficients of (sum_v m_v (z^v + z^-v))^ell.

    Returns a dense array centred on exponent 0 when the span is small,
    otherwise a sparse dict.  Python integers throughout where int64 could
    overflow.
    """
    span = max(mults)
    total_terms = 2 * sum(mults.values())
    width = 2 * ell * span + 1
    if width <= DENSE_LIMIT:
        dtype = np.int64 if total_terms ** ell < (1 << 62) else object
        # the base has few nonzero terms, so multiply by shifted adds
        terms = [(v, m) for v, m in mults.items() if v] 
        const = mults.get(0, 0)
        out = np.zeros(width, dtype=dtype)
        centre = ell * span
        out[centre] = 1
        lo = hi = centre  # live support of the running product
        for _ in range(ell):
            nxt = np.zeros(width, dtype=dtype)
            cur = out[lo:hi + 1]
            if const:
                nxt[lo:hi + 1] += 2 * const * cur
            for v, m in terms:
                nxt[lo + v:hi + v + 1] += m * cur
                nxt[lo - v:hi - v + 1] += m * cur
            out, lo, hi = nxt, lo - span, hi + span
        return out
    poly: dict[int, int] = {0: 1}
    for _ in range(ell):
        nxt: Counter = Counter()
        for s, c in poly.items():
            for v, m in mults.items():
                nxt[s + v] += c * m
                nxt[s - v] += c * m
        poly = dict(nxt)
    return poly


def zero_sum_count(differences: Sequence[int], ell: int) -> int:
    """Number of (eps, j) in {+-1}^{2l} x [m]^{2l} with sum eps_i d_{j_i} = 0."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    if ell == 0:
        return 1
    diffs = [abs(int(d)) for d in differences]
    if not diffs:
        return 0
    if 2 * ell * max(diffs) > MAGNITUDE_BOUND:
        raise OverflowRisk(f"2*ell*max|d| = {2 * ell * max(diffs)} exceeds the magnitude bound")
    zeros = diffs.count(0)
    nonzero = [d for d in diffs if d]
    if not nonzero:
        return (2 * zeros) ** (2 * ell)
    g = reduce(math.gcd, nonzero)
    mults = Counter(d // g for d in nonzero)
    if zeros:
        # a zero difference contributes z^0 twice; fold it in as a constant
        mults = dict(mults)
        mults[0] = zeros
    coeffs = _laurent_power(dict(mults), ell)
    if isinstance(coeffs, dict):
        return sum(int(c) * int(c) for c in coeffs.values())
    nz = coeffs[coeffs != 0]
    if nz.dtype != object and (nz.size == 0 or int(np.abs(nz).max()) < 1 << 31):
        # squares fit in int64; split the sum so it cannot overflow either
        sq = nz.astype(np.int64) ** 2
        return sum(int(chunk.sum()) for chunk in np.array_split(sq, max(1, sq.size >> 20)))
    return sum(int(c) * int(c) for c in nz.tolist())


def r_ell(A: TwoCube, ell: int) -> int:
    return zero_sum_count(A.differences, ell)


# ---------------------------------------------------------------------------
# Sidon classification

@dataclass(frozen=True)
class SidonReport:
    n: int
    sum_count: int          # ordered solutions of s1 + s2 = s3 + s4
    signed_count: int       # ordered solutions of e1 s1 + e2 s2 = e3 s3 + e4 s4
    sidon_target: int       # 4 * C(n, 2) + n
    weak_limit: int         # 100 n^2
    classification: str     # "sidon" | "weak_sidon" | "neither"


def _pair_sum_collisions(values: Sequence[int]) -> int:
    arr = np.asarray(values, dtype=object if max(map(abs, values)) > 1 << 40 else np.int64)
    sums = Counter((arr[:, None] + arr[None, :]).ravel().tolist())
    return sum(c * c for c in sums.values())


def sidon_classify(S: Iterable[int]) -> SidonReport:
    values = [int(s) for s in S]
    if not values:
        raise DomainError("set must be nonempty")
    if len(set(values)) != len(values):
        raise DomainError("set elements must be distinct")
    n = len(values)
    sum_count = _pair_sum_collisions(values)
    signed_count = _pair_sum_collisions(values + [-s for s in values])
    target = 4 * math.comb(n, 2) + n
    limit = 100 * n * n
    if sum_count == target:
        cls = "sidon"
    elif signed_count <= limit:
        cls = "weak_sidon"
    else:
        cls = "neither"
    return SidonReport(n, sum_count, signed_count, target, limit, cls)


def mian_chowla(n: int) -> list[int]:
    """First n terms of the greedy Sidon sequence 1, 2, 4, 8, 13, 21, ..."""
    seq: list[int] = []
    sums: set[int] = set()
    cand = 1
    while len(seq) < n:
        new = {cand + s for s in seq} | {2 * cand}
        if not new & sums:
            seq.append(cand)
            sums |= new
        cand += 1
    return seq


# ---------------------------------------------------------------------------
# Halasz bound calculus

def halasz_R(A: TwoCube, C: float, ell: int, r: int | None = None) -> float:
    """C^l r_l(A) / n^{2l + 1/2} + exp(-n / C)."""
    if C <= 0 or ell < 1:
        raise ValueError("need C > 0 and ell >= 1")
    n = A.n
    if r is None:
        r = r_ell(A, ell)
    log_term = ell * math.log(C) + math.log(r) - (2 * ell + 0.5) * math.log(n)
    return math.exp(log_term) + math.exp(-n / C)


def halasz_R_table(A: TwoCube, C: float, ell_max: int = DEFAULT_ELL_MAX) -> dict[int, float]:
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    return {ell: halasz_R(A, C, ell) for ell in range(1, ell_max + 1)}


def halasz_R_min(A: TwoCube, C: float, ell_max: int = DEFAULT_ELL_MAX) -> float:
    return min(halasz_R_table(A, C, ell_max).values())


def default_nu_grid(size: int = DEFAULT_NU_GRID_SIZE) -> np.ndarray:
    return np.logspace(-6, 0, size)


def mu_from_R(R: float, n: int, C: float, nu_grid=None) -> tuple[float, float | None]:
    """Smallest mu over the grid with mu^{(1+nu)^2} >= 3 e^{-nu n/C} + R/(50 sqrt nu).

    Returns (1.0, None) when no grid point admits mu <= 1.
    """
    grid = default_nu_grid() if nu_grid is None else np.asarray(nu_grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid > 1):
        raise DomainError("nu grid must lie in (0, 1]")
    best, witness = 1.0, None
    for nu in grid:
        rhs = 3.0 * math.exp(-nu * n / C) + R / (50.0 * math.sqrt(nu))
        if rhs > 1.0:
            continue
        mu = rhs ** (1.0 / (1.0 + nu) ** 2)
        if mu < best or witness is None:
            best, witness = float(mu), float(nu)
    return best, witness


def mu_bound(A: TwoCube, C: float, nu_grid=None, ell_max: int = DEFAULT_ELL_MAX):
    """(mu, nu_witness) for the Halasz-type bound; see ``mu_from_R``."""
    return mu_from_R(halasz_R_min(A, C, ell_max), A.n, C, nu_grid)


# ---------------------------------------------------------------------------
# entropy parameters

def binary_entropy(xi: float) -> float:
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"entropy argument {xi} outside [0, 1]")
    if xi == 0.0 or xi == 1.0:
        return 0.0
    return -xi * math.log2(xi) - (1.0 - xi) * math.log2(1.0 - xi)


def _bisect_increasing(f, lo: float, hi: float, target: float) -> float:
    """Root of f(x) = target for increasing f on [lo, hi]."""
    flo, fhi = f(lo) - target, f(hi) - target
    if fhi == 0.0:
        return hi
    if flo == 0.0:
        return lo
    if flo > 0 or fhi < 0:
        raise NoSolution(f"target {target} outside [{f(lo)}, {f(hi)}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid) - target
        if fm == 0.0:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(f(lo) - target) <= abs(f(hi) - target) else hi


TAU_BRANCH_END = 2.0 / 3.0


@dataclass(frozen=True)
class EntropyParameters:
    lam: float
    kappa: float
    tau: float
    kappa_exponent: float  # log2(1/kappa); the entropy argument is its reciprocal

    def residuals(self) -> tuple[float, float]:
        return (
            binary_entropy(1.0 / self.kappa_exponent) - self.lam,
            self.tau + binary_entropy(self.tau) - self.lam,
        )


def solve_parameters(lam: float) -> EntropyParameters:
    """kappa, tau with H(1/log2(1/kappa)) = tau + H(tau) = lam.

    Small-kappa branch (1/log2(1/kappa) <= 1/2) and the increasing branch of
    tau + H(tau) (tau <= 2/3).
    """
    if not 0.0 < lam <= 1.0:
        raise NoSolution(f"lambda must lie in (0, 1], got {lam}")
    a = _bisect_increasing(binary_entropy, 0.0, 0.5, lam)
    if a <= 0.0:
        raise NoSolution(f"lambda {lam} too small to represent kappa")
    exponent = 1.0 / a
    kappa = 2.0 ** (-exponent)
    if kappa == 0.0:
        raise NoSolution(f"kappa underflows for lambda {lam}")
    tau = _bisect_increasing(lambda t: t + binary_entropy(t), 0.0, TAU_BRANCH_END, lam)
    return EntropyParameters(lam=lam, kappa=kappa, tau=tau, kappa_exponent=exponent)


# ---------------------------------------------------------------------------
# profile

@dataclass
class StructureProfile:
    n: int
    differences: tuple[int, ...]
    r: dict[int, int]
    sidon: SidonReport | None
    C: float
    R_values: dict[int, float]
    R_min: float
    mu: float
    nu_witness: float | None
    ell_max: int
    nu_grid_size: int
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "differences": list(self.differences),
            "r": {str(k): v for k, v in self.r.items()},
            "sidon": None if self.sidon is None else self.sidon.__dict__,
            "C": repr(float(self.C)),
            "R": {str(k): repr(float(v)) for k, v in self.R_values.items()},
            "R_min": repr(float(self.R_min)),
            "mu": repr(float(self.mu)),
            "nu_witness": None if self.nu_witness is None else repr(float(self.nu_witness)),
            "ell_max": self.ell_max,
            "nu_grid_size": self.nu_grid_size,
            "notes": self.notes,
        }
        return json.dumps(payload, sort_keys=True)


def structure_profile(
    A: TwoCube,
    C: float,
    ell_max: int = DEFAULT_ELL_MAX,
    nu_grid_size: int = DEFAULT_NU_GRID_SIZE,
) -> StructureProfile:
    r = {ell: r_ell(A, ell) for ell in range(1, ell_max + 1)}
    R_values = {ell: halasz_R(A, C, ell, r[ell]) for ell in r}
    R_min = min(R_values.values())
    mu, nu = mu_from_R(R_min, A.n, C, default_nu_grid(nu_grid_size))
    abs_d = [abs(d) for d in A.differences]
    sidon = sidon_classify(abs_d) if len(set(abs_d)) == len(abs_d) else None
    notes = [f"R_C infimum truncated at ell <= {ell_max}", f"nu grid: {nu_grid_size} log-spaced points in [1e-6, 1]"]
    if sidon is None:
        notes.append("|d_j| not distinct; Sidon classification skipped")
    return StructureProfile(A.n, A.differences, r, sidon, C, R_values, R_min, mu, nu, ell_max, nu_grid_size, notes)
