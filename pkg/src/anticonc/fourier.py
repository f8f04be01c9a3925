"""Fourier side: coefficients of <x, Y>, conditional profiles, inequality checkers.

Conditional quantities for Y uniform on B are organised on the prefix tree
of B.  The node for prefix y_{<j} carries the two child counts (giving
gamma_j) and, for a fixed direction and angle, the conditional expectations

    W(node) = E[exp(i eta <x_{>=j}, Y_{>=j}>) | Y_{<j} = prefix]

computed bottom-up.  The half phase at a node is arg(W(child+) conj W(child-)) / 2
with arg taken in (-pi, pi]; when the product is (numerically) zero the
phase is set to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .distribution import inner_product_distribution
from .domain import CubeSubset, VectorSet, as_direction, pack_signs
from .errors import (
    BadConstant,
    DimensionMismatch,
    DomainError,
    GridTooCoarse,
    IndexOutOfRange,
    NotInSet,
)
from .structure import zero_sum_count

ZERO_PRODUCT_TOL = 1e-14
CHECK_SLACK = 1e-9


class InequalityCheck(NamedTuple):
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def holds(self, slack: float = CHECK_SLACK) -> bool:
        return self.lhs <= self.rhs + slack


def _half_angle(z: np.ndarray) -> np.ndarray:
    ang = np.angle(z)
    ang = np.where(ang <= -np.pi, np.pi, ang)
    return ang / 2.0


# ---------------------------------------------------------------------------
# Fourier coefficient and the averaged bound

def fourier_coefficient(x: Sequence[int], B: VectorSet, theta: float) -> complex:
    """E_Y exp(2 pi i theta <x, Y>)."""
    dist = inner_product_distribution(x, B)
    ks = np.asarray(dist.support, dtype=float)
    w = np.asarray(dist.weights, dtype=float)
    return complex(np.sum(w * np.exp(2j * np.pi * theta * ks)) / dist.total)


class StarBound(NamedTuple):
    value: float
    quadrature_error: float
    nodes: int


def default_nodes(x: Sequence[int]) -> int:
    return 4 * (int(np.abs(np.asarray(x)).sum()) + 1)


def _modulus_on_grid(dist, nodes: int) -> np.ndarray:
    p = np.zeros(nodes)
    for k, w in zip(dist.support, dist.weights):
        p[k % nodes] += w
    p /= dist.total
    return np.abs(np.fft.ifft(p) * nodes)


def star_bound(x: Sequence[int], B: VectorSet, nodes: int | None = None) -> StarBound:
    """Uniform-grid mean of |F(theta)| over theta in [0, 1).

    With at least 2 sum|x_j| + 1 nodes the grid mean is itself an upper
    bound on every point mass (discrete Fourier inversion has no aliasing),
    so the returned value dominates the concentration probability exactly.
    The quadrature error against the continuous mean is estimated by
    doubling the grid.
    """
    width = 2 * int(np.abs(np.asarray(x)).sum()) + 1
    if nodes is None:
        nodes = default_nodes(x)
    if nodes < width:
        raise GridTooCoarse(f"{nodes} nodes < support width {width}")
    dist = inner_product_distribution(x, B)
    coarse = float(_modulus_on_grid(dist, nodes).mean())
    fine = float(_modulus_on_grid(dist, 2 * nodes).mean())
    return StarBound(coarse, abs(fine - coarse), nodes)


def parseval_gap(x: Sequence[int], B: VectorSet) -> float:
    """sum_k p(k)^2 minus the grid mean of |F|^2 (exact trig polynomial)."""
    dist = inner_product_distribution(x, B)
    nodes = 2 * (2 * int(np.abs(np.asarray(x)).sum()) + 1)
    p2 = float(sum(m * m for m in dist.masses))
    return p2 - float(np.mean(_modulus_on_grid(dist, nodes) ** 2))


# ---------------------------------------------------------------------------
# prefix tree

class PrefixTree:
    """Prefix tree of a vector set with per-node child counts."""

    def __init__(self, B: VectorSet):
        n = B.n
        self.B = B
        self.n = n
        keys = [None] * (n + 1)
        counts = [None] * (n + 1)
        plus = [None] * n
        minus = [None] * n
        keys[n] = np.asarray(B.codes, dtype=np.uint64)
        counts[n] = np.ones(keys[n].size, dtype=np.int64)
        for d in range(n - 1, -1, -1):
            child = keys[d + 1]
            parent, inv = np.unique(child >> np.uint64(1), return_inverse=True)
            bit = (child & np.uint64(1)).astype(bool)
            p_idx = np.full(parent.size, -1, dtype=np.int64)
            m_idx = np.full(parent.size, -1, dtype=np.int64)
            idx = np.arange(child.size)
            p_idx[inv[bit]] = idx[bit]
            m_idx[inv[~bit]] = idx[~bit]
            keys[d] = parent
            counts[d] = np.bincount(inv, weights=counts[d + 1], minlength=parent.size).astype(np.int64)
            plus[d], minus[d] = p_idx, m_idx
        self.keys, self.counts, self.plus, self.minus = keys, counts, plus, minus
        self.cnt_plus = [np.where(p >= 0, counts[d + 1][p], 0) for d, p in enumerate(plus)]
        self.cnt_minus = [np.where(m >= 0, counts[d + 1][m], 0) for d, m in enumerate(minus)]

    def gamma(self, d: int) -> np.ndarray:
        return np.minimum(self.cnt_plus[d], self.cnt_minus[d]) / self.counts[d]

    def in_J(self, d: int, kappa: float) -> np.ndarray:
        return np.minimum(self.cnt_plus[d], self.cnt_minus[d]) >= kappa * self.counts[d]

    def path(self, y: Sequence[int]) -> list[int]:
        """Node index at every depth 0..n-1 along member y."""
        self.B.index_of(y)
        code = np.uint64(pack_signs(y))
        return [
            int(np.searchsorted(self.keys[d], code >> np.uint64(self.n - d)))
            for d in range(self.n)
        ]

    def member_paths(self) -> np.ndarray:
        """n x |B| node indices for all members (code order)."""
        codes = self.keys[self.n]
        return np.stack([
            np.searchsorted(self.keys[d], codes >> np.uint64(self.n - d))
            for d in range(self.n)
        ])

    def walk(self, x: np.ndarray, eta: float):
        """Bottom-up conditional expectations and half phases.

        Returns (W, phi, zero_product) lists indexed by depth; W[d] has one
        entry per node at depth d, W[n] is all ones.
        """
        n = self.n
        W = [None] * (n + 1)
        phi = [None] * n
        zero = [None] * n
        W[n] = np.ones(self.keys[n].size, dtype=complex)
        for d in range(n - 1, -1, -1):
            p_idx, m_idx = self.plus[d], self.minus[d]
            Wp = np.where(p_idx >= 0, W[d + 1][np.maximum(p_idx, 0)], 0)
            Wm = np.where(m_idx >= 0, W[d + 1][np.maximum(m_idx, 0)], 0)
            tot = self.counts[d]
            rot = np.exp(1j * eta * x[d])
            W[d] = (self.cnt_plus[d] * rot * Wp + self.cnt_minus[d] * np.conj(rot) * Wm) / tot
            prod = Wp * np.conj(Wm)
            both = (self.cnt_plus[d] > 0) & (self.cnt_minus[d] > 0)
            tiny = np.abs(prod) <= ZERO_PRODUCT_TOL
            phi[d] = np.where(both & ~tiny, _half_angle(prod), 0.0)
            zero[d] = both & tiny
        return W, phi, zero

    def expect_product(self, factors: list[np.ndarray]) -> float:
        """E_Y prod_d factors[d][node_d(Y)] by top-down aggregation."""
        n = self.n
        R = np.ones(self.keys[n].size)
        for d in range(n - 1, -1, -1):
            p_idx, m_idx = self.plus[d], self.minus[d]
            Rp = np.where(p_idx >= 0, R[np.maximum(p_idx, 0)], 0.0)
            Rm = np.where(m_idx >= 0, R[np.maximum(m_idx, 0)], 0.0)
            R = factors[d] * (self.cnt_plus[d] * Rp + self.cnt_minus[d] * Rm) / self.counts[d]
        return float(R[0])


# ---------------------------------------------------------------------------
# profiles

@dataclass(frozen=True)
class ConditionalProfile:
    gamma: tuple[Fraction, ...]
    J: tuple[int, ...]
    kappa: float


@dataclass(frozen=True)
class PhaseProfile:
    phi: tuple[float, ...]
    eta: float
    J: tuple[int, ...]
    G_theta: tuple[int, ...]
    zero_product: tuple[int, ...]   # gamma_j > 0 but a conditional expectation vanished
    half_phase_convention: str = "arg in (-pi, pi], phi = arg/2"


@dataclass(frozen=True)
class SuffixProfile:
    mu: tuple[Fraction, ...]
    Jprime: tuple[int, ...]
    kappa: float

    def G_cap(self, conditional: ConditionalProfile) -> tuple[int, ...]:
        return tuple(sorted(set(self.Jprime) & set(conditional.J)))


def _check_kappa(kappa: float) -> None:
    if not 0.0 < kappa < 0.5:
        raise DomainError(f"kappa must lie in (0, 1/2), got {kappa}")


def _require_member(B: VectorSet, y) -> None:
    if y not in B:
        raise NotInSet("y is not a member of B")


def conditional_profile(B: VectorSet, y: Sequence[int], kappa: float) -> ConditionalProfile:
    _check_kappa(kappa)
    _require_member(B, y)
    tree = PrefixTree(B)
    path = tree.path(y)
    gamma = []
    for d, node in enumerate(path):
        lo = min(int(tree.cnt_plus[d][node]), int(tree.cnt_minus[d][node]))
        gamma.append(Fraction(lo, int(tree.counts[d][node])))
    J = tuple(j for j, g in enumerate(gamma) if g >= kappa)
    return ConditionalProfile(tuple(gamma), J, kappa)


def sign_threshold(eta: float) -> float:
    return math.sin(2 * eta) ** 2 / 4.0


def phase_profile(
    x: Sequence[int], B: VectorSet, y: Sequence[int], eta: float, kappa: float
) -> PhaseProfile:
    x = as_direction(x, B.n)
    _check_kappa(kappa)
    _require_member(B, y)
    tree = PrefixTree(B)
    path = tree.path(y)
    _, phi_levels, zero_levels = tree.walk(x, eta)
    phi = tuple(float(phi_levels[d][node]) for d, node in enumerate(path))
    zero = tuple(d for d, node in enumerate(path) if zero_levels[d][node])
    J = tuple(d for d, node in enumerate(path) if tree.in_J(d, kappa)[node])
    thr = sign_threshold(eta)
    G = tuple(j for j in J if math.sin(phi[j] + x[j] * eta) ** 2 >= thr)
    return PhaseProfile(phi, eta, J, G, zero)


def conditional_phases(
    B: VectorSet, y: Sequence[int], X: np.ndarray, eta: float, columns: Sequence[int] | None = None
) -> np.ndarray:
    """phi_j(x, y) for every row x of X, directly from conditional sums.

    Independent of the prefix-tree route; used where y is fixed and many x
    vary (encodings, the averaged lemma).  ``columns`` restricts the work to
    the listed coordinates; other entries are left at 0.
    """
    _require_member(B, y)
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    Ys = B.signs.astype(np.int64)
    n = B.n
    phi = np.zeros((X.shape[0], n))
    mask = np.ones(Ys.shape[0], dtype=bool)
    wanted = set(range(n - 1)) if columns is None else set(columns)
    for j in range(n - 1):
        if j not in wanted:
            mask &= Ys[:, j] == y[j]
            continue
        plus = mask & (Ys[:, j] == 1)
        minus = mask & (Ys[:, j] == -1)
        if plus.any() and minus.any():
            tail = X[:, j + 1:]
            Zp = np.exp(1j * eta * (tail @ Ys[plus, j + 1:].T)).mean(axis=1)
            Zm = np.exp(1j * eta * (tail @ Ys[minus, j + 1:].T)).mean(axis=1)
            prod = Zp * np.conj(Zm)
            phi[:, j] = np.where(np.abs(prod) <= ZERO_PRODUCT_TOL, 0.0, _half_angle(prod))
        mask &= Ys[:, j] == y[j]
    return phi


def suffix_counts(A0: CubeSubset) -> tuple[np.ndarray, np.ndarray]:
    """(min child count, suffix count) per (element, coordinate) of A0.

    mu_j(x) = min / count, conditioning on x_{>j}.
    """
    n = A0.n
    codes = np.asarray(A0.choices.codes, dtype=np.uint64)
    lo = np.zeros((codes.size, n), dtype=np.int64)
    tot = np.zeros((codes.size, n), dtype=np.int64)
    for j in range(n):
        tail_bits = n - 1 - j
        suffix = codes & np.uint64((1 << tail_bits) - 1)
        bit = ((codes >> np.uint64(tail_bits)) & np.uint64(1)).astype(np.int64)
        keys, inv = np.unique(suffix, return_inverse=True)
        total = np.bincount(inv, minlength=keys.size)
        ones = np.bincount(inv, weights=bit, minlength=keys.size).astype(np.int64)
        lo[:, j] = np.minimum(ones, total - ones)[inv]
        tot[:, j] = total[inv]
    return lo, tot


def suffix_profile(A0: CubeSubset, x: Sequence[int], kappa: float) -> SuffixProfile:
    _check_kappa(kappa)
    i = A0.index_of(x)
    lo, tot = suffix_counts(A0)
    mu = tuple(Fraction(int(a), int(b)) for a, b in zip(lo[i], tot[i]))
    return SuffixProfile(mu, tuple(j for j, m in enumerate(mu) if m >= kappa), kappa)


# ---------------------------------------------------------------------------
# single-direction inequalities

def lemma_tech_check(x: Sequence[int], B: VectorSet, eta: float, tree: PrefixTree | None = None) -> InequalityCheck:
    """|E e^{i eta <x,Y>}|^2 versus E prod_j (1 - gamma_j sin^2(phi_j + x_j eta))."""
    x = as_direction(x, B.n)
    tree = tree or PrefixTree(B)
    W, phi, _ = tree.walk(x, eta)
    factors = [1.0 - tree.gamma(d) * np.sin(phi[d] + x[d] * eta) ** 2 for d in range(B.n)]
    return InequalityCheck(float(abs(W[0][0]) ** 2), tree.expect_product(factors))


def lemma_techU_check(
    x: Sequence[int],
    B: VectorSet,
    eta: float,
    nu: float,
    kappa: float,
    c0: float,
    tree: PrefixTree | None = None,
) -> InequalityCheck:
    """|E e^{i eta <x,Y>}|^{1+nu} versus E prod_{j in J} (1 - c0 nu sin^2(phi_j + x_j eta))."""
    x = as_direction(x, B.n)
    _check_c0(kappa, c0)
    if not 0.0 < nu <= 1.0:
        raise DomainError(f"nu must lie in (0, 1], got {nu}")
    tree = tree or PrefixTree(B)
    W, phi, _ = tree.walk(x, eta)
    factors = [
        np.where(tree.in_J(d, kappa), 1.0 - c0 * nu * np.sin(phi[d] + x[d] * eta) ** 2, 1.0)
        for d in range(B.n)
    ]
    return InequalityCheck(float(abs(W[0][0]) ** (1.0 + nu)), tree.expect_product(factors))


def _check_c0(kappa: float, c0: float) -> None:
    _check_kappa(kappa)
    limit = min(c1_estimate(kappa), kappa * (1 - kappa))
    if not 0.0 < c0 <= limit:
        raise BadConstant(f"c0 = {c0} outside (0, {limit}]")


def max_c0(kappa: float) -> float:
    return min(c1_estimate(kappa), kappa * (1 - kappa))


def averaged_constant(kappa: float, c0: float) -> float:
    """c = min{c1(kappa), kappa c0 / 8}."""
    return min(c1_estimate(kappa), kappa * c0 / 8.0)


def lemma_techU2_check(
    A0: CubeSubset,
    B: VectorSet,
    y: Sequence[int],
    eta: float,
    nu: float,
    kappa: float,
    c0: float,
) -> InequalityCheck:
    """Average over X uniform on A0 with y fixed.

    lhs = (E_X prod_{j in J(y)} (1 - c0 nu sin^2(phi_j + X_j eta)))^{1+nu}
    rhs = E_X exp(-c nu sum_{j in J'(X) & J(y)} sin^2(d_j eta))
    """
    if A0.n != B.n:
        raise DimensionMismatch("A0 and B dimensions differ")
    _check_c0(kappa, c0)
    if not 0.0 < nu <= 1.0:
        raise DomainError(f"nu must lie in (0, 1], got {nu}")
    c = averaged_constant(kappa, c0)
    prof = conditional_profile(B, y, kappa)
    inJ = np.zeros(B.n, dtype=bool)
    inJ[list(prof.J)] = True
    X = A0.points
    phi = conditional_phases(B, y, X, eta)
    s2 = np.sin(phi + X * eta) ** 2
    prod = np.prod(np.where(inJ[None, :], 1.0 - c0 * nu * s2, 1.0), axis=1)
    lhs = float(prod.mean() ** (1.0 + nu))
    lo, tot = suffix_counts(A0)
    G = (lo >= kappa * tot) & inJ[None, :]
    d = np.asarray(A0.cube.differences, dtype=float)
    D = (G * np.sin(d * eta)[None, :] ** 2).sum(axis=1)
    rhs = float(np.exp(-c * nu * D).mean())
    return InequalityCheck(lhs, rhs)


# ---------------------------------------------------------------------------
# the spectral function D

def _diffs_on(differences: Sequence[int], G: Sequence[int]) -> np.ndarray:
    n = len(differences)
    for j in G:
        if not 0 <= j < n:
            raise IndexOutOfRange(f"index {j} outside [0, {n})")
    return np.asarray([differences[j] for j in G], dtype=float)


def d_function(differences: Sequence[int], G: Sequence[int], theta) -> float | np.ndarray:
    """D(theta) = sum_{j in G} sin^2(2 pi theta d_j); vectorised over theta."""
    d = _diffs_on(differences, G)
    th = np.asarray(theta, dtype=float)
    out = (np.sin(2 * np.pi * th[..., None] * d) ** 2).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def d_moment_exact(differences_on_G: Sequence[int], ell: int) -> Fraction:
    """E_theta (|G| - 2 D(theta))^{2l}, exactly.

    |G| - 2D = sum_j cos(4 pi d_j theta), whose 2l-th power averages to
    2^{-2l} times the number of zero-sum signed 2l-tuples.
    """
    if ell == 0:
        return Fraction(1)
    return Fraction(zero_sum_count(list(differences_on_G), ell), 4 ** ell)


def d_moment_quadrature(differences_on_G: Sequence[int], ell: int, nodes: int | None = None) -> float:
    d = np.asarray(differences_on_G, dtype=float)
    if nodes is None:
        nodes = 8 * ell * int(np.abs(d).max(initial=1)) + 16
    th = np.arange(nodes) / nodes
    vals = (d.size - 2 * (np.sin(2 * np.pi * th[:, None] * d) ** 2).sum(axis=1)) ** (2 * ell)
    return float(vals.mean())


def d_mean_exact(differences_on_G: Sequence[int]) -> Fraction:
    """E_theta D(theta) from the l = 1 expansion: (|G| - E(|G| - 2D)) / 2."""
    m = len(differences_on_G)
    # E(|G| - 2D) = E sum_j cos(4 pi d_j theta) = number of zero d_j
    zeros = sum(1 for d in differences_on_G if d == 0)
    return Fraction(m - zeros, 2)


def d_tail(differences: Sequence[int], G: Sequence[int], rho: float, grid: int) -> float:
    """Fraction of theta = k/grid with D(theta) < rho."""
    d = _diffs_on(differences, G)
    need = 4 * int(np.abs(d).max(initial=1))
    if grid < need:
        raise GridTooCoarse(f"grid {grid} < {need}")
    if rho > d.size:
        return 1.0
    vals = d_function(differences, G, np.arange(grid) / grid)
    return float(np.count_nonzero(np.atleast_1d(vals) < rho)) / grid


def d_tail_bound(r_ell_value: int, lam_n: float, ell: int, rho: float) -> float:
    """4 r_l / (lambda n)^{2l + 1/2} * sqrt(rho)."""
    return 4.0 * r_ell_value / lam_n ** (2 * ell + 0.5) * math.sqrt(rho)


def sumset_containment_check(differences: Sequence[int], G: Sequence[int], thetas: Sequence[float]) -> InequalityCheck:
    """D(theta_1 + ... + theta_m) versus m^2 max_i D(theta_i)."""
    th = np.asarray(thetas, dtype=float)
    m = th.size
    if m < 1:
        raise ValueError("need at least one theta")
    lhs = d_function(differences, G, math.fsum(th) % 1.0)
    rhs = m * m * float(np.max(d_function(differences, G, th)))
    return InequalityCheck(float(lhs), rhs)


# ---------------------------------------------------------------------------
# analytic claims

class SineGap(NamedTuple):
    achieved: float | np.ndarray
    bound: float | np.ndarray

    def holds(self, slack: float = 1e-12) -> bool:
        return bool(np.all(self.achieved >= self.bound - slack))

    def violations(self, slack: float = 1e-12) -> int:
        return int(np.count_nonzero(self.achieved < self.bound - slack))


def sine_max_gap(phi, eta, u, v) -> SineGap:
    """max{|sin(phi + eta u)|, |sin(phi + eta v)|} against |sin(eta (u - v))| / 2.

    Broadcasts over array arguments.
    """
    phi, eta, u, v = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (phi, eta, u, v)))
    achieved = np.maximum(np.abs(np.sin(phi + eta * u)), np.abs(np.sin(phi + eta * v)))
    bound = np.abs(np.sin(eta * (u - v))) / 2.0
    if achieved.ndim == 0:
        return SineGap(float(achieved), float(bound))
    return SineGap(achieved, bound)


def convexity_gap(xi, p, nu):
    """(p + (1-p) xi^{1+nu}) - (p + (1-p) xi)^{1+nu}; vectorised."""
    xi_a, p_a, nu_a = (np.asarray(a, dtype=float) for a in (xi, p, nu))
    if np.any((xi_a < 0) | (xi_a > 0.5)) or np.any((p_a < 0) | (p_a > 1)) or np.any((nu_a < 0) | (nu_a > 1)):
        raise DomainError("arguments outside xi in [0,1/2], p in [0,1], nu in [0,1]")
    # same quantity as (p + (1-p) xi^{1+nu}) - s^{1+nu} with s = p + (1-p) xi,
    # written with expm1 so small nu does not cancel catastrophically
    s = p_a + (1 - p_a) * xi_a
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(xi_a > 0, (1 - p_a) * xi_a * np.expm1(nu_a * np.log(xi_a)), 0.0)
        t2 = np.where(s > 0, s * np.expm1(nu_a * np.log(s)), 0.0)
    out = t1 - t2
    return float(out) if out.ndim == 0 else out


def convexity_assumption_holds(kappa: float) -> bool:
    """4^kappa > exp(kappa + kappa^2)."""
    return kappa * math.log(4.0) > kappa + kappa * kappa


@lru_cache(maxsize=64)
def c1_estimate(kappa: float, grid: int = 4096) -> float:
    """min over nu in (0, 1] of Phi(1/2, kappa, nu) / nu.

    The grid is uniform in (0, 1] plus the nu -> 0 limit (the derivative at
    nu = 0), which is where the ratio is smallest for admissible kappa.
    """
    if not 0.0 < kappa < 0.5 or not convexity_assumption_holds(kappa):
        raise DomainError(f"kappa = {kappa} fails 4^kappa > exp(kappa + kappa^2)")
    nu = np.arange(1, grid + 1) / grid
    ratios = convexity_gap(0.5, kappa, nu) / nu
    a = (1 + kappa) / 2
    limit = (1 - kappa) * 0.5 * math.log(0.5) - a * math.log(a)
    value = float(min(ratios.min(), limit))
    if value <= 0:
        raise DomainError(f"non-positive c1 estimate for kappa = {kappa}")
    return value


def claim_ratio_constant(kappa: float, grid: int = 201) -> float:
    """Smallest (1 - ratio) / nu over xi in [0,1/2], p in [kappa, 1-kappa], nu in (0,1].

    ratio = (p + (1-p) xi)^{1+nu} / (p + (1-p) xi^{1+nu}).  This is the
    constant the convexity claim actually delivers over its whole domain;
    it can be smaller than ``c1_estimate`` because the minimum over p sits
    at p = 1 - kappa, not p = kappa.
    """
    xi = np.linspace(0, 0.5, grid)[:, None, None]
    p = np.linspace(kappa, 1 - kappa, grid)[None, :, None]
    nu = np.concatenate([np.logspace(-6, -2, 20), np.linspace(0.01, 1, grid)])[None, None, :]
    ratio = (p + (1 - p) * xi) ** (1 + nu) / (p + (1 - p) * xi ** (1 + nu))
    return float(((1 - ratio) / nu).min())
