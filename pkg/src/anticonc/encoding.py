"""Injective encodings of sign vectors with few high-entropy coordinates.

Two schemes:

* y in B with few coordinates of conditional entropy (|J(y)| small) is
  described by its values on J(y) plus the set S of positions where it took
  the less likely branch.
* x adjacent to a fixed y (few coordinates in G(x, y)) is described by its
  values off J(y), the set G(x, y) and its values on G.  The remaining
  coordinates are forced: decoding from the last coordinate down, exactly
  one sign keeps sin^2(phi_j + x_j eta) strictly below sin^2(2 eta) / 4.

Indices are 0-based everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .domain import VectorSet, codes_to_signs, parse_signs, render_signs
from .errors import (
    DegenerateAngle,
    DomainError,
    HypothesisFailed,
    NotInSet,
    TooLarge,
    Undecodable,
)
from .fourier import PrefixTree, conditional_phases, conditional_profile, sign_threshold
from .structure import binary_entropy, solve_parameters

_FLOOR_EPS = 1e-9
DEFAULT_BUDGET = 1 << 16


def _floor(value: float) -> int:
    return math.floor(value + _FLOOR_EPS)


@dataclass(frozen=True)
class Budget:
    """Parameters tying set size, slack and the entropy thresholds."""

    n: int
    beta: float
    lam: float
    kappa: float
    tau: float

    def __post_init__(self):
        if not self.lam > 1.0 / self.n:
            raise DomainError(f"lambda = {self.lam} must exceed 1/n = {1 / self.n}")
        if not 0.0 < self.kappa < 0.5:
            raise DomainError(f"kappa must lie in (0, 1/2), got {self.kappa}")

    @classmethod
    def for_set(cls, B: VectorSet, lam: float, kappa: float | None = None, tau: float | None = None) -> "Budget":
        params = solve_parameters(lam)
        return cls(
            n=B.n,
            beta=B.beta,
            lam=lam,
            kappa=params.kappa if kappa is None else kappa,
            tau=params.tau if tau is None else tau,
        )

    @property
    def t_y_raw(self) -> int:
        return _floor(self.n * (self.beta - 3 * self.lam))

    @property
    def t_y(self) -> int:
        """Length of the y codeword; clamped at 0 when beta < 3 lambda."""
        return max(self.t_y_raw, 0)

    @property
    def t_x(self) -> int:
        return _floor(self.n * (1 - self.beta + 3 * self.lam))

    @property
    def s(self) -> int:
        return _floor(self.tau * self.n)

    @property
    def s_max(self) -> int:
        """Largest admissible |S|: n / log2(1/kappa)."""
        return _floor(self.n / math.log2(1.0 / self.kappa))


def _subsets_up_to(n: int, k: int) -> int:
    return sum(math.comb(n, i) for i in range(0, min(k, n) + 1)) if k >= 0 else 0


# ---------------------------------------------------------------------------
# codewords

@dataclass(frozen=True)
class YCodeword:
    q: tuple[int, ...]      # values of y on J(y), index order, padded with +1
    q_len: int
    S: tuple[int, ...]

    def render(self) -> str:
        return f"q={render_signs(self.q)};qlen={self.q_len};S={','.join(map(str, self.S))}"


@dataclass(frozen=True)
class XCodeword:
    q: tuple[int, ...]      # values of x off J(y), index order, padded
    q_len: int
    G: tuple[int, ...]
    r: tuple[int, ...]      # values of x on G, descending index order, padded
    r_len: int

    def render(self) -> str:
        return (
            f"q={render_signs(self.q)};qlen={self.q_len};G={','.join(map(str, self.G))};"
            f"r={render_signs(self.r)};rlen={self.r_len}"
        )


def parse_codeword(text: str) -> YCodeword | XCodeword:
    fields = dict(part.split("=", 1) for part in text.strip().split(";"))
    idx = lambda s: tuple(int(t) for t in s.split(",") if t)  # noqa: E731
    if "G" in fields:
        return XCodeword(
            tuple(parse_signs(fields["q"])), int(fields["qlen"]), idx(fields["G"]),
            tuple(parse_signs(fields["r"])), int(fields["rlen"]),
        )
    return YCodeword(tuple(parse_signs(fields["q"])), int(fields["qlen"]), idx(fields["S"]))


def _pad(values: list[int], length: int) -> tuple[int, ...]:
    return tuple(values + [1] * (length - len(values)))


# ---------------------------------------------------------------------------
# y encoding

def chain_rule_probability(B: VectorSet, y: Sequence[int]) -> Fraction:
    """prod_j Pr[Y_j = y_j | Y_{<j} = y_{<j}]; equals 1/|B| for members."""
    tree = PrefixTree(B)
    prob = Fraction(1)
    for d, node in enumerate(tree.path(y)):
        hit = tree.cnt_plus[d][node] if y[d] == 1 else tree.cnt_minus[d][node]
        prob *= Fraction(int(hit), int(tree.counts[d][node]))
    return prob


class MemberEncoder:
    """Encoder/decoder for members of B with small J(y); the prefix tree is built once."""

    def __init__(self, B: VectorSet, budget: Budget):
        self.B, self.budget = B, budget
        self.tree = PrefixTree(B)

    def encode(self, y: Sequence[int]) -> YCodeword:
        y = [int(e) for e in y]
        tree, kappa, t = self.tree, self.budget.kappa, self.budget.t_y
        path = tree.path(y)   # raises NotInSet
        J, S = [], []
        for d, node in enumerate(path):
            if tree.in_J(d, kappa)[node]:
                J.append(d)
                continue
            mine = tree.cnt_plus[d][node] if y[d] == 1 else tree.cnt_minus[d][node]
            if mine < tree.counts[d][node] - mine:
                S.append(d)
        if len(J) > t:
            raise HypothesisFailed(f"|J(y)| = {len(J)} exceeds t = {t}")
        assert len(S) <= self.budget.s_max, "less-likely branches exceed n / log2(1/kappa)"
        return YCodeword(_pad([y[j] for j in J], t), len(J), tuple(S))

    def decode(self, code: YCodeword) -> tuple[int, ...]:
        """Walk down the tree; J membership is read off the decoded prefix."""
        tree, kappa = self.tree, self.budget.kappa
        S = set(code.S)
        q = iter(code.q[:code.q_len])
        node = 0
        y: list[int] = []
        for d in range(self.B.n):
            plus, minus = int(tree.cnt_plus[d][node]), int(tree.cnt_minus[d][node])
            if min(plus, minus) >= kappa * (plus + minus):
                yj = next(q, None)
                if yj is None:
                    raise Undecodable("q exhausted")
            else:
                if plus == minus:
                    raise Undecodable(f"tied branch at coordinate {d} outside J")
                rare = 1 if plus < minus else -1
                yj = rare if d in S else -rare
            child = tree.plus[d][node] if yj == 1 else tree.minus[d][node]
            if child < 0:
                raise Undecodable(f"branch {yj:+d} at coordinate {d} is empty")
            y.append(yj)
            node = int(child)
        if next(q, None) is not None:
            raise Undecodable("unused q entries")
        return tuple(y)


def encode_y(B: VectorSet, y: Sequence[int], budget: Budget) -> YCodeword:
    return MemberEncoder(B, budget).encode(y)


def decode_y(B: VectorSet, code: YCodeword, budget: Budget) -> tuple[int, ...]:
    return MemberEncoder(B, budget).decode(code)


@dataclass(frozen=True)
class CensusBound:
    count: int
    codeword_space: int
    bound: float
    vacuous: bool
    note: str = ""

    @property
    def within_codewords(self) -> bool:
        return self.count <= self.codeword_space

    @property
    def within_bound(self) -> bool:
        return self.count <= self.bound


def J_sizes(B: VectorSet, kappa: float) -> np.ndarray:
    """|J(y)| for every member, in code order."""
    tree = PrefixTree(B)
    paths = tree.member_paths()
    sizes = np.zeros(len(B), dtype=np.int64)
    for d in range(B.n):
        sizes += tree.in_J(d, kappa)[paths[d]]
    return sizes


def small_J_census(B: VectorSet, budget: Budget) -> CensusBound:
    """Members with |J(y)| <= n(beta - 3 lambda) against 2^{n(beta - 2 lambda)}."""
    t = budget.t_y
    count = int(np.count_nonzero(J_sizes(B, budget.kappa) <= t))
    space = (1 << t) * _subsets_up_to(B.n, budget.s_max)
    bound = 2.0 ** (B.n * (budget.beta - 2 * budget.lam))
    vacuous = 3 * budget.lam > budget.beta
    note = "3*lambda > beta: statement is vacuous" if vacuous else ""
    return CensusBound(count, space, bound, vacuous, note)


def entropy_space_bound(budget: Budget) -> float:
    """2^t * 2^{n H(1/log2(1/kappa))}, the lemma's count of codewords."""
    a = 1.0 / math.log2(1.0 / budget.kappa)
    return 2.0 ** (budget.t_y + budget.n * binary_entropy(min(a, 1.0)))


# ---------------------------------------------------------------------------
# x encoding

def _check_angle(eta: float) -> None:
    if abs(math.sin(2 * eta)) < 1e-12:
        raise DegenerateAngle(f"sin(2 eta) = 0 at eta = {eta}")


class AdjacentEncoder:
    """Encoder/decoder for directions x against one fixed high-entropy y.

    J(y) and the coordinate bookkeeping are computed once; ``encode_many``
    and ``decode_many`` work on whole batches, one row per direction.
    """

    def __init__(self, B: VectorSet, y: Sequence[int], eta: float, budget: Budget):
        _check_angle(eta)
        self.B, self.eta, self.budget = B, eta, budget
        self.y = tuple(int(e) for e in y)
        J = conditional_profile(B, self.y, budget.kappa).J
        if len(J) <= budget.t_y_raw:
            raise HypothesisFailed(f"|J(y)| = {len(J)} <= n(beta - 3 lambda)")
        self.J = J
        self.in_J = np.zeros(B.n, dtype=bool)
        self.in_J[list(J)] = True
        self.off = [j for j in range(B.n) if not self.in_J[j]]
        if len(self.off) > budget.t_x:
            raise HypothesisFailed(f"{len(self.off)} coordinates off J(y) exceed t = {budget.t_x}")
        self.threshold = sign_threshold(eta)

    def G_matrix(self, X: np.ndarray) -> np.ndarray:
        """Boolean matrix: j in G(x, y) for every row x of X."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        phi = conditional_phases(self.B, self.y, X, self.eta)
        return self.in_J[None, :] & (np.sin(phi + X * self.eta) ** 2 >= self.threshold)

    def _codeword(self, x, G_row) -> XCodeword:
        b = self.budget
        G = tuple(int(j) for j in np.flatnonzero(G_row))
        if len(G) > b.s:
            raise HypothesisFailed(f"|G(x, y)| = {len(G)} exceeds s = {b.s}")
        r = [int(x[j]) for j in reversed(G)]
        q = [int(x[j]) for j in self.off]
        return XCodeword(_pad(q, b.t_x), len(q), G, _pad(r, b.s), len(r))

    def encode(self, x: Sequence[int]) -> XCodeword:
        x = np.asarray([int(e) for e in x], dtype=np.int64)
        if x.size != self.B.n or not np.all(np.abs(x) == 1):
            raise NotInSet("x must be a sign vector of length n")
        return self._codeword(x, self.G_matrix(x[None, :])[0])

    def encode_many(self, X: np.ndarray) -> list[XCodeword | None]:
        """Codewords for every row; None where |G(x, y)| exceeds s."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        G = self.G_matrix(X)
        ok = G.sum(axis=1) <= self.budget.s
        return [self._codeword(x, g) if k else None for x, g, k in zip(X, G, ok)]

    def decode(self, code: XCodeword) -> tuple[int, ...]:
        return self.decode_many([code])[0]

    def decode_many(self, codes: Sequence[XCodeword]) -> list[tuple[int, ...]]:
        """Decode from the last coordinate down, all codewords in lockstep."""
        n, m = self.B.n, len(codes)
        X = np.zeros((m, n), dtype=np.int64)
        known = np.zeros((m, n), dtype=bool)
        for i, code in enumerate(codes):
            if code.q_len != len(self.off) or code.r_len != len(code.G):
                raise Undecodable("codeword lengths do not match J(y)")
            if not all(0 <= j < n and self.in_J[j] for j in code.G):
                raise Undecodable("G is not a subset of J(y)")
            X[i, self.off] = code.q[:code.q_len]
            G_desc = sorted(code.G, reverse=True)
            X[i, G_desc] = code.r[:code.r_len]
            known[i, self.off] = True
            known[i, G_desc] = True
        for j in range(n - 1, -1, -1):
            rows = np.flatnonzero(~known[:, j])
            if rows.size == 0:
                continue
            phi = conditional_phases(self.B, self.y, X[rows], self.eta, columns=[j])[:, j]
            fit_plus = np.sin(phi + self.eta) ** 2 < self.threshold
            fit_minus = np.sin(phi - self.eta) ** 2 < self.threshold
            bad = fit_plus == fit_minus
            if bad.any():
                count = 2 if fit_plus[bad][0] else 0
                raise Undecodable(f"{count} admissible signs at coordinate {j}")
            X[rows, j] = np.where(fit_plus, 1, -1)
        return [tuple(int(e) for e in row) for row in X]


def encode_x(B: VectorSet, y: Sequence[int], x: Sequence[int], eta: float, budget: Budget) -> XCodeword:
    return AdjacentEncoder(B, y, eta, budget).encode(x)


def decode_x(B: VectorSet, y: Sequence[int], code: XCodeword, eta: float, budget: Budget) -> tuple[int, ...]:
    return AdjacentEncoder(B, y, eta, budget).decode(code)


def all_directions(n: int) -> np.ndarray:
    return codes_to_signs(np.arange(1 << n, dtype=np.uint64), n).astype(np.int64)


def bad_x_census(
    B: VectorSet, y: Sequence[int], eta: float, budget: Budget, enumeration_budget: int = DEFAULT_BUDGET
) -> CensusBound:
    """#{x in {+-1}^n : |G(x, y)| <= tau n} against 2^{n(1 - beta + 4 lambda)}."""
    n = B.n
    if 1 << n > enumeration_budget:
        raise TooLarge(f"2^{n} directions exceed the enumeration budget {enumeration_budget}")
    enc = AdjacentEncoder(B, y, eta, budget)
    degree = 0
    chunk = max(1, (1 << 20) // max(1, len(B)))
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.uint64)
        X = codes_to_signs(codes, n).astype(np.int64)
        degree += int(np.count_nonzero(enc.G_matrix(X).sum(axis=1) <= budget.s))
    space = (1 << budget.t_x) * _subsets_up_to(n, budget.s) * (1 << budget.s)
    bound = 2.0 ** (n * (1 - budget.beta + 4 * budget.lam))
    return CensusBound(degree, space, bound, False)
