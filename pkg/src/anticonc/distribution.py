"""Exact inner-product distributions and direction censuses."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .domain import (
    CubeSubset,
    IntegerDistribution,
    TwoCube,
    VectorSet,
    as_direction,
)
from .errors import DimensionMismatch, OverflowRisk, TooLarge

DEFAULT_BUDGET = 1 << 24
DEFAULT_MAGNITUDE_BOUND = 1 << 26
_BLOCK = 4096
_BINCOUNT_CELLS = 1 << 25


def inner_product_distribution(x: Sequence[int], B: VectorSet) -> IntegerDistribution:
    """Pmf of <x, Y> for Y uniform on B, by enumerating B."""
    x = as_direction(x, B.n)
    values = B.signs.astype(np.int64) @ x
    return IntegerDistribution.from_samples(values)


def concentration_probability(x: Sequence[int], B: VectorSet) -> Fraction:
    return inner_product_distribution(x, B).max_mass()[0]


def cube_sum_distribution(
    weights: Sequence[int], magnitude_bound: int = DEFAULT_MAGNITUDE_BOUND
) -> IntegerDistribution:
    """Pmf of sum_j w_j eps_j with independent fair signs, by convolution."""
    w = [abs(int(a)) for a in weights]
    span = sum(w)
    if span > magnitude_bound:
        raise OverflowRisk(f"sum |w_j| = {span} exceeds magnitude bound {magnitude_bound}")
    dtype = np.int64 if len(w) < 62 else object
    counts = np.zeros(2 * span + 1, dtype=dtype)
    counts[span] = 1
    for a in w:
        if a == 0:
            counts = counts * 2
            continue
        nxt = np.zeros_like(counts)
        nxt[a:] += counts[:-a]
        nxt[:-a] += counts[a:]
        counts = nxt
    nz = np.nonzero(counts)[0]
    return IntegerDistribution.from_counts(
        (nz - span).tolist(), counts[nz].tolist(), 1 << len(w)
    )


def interval_mass(A: VectorSet, B: VectorSet, c: float) -> Fraction:
    """Pr[|<X, Y>| <= c sqrt(n)] for independent uniform X in A, Y in B."""
    if A.n != B.n:
        raise DimensionMismatch(f"dimensions {A.n} and {B.n} differ")
    limit = c * math.sqrt(A.n)
    Ys = B.signs.astype(np.int64)
    hits = 0
    for start in range(0, len(A), _BLOCK):
        block = A.signs[start:start + _BLOCK].astype(np.int64)
        hits += int(np.count_nonzero(np.abs(block @ Ys.T) <= limit))
    return Fraction(hits, len(A) * len(B))


# ---------------------------------------------------------------------------
# census

@dataclass
class CensusRecord:
    total_directions: int
    exceed_count: int
    threshold: Fraction
    denominator: int
    # max point count (numerator over ``denominator``) -> number of directions
    histogram: dict[int, int]
    per_direction: list[tuple[int, Fraction, int]] | None = None
    notes: list[str] = field(default_factory=list)

    def concentrations(self) -> list[tuple[Fraction, int]]:
        return [(Fraction(k, self.denominator), c) for k, c in sorted(self.histogram.items())]

    def percentile(self, q: float) -> Fraction:
        """Nearest-rank percentile of the concentration over directions."""
        rank = max(1, math.ceil(q / 100.0 * self.total_directions))
        seen = 0
        for k in sorted(self.histogram):
            seen += self.histogram[k]
            if seen >= rank:
                return Fraction(k, self.denominator)
        raise AssertionError("empty histogram")

    def median(self) -> Fraction:
        return self.percentile(50.0)

    def count_above(self, threshold) -> int:
        t = Fraction(threshold)
        return sum(c for k, c in self.histogram.items() if Fraction(k, self.denominator) > t)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["direction_index", "concentration_num", "concentration_den", "argmax_k"])
        for idx, conc, k in self.per_direction or []:
            w.writerow([idx, conc.numerator, conc.denominator, k])
        return buf.getvalue()


def _row_modes(T: np.ndarray, offset: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-row (max count, smallest argmax value) of an integer matrix."""
    m, width = T.shape[0], 2 * offset + 1
    if m * width <= _BINCOUNT_CELLS:
        flat = (T + offset) + (np.arange(m, dtype=np.int64) * width)[:, None]
        counts = np.bincount(flat.ravel(), minlength=m * width).reshape(m, width)
        arg = counts.argmax(axis=1)
        return counts[np.arange(m), arg], arg - offset
    S = np.sort(T, axis=1)
    best = np.zeros(m, dtype=np.int64)
    arg = np.zeros(m, dtype=np.int64)
    for i, row in enumerate(S):
        vals, cnts = np.unique(row, return_counts=True)
        j = cnts.argmax()
        best[i], arg[i] = cnts[j], vals[j]
    return best, arg


def _gray(i):
    return i ^ (i >> 1)


def _census_block(Ys: np.ndarray, u: np.ndarray, v: np.ndarray, start: int, stop: int):
    """Max counts over Gray positions [start, stop) of the two-cube.

    The table <x, Y> for the first direction is built directly; every later
    row is the previous one plus a single column update.
    """
    n = u.size
    g0 = _gray(start)
    bits0 = (g0 >> np.arange(n - 1, -1, -1)) & 1
    x0 = np.where(bits0 == 1, u, v)
    m = stop - start
    steps = np.arange(start + 1, stop, dtype=np.int64)
    if steps.size:
        low = steps & -steps
        bitpos = np.log2(low).astype(np.int64)
        coord = n - 1 - bitpos
        newbit = (_gray(steps) >> bitpos) & 1
        d = (u - v)[coord]
        delta = np.where(newbit == 1, d, -d)
        upd = Ys[:, coord].T * delta[:, None]
        T = np.empty((m, Ys.shape[0]), dtype=np.int64)
        T[0] = Ys @ x0
        np.cumsum(upd, axis=0, out=T[1:])
        T[1:] += T[0]
    else:
        T = (Ys @ x0)[None, :]
    offset = int(np.sum(np.maximum(np.abs(u), np.abs(v))))
    best, arg = _row_modes(T, offset)
    codes = _gray(np.arange(start, stop, dtype=np.int64))
    return codes, best, arg


def _collect(record_rows, keep, denominator, threshold):
    hist: dict[int, int] = {}
    rows = [] if keep else None
    exceed = 0
    thr_num = threshold * denominator
    for codes, best, arg in record_rows:
        ks, cs = np.unique(best, return_counts=True)
        for k, c in zip(ks.tolist(), cs.tolist()):
            hist[k] = hist.get(k, 0) + c
            if k > thr_num:
                exceed += c
        if keep:
            rows.extend(
                (int(c), Fraction(int(b), denominator), int(a))
                for c, b, a in zip(codes, best, arg)
            )
    if keep:
        rows.sort()
    return dict(sorted(hist.items())), exceed, rows


def direction_census(
    A: TwoCube | VectorSet | CubeSubset,
    B: VectorSet,
    threshold,
    *,
    budget: int = DEFAULT_BUDGET,
    keep_per_direction: bool = False,
    workers: int = 1,
    block: int = _BLOCK,
) -> CensusRecord:
    """Count directions x in A with max_k Pr_Y[<x,Y> = k] > threshold.

    Full two-cubes are walked in Gray-code order in contiguous blocks; each
    block rebuilds its first table and then updates one column per step.
    The direction index of a two-cube element is its packed choice code.
    """
    threshold = Fraction(threshold)
    if A.n != B.n:
        raise DimensionMismatch(f"dimensions {A.n} and {B.n} differ")
    n = A.n
    if isinstance(A, TwoCube) and B.is_full:
        return _census_full_b(A, B, threshold, budget, keep_per_direction)
    denominator = len(B)
    block = max(1, min(block, (1 << 22) // len(B)))
    if isinstance(A, TwoCube):
        total = 1 << n
        if total > budget:
            raise TooLarge(f"2^{n} directions exceed the enumeration budget {budget}")
        Ys = B.signs.astype(np.int64)
        ranges = [(s, min(s + block, total)) for s in range(0, total, block)]
        args = [(Ys, A.u, A.v, s, e) for s, e in ranges]
        if workers > 1 and len(ranges) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_census_block_star, args))
        else:
            parts = [_census_block(*a) for a in args]
    else:
        total = len(A)
        if total > budget:
            raise TooLarge(f"{total} directions exceed the enumeration budget {budget}")
        X = A.points if isinstance(A, CubeSubset) else A.signs.astype(np.int64)
        Ys = B.signs.astype(np.int64)
        offset = int(np.abs(X).sum(axis=1).max())
        parts = []
        for s in range(0, total, block):
            T = X[s:s + block] @ Ys.T
            best, arg = _row_modes(T, offset)
            parts.append((np.arange(s, s + T.shape[0]), best, arg))
    hist, exceed, rows = _collect(parts, keep_per_direction, denominator, threshold)
    return CensusRecord(total, exceed, threshold, denominator, hist, rows)


def _census_block_star(args):
    return _census_block(*args)


def _census_full_b(A: TwoCube, B: VectorSet, threshold, budget, keep) -> CensusRecord:
    """Full-cube B: the law of <x, Y> depends only on |x|, so cache by it."""
    n = A.n
    total = 1 << n
    if total > budget:
        raise TooLarge(f"2^{n} directions exceed the enumeration budget {budget}")
    denominator = 1 << n
    absu, absv = np.abs(A.u), np.abs(A.v)
    notes = ["full-cube B: concentration computed by convolution over |x_j|"]
    if np.array_equal(absu, absv):
        dist = cube_sum_distribution(absu.tolist())
        conc, k = dist.max_mass()
        num = conc.numerator * (denominator // conc.denominator)
        rows = None
        if keep:
            rows = [(c, conc, k) for c in range(total)]
        exceed = total if conc > threshold else 0
        return CensusRecord(total, exceed, threshold, denominator, {num: total}, rows, notes)
    cache: dict[tuple, tuple[Fraction, int]] = {}
    hist: dict[int, int] = {}
    rows = [] if keep else None
    exceed = 0
    for code in range(total):
        bits = (code >> np.arange(n - 1, -1, -1)) & 1
        key = tuple(np.where(bits == 1, absu, absv).tolist())
        if key not in cache:
            cache[key] = cube_sum_distribution(key).max_mass()
        conc, k = cache[key]
        num = conc.numerator * (denominator // conc.denominator)
        hist[num] = hist.get(num, 0) + 1
        exceed += conc > threshold
        if keep:
            rows.append((code, conc, k))
    return CensusRecord(total, exceed, threshold, denominator, dict(sorted(hist.items())), rows, notes)
