"""Slow, independent reference computations used to cross-check the fast paths.

Nothing here shares code with the production routines beyond the data
types; each oracle enumerates its object directly.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from typing import Sequence

import numpy as np


def brute_zero_sum_count(differences: Sequence[int], ell: int) -> int:
    """#{(eps, j) in {+-1}^{2l} x [m]^{2l} : sum eps_i d_{j_i} = 0} by enumeration."""
    if ell == 0:
        return 1
    signed = np.array([s * int(d) for d in differences for s in (1, -1)], dtype=np.int64)
    if signed.size == 0:
        return 0
    k = 2 * ell
    # every (k-1)-tuple by broadcasting, then count matching last terms
    heads = signed
    for _ in range(k - 2):
        heads = (heads[:, None] + signed[None, :]).ravel()
    values, counts = np.unique(signed, return_counts=True)
    pos = np.searchsorted(values, -heads)
    pos = np.minimum(pos, values.size - 1)
    hit = values[pos] == -heads
    return int(counts[pos][hit].sum())


def brute_r_ell(pairs: Sequence[tuple[int, int]], ell: int) -> int:
    return brute_zero_sum_count([u - v for u, v in pairs], ell)


def naive_distribution(x: Sequence[int], vectors: Sequence[Sequence[int]]) -> dict[int, Fraction]:
    """Pmf of <x, Y> by a Python loop over the members."""
    counts = Counter(sum(a * b for a, b in zip(x, y)) for y in vectors)
    total = len(vectors)
    return {k: Fraction(c, total) for k, c in sorted(counts.items())}


def naive_concentration(x: Sequence[int], vectors: Sequence[Sequence[int]]) -> tuple[Fraction, int]:
    pmf = naive_distribution(x, vectors)
    best = max(pmf.values())
    return best, min(k for k, p in pmf.items() if p == best)


def naive_census(pairs: Sequence[tuple[int, int]], vectors, threshold) -> tuple[int, dict[int, tuple[Fraction, int]]]:
    """(exceed count, {choice code: (concentration, argmax)}) over the full two-cube.

    Choice code bit n-1-j set means coordinate j takes u_j.
    """
    n = len(pairs)
    threshold = Fraction(threshold)
    out = {}
    for code in range(1 << n):
        x = [pairs[j][0] if (code >> (n - 1 - j)) & 1 else pairs[j][1] for j in range(n)]
        out[code] = naive_concentration(x, vectors)
    exceed = sum(1 for conc, _ in out.values() if conc > threshold)
    return exceed, out


def enumerated_cube_sum(weights: Sequence[int]) -> dict[int, Fraction]:
    """Pmf of sum w_j eps_j over all 2^n sign patterns."""
    counts = Counter(
        sum(w * e for w, e in zip(weights, signs))
        for signs in itertools.product((1, -1), repeat=len(weights))
    )
    total = 1 << len(weights)
    return {k: Fraction(c, total) for k, c in sorted(counts.items())}


def riemann_mean(f, nodes: int) -> float:
    """Mean of f over a uniform grid on [0, 1); exact for trigonometric
    polynomials of degree below ``nodes``."""
    th = np.arange(nodes) / nodes
    return float(np.mean(f(th)))


def fourier_modulus_mean(x: Sequence[int], vectors, nodes: int) -> float:
    """Grid mean of |E_Y exp(2 pi i theta <x, Y>)| computed member by member."""
    Y = np.asarray(vectors, dtype=np.int64)
    vals = Y @ np.asarray(x, dtype=np.int64)
    return riemann_mean(lambda th: np.abs(np.exp(2j * np.pi * th[:, None] * vals[None, :]).mean(axis=1)), nodes)
