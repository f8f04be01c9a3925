"""Seeded instance generators; every output is checked against its defining predicate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

import numpy as np

from ..domain import TwoCube, VectorSet, hypercube, make_two_cube, pack_signs
from ..errors import InfeasibleSpec
from ..structure import mian_chowla, sidon_classify

KINDS = ("random_b", "sharpness_pair", "hypercube", "distinct_cube", "sidon_cube", "geometric_cube")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    params: dict[str, Any] = field(default_factory=dict)


def set_size(n: int, beta: float) -> int:
    """ceil(2^{beta n}), robust to beta n landing on an integer."""
    return min(1 << n, math.ceil(2.0 ** (beta * n) - 1e-9))


def random_b(n: int, beta: float, rng: np.random.Generator) -> VectorSet:
    if not 0.0 < beta <= 1.0:
        raise InfeasibleSpec(f"beta must lie in (0, 1], got {beta}")
    size = set_size(n, beta)
    if size == 1 << n:
        return VectorSet.full(n)
    codes = rng.choice(1 << n, size=size, replace=False)
    return VectorSet(n, np.sort(codes).astype(np.uint64))


def _balanced_codes(prefix_len: int, free_len: int, fixed_first: bool) -> list[int]:
    """Vectors with one block all +1 and the other block summing to zero."""
    out = []
    for plus in combinations(range(free_len), free_len // 2):
        free = [-1] * free_len
        for j in plus:
            free[j] = 1
        fixed = [1] * prefix_len
        out.append(pack_signs(fixed + free if fixed_first else free + fixed))
    return out


def sharpness_pair(n: int, beta: float) -> tuple[VectorSet, VectorSet]:
    """(A, B) with <x, y> = 0 for every x in A and y in B.

    B: first (1 - beta) n coordinates +1, the rest summing to zero.
    A: last beta n coordinates +1, the first (1 - beta) n summing to zero.
    """
    tail = beta * n
    if abs(tail - round(tail)) > 1e-9:
        raise InfeasibleSpec(f"beta n = {tail} is not an integer")
    tail = int(round(tail))
    head = n - tail
    if tail % 2 or head % 2 or tail == 0 or head == 0:
        raise InfeasibleSpec(f"block lengths {head} and {tail} must be positive and even")
    B = VectorSet(n, sorted(_balanced_codes(head, tail, fixed_first=True)))
    A = VectorSet(n, sorted(_balanced_codes(tail, head, fixed_first=False)))
    if np.any(A.signs.astype(np.int64) @ B.signs.T.astype(np.int64)):
        raise AssertionError("sharpness pair has a nonzero inner product")
    return A, B


def distinct_cube(n: int) -> TwoCube:
    """Pairs (j, -j) for j = 1..n, so d_j = 2j."""
    return make_two_cube((j, -j) for j in range(1, n + 1))


def sidon_cube(n: int) -> TwoCube:
    """Pairs (s, -s) over the greedy Sidon sequence; |d_j| = 2 s_j is Sidon too."""
    cube = make_two_cube((v, -v) for v in mian_chowla(n))
    if sidon_classify([abs(d) for d in cube.differences]).classification != "sidon":
        raise AssertionError("differences failed the Sidon check")
    return cube


def geometric_cube(n: int) -> TwoCube:
    return make_two_cube((1 << j, -(1 << j)) for j in range(n))


def generate(spec: GeneratorSpec, seed: int = 0):
    n = spec.n
    if n < 1:
        raise InfeasibleSpec("n must be positive")
    if spec.kind == "random_b":
        return random_b(n, float(spec.params.get("beta", 0.5)), np.random.default_rng(seed))
    if spec.kind == "sharpness_pair":
        return sharpness_pair(n, float(spec.params.get("beta", 0.5)))
    if spec.kind == "hypercube":
        return hypercube(n)
    if spec.kind == "distinct_cube":
        cube = distinct_cube(n)
        if len(set(map(abs, cube.differences))) != n:
            raise AssertionError("differences are not distinct")
        return cube
    if spec.kind == "sidon_cube":
        return sidon_cube(n)
    if spec.kind == "geometric_cube":
        return geometric_cube(n)
    raise InfeasibleSpec(f"unknown generator kind {spec.kind!r}; expected one of {KINDS}")
