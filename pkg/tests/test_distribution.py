import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anticonc import oracles
from anticonc.distribution import (
    concentration_probability,
    cube_sum_distribution,
    direction_census,
    inner_product_distribution,
    interval_mass,
)
from anticonc.domain import VectorSet, hypercube, make_two_cube, make_vector_set
from anticonc.errors import DimensionMismatch, OverflowRisk, TooLarge
from anticonc.harness.generators import sharpness_pair


def full(n):
    return VectorSet.full(n)


def test_inner_product_distribution_examples():
    assert inner_product_distribution([1, 1], full(2)).as_dict() == {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}
    B = make_vector_set(3, [(1, -1, 1), (-1, -1, 1)])
    assert inner_product_distribution([0, 0, 0], B).as_dict() == {0: Fraction(1)}
    assert inner_product_distribution([1, 1, 1], make_vector_set(3, [(1, 1, 1)])).as_dict() == {3: Fraction(1)}
    with pytest.raises(DimensionMismatch):
        inner_product_distribution([1, 1], full(3))


def test_concentration_examples():
    assert concentration_probability([1, 1], full(2)) == Fraction(1, 2)
    assert concentration_probability([1, 1, 1, 1], full(4)) == Fraction(6, 16)


def test_sharpness_pair_concentrates_fully():
    A, B = sharpness_pair(8, 0.5)
    for x in A.signs:
        assert concentration_probability(x, B) == 1


def test_cube_sum_examples():
    assert cube_sum_distribution([1, 1]).as_dict() == {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}
    assert cube_sum_distribution([1, 2]).as_dict() == {k: Fraction(1, 4) for k in (-3, -1, 1, 3)}
    assert cube_sum_distribution([0, 0]).as_dict() == {0: Fraction(1)}
    with pytest.raises(OverflowRisk):
        cube_sum_distribution([10, 10], magnitude_bound=15)


def test_cube_sum_distinct_weights_exponent():
    ns = list(range(8, 25, 2))
    masses = [float(cube_sum_distribution(range(1, n + 1)).max_mass()[0]) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(masses), 1)[0]
    assert -1.7 <= slope <= -1.3


def test_interval_mass_examples():
    assert interval_mass(full(4), full(4), 10) == 1
    single = make_vector_set(2, [(1, 1)])
    assert interval_mass(single, single, 0.5) == 0
    assert interval_mass(full(2), full(2), 0.5) == Fraction(1, 2)


def test_census_examples():
    assert direction_census(hypercube(2), full(2), Fraction(3, 5)).exceed_count == 0
    single = make_vector_set(2, [(1, 1)])
    assert direction_census(hypercube(2), single, Fraction(99, 100)).exceed_count == 4
    A, B = sharpness_pair(8, 0.5)
    rec = direction_census(A, B, Fraction(1, 2))
    assert rec.exceed_count == rec.total_directions == len(A)
    assert rec.histogram == {len(B): len(A)}


def test_census_budget():
    with pytest.raises(TooLarge):
        direction_census(hypercube(10), full(10), Fraction(1, 2), budget=1000)


def test_census_csv_columns():
    rec = direction_census(hypercube(2), full(2), Fraction(1, 2), keep_per_direction=True)
    lines = rec.to_csv().splitlines()
    assert lines[0] == "direction_index,concentration_num,concentration_den,argmax_k"
    assert len(lines) == 5


@pytest.mark.parametrize("seed", range(8))
def test_gray_census_matches_naive(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    pairs = []
    for _ in range(n):
        u, v = rng.choice(np.arange(-4, 5), size=2, replace=False)
        pairs.append((int(u), int(v)))
    codes = rng.choice(1 << n, size=int(rng.integers(1, 1 << n)), replace=False)
    B = VectorSet(n, np.sort(codes).astype(np.uint64))
    rec = direction_census(make_two_cube(pairs), B, Fraction(1, 3), keep_per_direction=True, block=3)
    exceed, table = oracles.naive_census(pairs, B.signs.tolist(), Fraction(1, 3))
    assert rec.exceed_count == exceed
    assert {i: (c, k) for i, c, k in rec.per_direction} == table


def test_full_b_shortcut_matches_generic_path():
    cube = make_two_cube([(3, 1), (2, -2), (5, 4), (1, -3)])
    fast = direction_census(cube, full(4), Fraction(1, 4), keep_per_direction=True)
    explicit = VectorSet(4, np.arange(16, dtype=np.uint64))
    _, table = oracles.naive_census(cube.pairs, explicit.signs.tolist(), Fraction(1, 4))
    assert {i: c for i, c, _ in fast.per_direction} == {i: c for i, (c, _) in table.items()}


def test_census_statistics():
    rec = direction_census(hypercube(4), full(4), Fraction(1, 2))
    assert rec.median() == rec.percentile(95) == Fraction(6, 16)
    assert rec.count_above(Fraction(1, 3)) == 16


def test_parallel_census_is_deterministic():
    cube = make_two_cube([(j, -j) for j in range(1, 11)])
    B = VectorSet(10, np.arange(0, 1024, 3, dtype=np.uint64))
    one = direction_census(cube, B, Fraction(1, 10), block=64)
    two = direction_census(cube, B, Fraction(1, 10), block=64, workers=2)
    assert one.histogram == two.histogram and one.exceed_count == two.exceed_count


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-15, 15), min_size=1, max_size=10))
def test_cube_sum_matches_enumeration(weights):
    assert cube_sum_distribution(weights).as_dict() == oracles.enumerated_cube_sum(weights)
    assert cube_sum_distribution(weights).as_dict() == inner_product_distribution(weights, full(len(weights))).as_dict()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-6, 6), min_size=n, max_size=n),
    st.sets(st.integers(0, (1 << n) - 1), min_size=1),
    st.permutations(range(n)),
)))
def test_distribution_properties(data):
    x, codes, perm = data
    n = len(x)
    B = VectorSet(n, sorted(codes))
    dist = inner_product_distribution(x, B)
    assert dist.max_mass()[0] >= Fraction(1, 2 * sum(map(abs, x)) + 1)
    Bp = make_vector_set(n, B.signs[:, perm].tolist())
    assert inner_product_distribution([x[p] for p in perm], Bp) == dist
    assert inner_product_distribution([-e for e in x], B) == dist.mirrored()


def test_binomial_baseline_small():
    for n in range(1, 9):
        assert concentration_probability([1] * n, full(n)) == Fraction(math.comb(n, math.ceil(n / 2)), 2 ** n)
