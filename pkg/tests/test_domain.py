from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anticonc.domain import (
    CubeSubset,
    IntegerDistribution,
    VectorSet,
    hypercube,
    make_two_cube,
    make_vector_set,
    pack_signs,
    parse_signs,
    parse_two_cube,
    parse_vector_set,
    render_two_cube,
    render_vector_set,
    unpack_code,
)
from anticonc.errors import BadEntry, DimensionMismatch, InvalidDimension, NotInSet, ZeroDifference


def test_two_cube_differences():
    assert make_two_cube([(1, -1), (1, -1)]).differences == (2, 2)
    assert make_two_cube([(3, 1), (7, 2)]).differences == (2, 5)


def test_zero_difference_reports_index():
    with pytest.raises(ZeroDifference) as err:
        make_two_cube([(5, 5)])
    assert err.value.index == 0
    with pytest.raises(ZeroDifference) as err:
        make_two_cube([(1, 2), (4, 4)])
    assert err.value.index == 1


def test_hypercube():
    assert hypercube(1).pairs == ((1, -1),)
    assert hypercube(3).differences == (2, 2, 2)
    with pytest.raises(InvalidDimension):
        hypercube(0)


def test_make_vector_set_dedupes_and_validates():
    assert len(make_vector_set(2, [(1, 1), (1, -1)])) == 2
    assert len(make_vector_set(2, [(1, 1), (1, 1)])) == 1
    with pytest.raises(DimensionMismatch):
        make_vector_set(2, [(1, 0, -1)])
    with pytest.raises(BadEntry) as err:
        make_vector_set(3, [(1, 0, -1)])
    assert err.value.position == (0, 1)


def test_packing_puts_first_coordinate_high():
    assert pack_signs([1, -1, -1]) == 0b100
    assert unpack_code(0b011, 3).tolist() == [0, 1, 1]


def test_full_set_is_lazy_but_complete():
    B = VectorSet.full(3)
    assert B.is_full and len(B) == 8
    assert B.signs.shape == (8, 3)
    assert (1, -1, 1) in B
    assert B == make_vector_set(3, B.signs.tolist())


def test_beta_is_exact():
    B = make_vector_set(4, [(1, 1, 1, 1), (1, 1, 1, -1), (-1, 1, 1, 1), (-1, -1, -1, -1)])
    assert B.beta_fraction() == Fraction(1, 2)
    assert 2 ** (B.beta * 4) == pytest.approx(4)


def test_index_of_missing_member():
    B = make_vector_set(2, [(1, 1)])
    with pytest.raises(NotInSet):
        B.index_of((-1, 1))


def test_cube_subset_points():
    cube = make_two_cube([(3, 1), (7, 2)])
    sub = CubeSubset(cube, make_vector_set(2, [(1, -1), (-1, 1)]))
    assert sorted(map(tuple, sub.points.tolist())) == [(1, 7), (3, 2)]
    assert sub.index_of([3, 2]) == sub.choices.index_of([1, -1])


def test_distribution_is_reduced_and_sorted():
    d = IntegerDistribution.from_counts([2, -1], [2, 2])
    assert d.support == (-1, 2)
    assert d.as_dict() == {-1: Fraction(1, 2), 2: Fraction(1, 2)}
    assert sum(d.masses) == 1
    assert d.mirrored().as_dict() == {-2: Fraction(1, 2), 1: Fraction(1, 2)}


def test_max_mass_prefers_smallest_value():
    d = IntegerDistribution.from_counts([-3, 0, 5], [2, 1, 2])
    assert d.max_mass() == (Fraction(2, 5), -3)


def test_sign_parser_accepts_unicode_minus():
    assert parse_signs("+−-") == [1, -1, -1]


def test_file_formats_skip_comments():
    B = parse_vector_set("# header\n+-+\n\n--+\n")
    assert len(B) == 2 and B.n == 3
    A = parse_two_cube("# pairs\n3 1\n7 2\n")
    assert A.differences == (2, 5)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n), min_size=1, max_size=20))
))
def test_vector_set_round_trip(data):
    n, vectors = data
    B = make_vector_set(n, vectors)
    assert parse_vector_set(render_vector_set(B), n) == B


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)).filter(lambda p: p[0] != p[1]), min_size=1, max_size=10))
def test_two_cube_round_trip(pairs):
    A = make_two_cube(pairs)
    assert parse_two_cube(render_two_cube(A)) == A
    for code in range(min(1 << A.n, 64)):
        assert A.choice_of(A.point(code)) == code


def test_signs_agree_with_codes():
    B = VectorSet(4, np.array([0, 5, 15], dtype=np.uint64))
    for code, row in zip(B.codes.tolist(), B.signs.tolist()):
        assert pack_signs(row) == code
