import dataclasses
import math
from fractions import Fraction

import numpy as np
import pytest

from anticonc.domain import VectorSet, make_vector_set
from anticonc.encoding import (
    AdjacentEncoder,
    Budget,
    J_sizes,
    MemberEncoder,
    XCodeword,
    YCodeword,
    all_directions,
    bad_x_census,
    chain_rule_probability,
    decode_x,
    decode_y,
    encode_x,
    encode_y,
    entropy_space_bound,
    parse_codeword,
    small_J_census,
)
from anticonc.errors import DegenerateAngle, DomainError, HypothesisFailed, NotInSet, TooLarge, Undecodable
from anticonc.fourier import conditional_profile
from anticonc.harness.verify import biased_set
from anticonc.structure import binary_entropy


def random_set(rng, n, size):
    return VectorSet(n, np.sort(rng.choice(1 << n, size=size, replace=False)).astype(np.uint64))


def first_encodable(B, budget):
    enc = MemberEncoder(B, budget)
    for y in B.signs:
        try:
            return enc, tuple(int(e) for e in y), enc.encode(y)
        except HypothesisFailed:
            continue
    return enc, None, None


# -- budget -----------------------------------------------------------------

def test_budget_validation_and_values():
    b = Budget(n=12, beta=0.75, lam=0.1, kappa=0.05, tau=0.2)
    assert b.t_y == math.floor(12 * 0.45) and b.t_x == math.floor(12 * 0.55)
    assert b.s == 2 and b.s_max == math.floor(12 / math.log2(20))
    with pytest.raises(DomainError):
        Budget(n=4, beta=0.5, lam=0.2, kappa=0.1, tau=0.1)
    with pytest.raises(DomainError):
        Budget(n=8, beta=0.5, lam=0.2, kappa=0.5, tau=0.1)
    assert Budget(n=8, beta=0.0, lam=0.2, kappa=0.1, tau=0.1).t_y == 0


def test_chain_rule_gives_uniform_probability():
    rng = np.random.default_rng(0)
    B = random_set(rng, 7, 37)
    for y in B.signs[:10]:
        assert chain_rule_probability(B, y) == Fraction(1, 37)


# -- y side -----------------------------------------------------------------

def test_singleton_encodes_to_empty_word():
    y = (1, -1, -1, 1, 1)
    B = make_vector_set(5, [y])
    budget = Budget.for_set(B, 0.3)
    code = encode_y(B, y, budget)
    assert code.q_len == 0 and code.S == () and set(code.q) <= {1}
    assert decode_y(B, code, budget) == y


def test_certain_coordinate_is_never_marked_rare():
    B = VectorSet(4, np.arange(8, 16, dtype=np.uint64))   # first coordinate fixed at +1
    # a nominal beta above 1 just opens enough room in q for J(y) = {1, 2, 3}
    budget = Budget(n=4, beta=3.0, lam=0.26, kappa=0.25, tau=0.1)
    y = (1, -1, 1, -1)
    assert conditional_profile(B, y, 0.25).gamma[0] == 0
    code = encode_y(B, y, budget)
    assert 0 not in code.S and code.q_len == 3
    assert decode_y(B, code, budget) == y


def test_y_hypothesis_and_membership_errors():
    B = VectorSet.full(6)
    budget = Budget.for_set(B, 0.2)
    with pytest.raises(HypothesisFailed):
        encode_y(B, (1,) * 6, budget)
    single = make_vector_set(3, [(1, 1, 1)])
    with pytest.raises(NotInSet):
        encode_y(single, (1, -1, 1), Budget.for_set(single, 0.4))


@pytest.mark.parametrize("seed", range(50))
def test_y_roundtrip_random_sets(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 15))
    B = biased_set(rng, n, int(rng.integers(8, 3 * n * n)))
    # kappa = 0.3 leaves many members with small J; the solved kappa leaves few
    for kappa in (0.3, None):
        budget = Budget.for_set(B, 1.01 / n, kappa=kappa)
        enc = MemberEncoder(B, budget)
        for y in B.signs:
            try:
                code = enc.encode(y)
            except HypothesisFailed:
                continue
            assert enc.decode(code) == tuple(int(e) for e in y)


def test_y_roundtrip_covers_both_decoder_branches():
    rng = np.random.default_rng(7)
    B = biased_set(rng, 10, 200)
    budget = Budget.for_set(B, 0.101, kappa=0.3)
    enc = MemberEncoder(B, budget)
    codes = []
    for y in B.signs:
        try:
            codes.append(enc.encode(y))
        except HypothesisFailed:
            pass
    assert any(c.S for c in codes) and any(c.q_len for c in codes)


def test_tampered_S_never_decodes_silently():
    rng = np.random.default_rng(3)
    B = biased_set(rng, 10, 150)
    budget = Budget.for_set(B, 0.101, kappa=0.3)
    enc = MemberEncoder(B, budget)
    tried = 0
    for y in B.signs[:40]:
        y = tuple(int(e) for e in y)
        try:
            code = enc.encode(y)
        except HypothesisFailed:
            continue
        J = set(conditional_profile(B, y, budget.kappa).J)
        for j in (j for j in range(10) if j not in J):
            S = tuple(sorted(set(code.S) ^ {j}))
            tampered = YCodeword(code.q, code.q_len, S)
            tried += 1
            try:
                assert enc.decode(tampered) != y
            except Undecodable:
                pass
    assert tried > 20


def test_small_J_census_examples():
    full = VectorSet.full(8)
    census = small_J_census(full, Budget.for_set(full, 0.2))
    assert census.count == 0 and census.within_bound
    single = make_vector_set(6, [(1, -1, 1, 1, -1, 1)])
    census = small_J_census(single, Budget.for_set(single, 0.2))
    assert census.count == 1 and census.vacuous and not census.within_bound


@pytest.mark.parametrize("seed", range(50))
def test_small_J_census_against_bound(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(6, 15))
    beta = float(rng.uniform(0.4, 0.95))
    B = random_set(rng, n, math.ceil(2 ** (beta * n)))
    lam = max(B.beta / 6, 1.01 / n)
    budget = Budget.for_set(B, lam)
    census = small_J_census(B, budget)
    assert census.within_codewords
    assert census.count <= entropy_space_bound(budget)
    if not census.vacuous:
        assert census.within_bound


def test_entropy_space_bound_formula():
    budget = Budget(n=10, beta=0.8, lam=0.15, kappa=0.01, tau=0.1)
    a = 1 / math.log2(100)
    assert entropy_space_bound(budget) == pytest.approx(2 ** (budget.t_y + 10 * binary_entropy(a)))


# -- x side -----------------------------------------------------------------

def x_instance(seed, n=None, eta=0.9):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(5, 13))
    B = random_set(rng, n, math.ceil(2 ** (float(rng.uniform(0.4, 0.9)) * n)))
    budget = Budget.for_set(B, max(B.beta / 6, 1.01 / n))
    eligible = np.flatnonzero(J_sizes(B, budget.kappa) > budget.t_y_raw)
    if eligible.size == 0:
        return None
    y = tuple(int(e) for e in B.signs[int(rng.choice(eligible))])
    return B, y, budget, AdjacentEncoder(B, y, eta, budget)


@pytest.mark.parametrize("seed", range(20))
def test_x_roundtrip_all_directions(seed):
    inst = x_instance(seed)
    if inst is None:
        pytest.skip("no member with large J")
    B, y, budget, _ = inst
    # the solved tau gives floor(tau n) = 0 here; a looser tau puts entries in r
    enc = AdjacentEncoder(B, y, 0.9, dataclasses.replace(budget, tau=0.4))
    X = all_directions(B.n)
    codes = enc.encode_many(X)
    keep = [i for i, c in enumerate(codes) if c is not None]
    assert keep and any(codes[i].r_len for i in keep)
    back = enc.decode_many([codes[i] for i in keep])
    for i, b in zip(keep, back):
        assert b == tuple(int(e) for e in X[i])


def test_x_single_and_batch_agree():
    B, y, budget, _ = x_instance(1)
    budget = dataclasses.replace(budget, tau=0.4)
    enc = AdjacentEncoder(B, y, 0.9, budget)
    codes = [c for c in enc.encode_many(all_directions(B.n)) if c is not None][:25]
    assert codes
    batch = enc.decode_many(codes)
    assert [enc.decode(c) for c in codes] == batch
    assert encode_x(B, y, batch[0], 0.9, budget) == codes[0]
    assert decode_x(B, y, codes[0], 0.9, budget) == batch[0]


def test_x_with_empty_G():
    for seed in range(40):
        inst = x_instance(seed)
        if inst is None:
            continue
        B, y, budget, enc = inst
        X = all_directions(B.n)
        empty = np.flatnonzero(enc.G_matrix(X).sum(axis=1) == 0)
        if empty.size:
            x = tuple(int(e) for e in X[empty[0]])
            code = enc.encode(x)
            assert code.G == () and code.r_len == 0
            assert enc.decode(code) == x
            return
    pytest.fail("no direction with empty G found")


def test_corrupted_q_changes_x():
    B, y, budget, _ = next(i for i in (x_instance(s) for s in range(40)) if i and i[3].off)
    enc = AdjacentEncoder(B, y, 0.9, dataclasses.replace(budget, tau=0.4))
    X = all_directions(B.n)
    codes = [c for c in enc.encode_many(X) if c is not None][:30]
    assert codes
    for code in codes:
        original = enc.decode(code)
        q = list(code.q)
        q[0] = -q[0]
        bad = XCodeword(tuple(q), code.q_len, code.G, code.r, code.r_len)
        try:
            assert enc.decode(bad) != original
        except Undecodable:
            pass


def test_x_errors():
    B = VectorSet.full(6)
    budget = Budget.for_set(B, 0.2)
    y = (1,) * 6
    with pytest.raises(DegenerateAngle):
        AdjacentEncoder(B, y, math.pi / 2, budget)
    rng = np.random.default_rng(5)
    small = biased_set(rng, 8, 40)
    b2 = Budget.for_set(small, 0.2, kappa=0.3)
    low = int(np.argmin(J_sizes(small, 0.3)))
    if J_sizes(small, 0.3)[low] <= b2.t_y_raw:
        with pytest.raises(HypothesisFailed):
            AdjacentEncoder(small, small.signs[low], 0.9, b2)
    enc = AdjacentEncoder(B, y, 0.9, budget)
    with pytest.raises(NotInSet):
        enc.encode((1, 0, 1, 1, 1, 1))


def test_bad_x_census_full_cube():
    B = VectorSet.full(8)
    budget = Budget.for_set(B, 0.2)
    y = (1, -1) * 4
    census = bad_x_census(B, y, 0.9, budget)
    enc = AdjacentEncoder(B, y, 0.9, budget)
    assert enc.off == []
    assert census.count <= sum(math.comb(8, k) for k in range(budget.s + 1)) * 2 ** budget.s
    assert census.within_codewords


def test_bad_x_census_with_no_room_for_G():
    B = VectorSet.full(6)
    budget = Budget(n=6, beta=1.0, lam=0.2, kappa=0.1, tau=0.1)
    assert budget.s == 0
    y = (1, 1, -1, 1, -1, -1)
    enc = AdjacentEncoder(B, y, 0.7, budget)
    X = all_directions(6)
    expected = int(np.count_nonzero(enc.G_matrix(X).sum(axis=1) == 0))
    assert bad_x_census(B, y, 0.7, budget).count == expected


@pytest.mark.parametrize("seed", range(20))
def test_bad_x_census_against_bound(seed):
    inst = x_instance(500 + seed, eta=float(np.random.default_rng(seed).uniform(0.2, 1.3)))
    if inst is None:
        pytest.skip("no member with large J")
    B, y, budget, enc = inst
    census = bad_x_census(B, y, enc.eta, budget)
    assert census.within_codewords
    # integer floors inside the codeword count can overshoot the real-valued bound by < 2x
    assert census.count <= 2 * census.bound


def test_bad_x_census_budget():
    B = VectorSet.full(10)
    with pytest.raises(TooLarge):
        bad_x_census(B, (1,) * 10, 0.9, Budget.for_set(B, 0.2), enumeration_budget=512)


def test_codeword_text_round_trip():
    y = YCodeword((1, -1, 1), 2, (0, 4))
    assert parse_codeword(y.render()) == y
    assert parse_codeword(YCodeword((), 0, ()).render()) == YCodeword((), 0, ())
    x = XCodeword((1, 1), 1, (3, 5), (-1, 1, 1), 2)
    assert parse_codeword(x.render()) == x
