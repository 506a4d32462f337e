from fractions import Fraction

import pytest

from kummer_rank.errors import BadExponent, EvenExponent, OutOfRange
from kummer_rank.modarith import is_prime
from kummer_rank.regularity import (
    bernoulli_mod,
    bernoulli_numbers,
    bernoulli_table,
    gen_bernoulli_mod_p,
    odd_pairs_regular,
    regular_pair,
)


def test_first_bernoulli_numbers():
    b = bernoulli_numbers(12)
    assert b[:5] == [Fraction(1), Fraction(-1, 2), Fraction(1, 6), Fraction(0), Fraction(-1, 30)]
    assert b[12] == Fraction(-691, 2730)
    assert all(b[k] == 0 for k in range(3, 13, 2))


def test_bernoulli_mod_small():
    assert bernoulli_mod(2, 7) == 6
    assert bernoulli_mod(4, 7) == 3
    assert bernoulli_table(7).residues == {2: 6, 4: 3}


def test_irregular_primes_below_200():
    irregular = {p: bernoulli_table(p).irregular_indices() for p in range(5, 200) if is_prime(p)}
    assert {p for p, ks in irregular.items() if ks} == {37, 59, 67, 101, 103, 131, 149, 157}
    assert irregular[37] == [32]
    assert sorted(irregular[157]) == [62, 110]


def test_table_limits():
    with pytest.raises(OutOfRange):
        bernoulli_table(2)
    with pytest.raises(OutOfRange):
        bernoulli_table(2003)
    with pytest.raises(OutOfRange):
        bernoulli_table(9)


def test_regular_pair_trivial_classes():
    assert regular_pair(37, 1).regular and regular_pair(37, 1).witness_index is None
    assert regular_pair(37, 0).regular


def test_regular_pair_examples():
    v = regular_pair(7, -1)
    assert v.regular and v.exponent == 5 and v.witness_index == 2 and v.witness_residue == 6
    v = regular_pair(37, 5)
    assert not v.regular and v.witness_index == 32 and v.witness_residue == 0
    assert not regular_pair(37, -31).regular


def test_regular_pair_even_rejected():
    with pytest.raises(EvenExponent):
        regular_pair(7, 2)


def test_small_primes_all_odd_pairs_regular():
    for p in (3, 5, 7, 11, 13):
        assert all(odd_pairs_regular(p).values())


def test_gen_bernoulli_examples():
    assert gen_bernoulli_mod_p(37, 31).residue == 0
    assert gen_bernoulli_mod_p(7, 3).residue != 0
    assert gen_bernoulli_mod_p(7, 1).residue != 0


def test_gen_bernoulli_preconditions():
    with pytest.raises(BadExponent):
        gen_bernoulli_mod_p(7, 5)  # -1 mod 6
    with pytest.raises(BadExponent):
        gen_bernoulli_mod_p(7, 2)
    with pytest.raises(BadExponent):
        gen_bernoulli_mod_p(9, 1)


def test_gen_bernoulli_matches_classical_criterion():
    for p in [q for q in range(5, 101) if is_prime(q)]:
        # exponent class -i, i odd in [3, p-2]; i = 1 would be the excluded class -1
        for i in range(3, p - 1, 2):
            vanishes = gen_bernoulli_mod_p(p, -i).residue == 0
            assert vanishes == (bernoulli_mod(p - i, p) == 0), (p, i)
