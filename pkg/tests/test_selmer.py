import pytest

from kummer_rank.errors import BadIndex, InvariantViolation, OutOfDomain
from kummer_rank.modarith import PrimePair, poly_roots_mod
from kummer_rank.selmer import (
    ALLOWED_P7,
    HARDCODED_UNIT_POLYNOMIALS,
    UnitStatus,
    cyclotomic_eigenunit,
    dimension_string,
    eigenunit_status,
    even_unit_status,
    h_sigma_even,
    h_sigma_odd,
    mu_count,
    mu_from_values,
    polynomial_unit_status,
    rank_bounds,
    rank_estimate,
)
from kummer_rank.survey import sieve


def test_h_sigma_odd_examples():
    assert h_sigma_odd(PrimePair(5, 11), 1).value == 0
    assert h_sigma_odd(PrimePair(7, 337), 3).value == 1
    assert h_sigma_odd(PrimePair(7, 337), 1).value == 0


def test_h_sigma_index_checks():
    with pytest.raises(BadIndex):
        h_sigma_odd(PrimePair(7, 29), 2)
    with pytest.raises(BadIndex):
        h_sigma_odd(PrimePair(7, 29), 5)
    with pytest.raises(BadIndex):
        h_sigma_even(PrimePair(7, 29), 3)


def test_even_unit_status_5_11():
    # roots of x^2 + x - 1 mod 11 are 3 and 7, neither a 5th power
    v = even_unit_status(PrimePair(5, 11), 2)
    assert v.status is UnitStatus.NOT_PTH_POWER and v.source == "polynomial"


def test_polynomial_roots_share_status():
    for (p, i), coeffs in HARDCODED_UNIT_POLYNOMIALS.items():
        for n in sieve(p, 2, 20000):
            polynomial_unit_status(PrimePair(p, n), i)  # raises on disagreement


def test_unit_polynomials_split_completely():
    for (p, i), coeffs in HARDCODED_UNIT_POLYNOMIALS.items():
        for n in sieve(p, 2, 20000):
            res = poly_roots_mod(coeffs, n)
            assert len(res.roots) == len(coeffs) - 1 and not res.repeated


def test_eigenunit_agrees_with_polynomials():
    for (p, i) in HARDCODED_UNIT_POLYNOMIALS:
        for n in sieve(p, 2, 30000):
            pair = PrimePair(p, n)
            assert eigenunit_status(pair, i) is polynomial_unit_status(pair, i), (p, i, n)


def test_eigenunit_is_a_unit():
    pair = PrimePair(11, 353)
    for i in (2, 4, 6, 8):
        assert cyclotomic_eigenunit(pair, i) % pair.N != 0


def test_dimension_string_examples():
    assert str(dimension_string(PrimePair(5, 11))) == "00"
    d = dimension_string(PrimePair(7, 337))
    assert d.entry(1).value == 0 and d.entry(3).value == 1
    assert d.entry(2).source.startswith("S_3")
    assert str(dimension_string(PrimePair(3, 7))) == ""


def test_dimension_string_never_01_for_p5():
    for n in sieve(5, 2, 100000):
        assert str(dimension_string(PrimePair(5, n))) != "01"


def test_p7_strings_in_allowed_set():
    seen = set()
    for n in sieve(7, 2, 100000):
        s = str(dimension_string(PrimePair(7, n)))
        assert s in ALLOWED_P7
        seen.add(s)
    assert len(seen) >= 8  # 1110 is rare enough to be absent below 10^5


def test_even_one_implies_partner_one():
    for p in (5, 7, 11, 13):
        for n in sieve(p, 2, 30000):
            d = dimension_string(PrimePair(p, n))
            for e in d.entries:
                if e.index % 2 == 0 and e.value == 1:
                    assert d.entry(p - 2 - e.index).value == 1


def test_irregular_prime_gives_unknown_entries():
    # 37 is irregular at B_32: the odd entry i = 31 ((37, -31) = (37, 5)) and
    # the even entry i = 4 ((37, 1 + 4)) are undecidable
    n = sieve(37, 2, 2000)[0]
    d = dimension_string(PrimePair(37, n))
    assert d.entry(31).value is None and "irregular" in d.entry(31).reason
    assert d.entry(4).value is None
    assert d.entry(31).render() == "?"
    assert sum(e.value is None for e in d.entries) == 2
    est = rank_estimate(PrimePair(37, n))
    assert est.lower <= est.upper and any("unknown" in note for note in est.notes)


def test_rank_estimate_examples():
    assert str(rank_estimate(PrimePair(5, 11))) == "r_K = 1 (exact)"
    est = rank_estimate(PrimePair(7, 337))
    assert est.lower == 2 and est.exact
    est = rank_estimate(PrimePair(11, 353))
    assert est.lower == 1 and est.upper >= 2
    assert rank_estimate(PrimePair(3, 7)).exact


def test_rank_bounds_p5_is_exact():
    assert rank_bounds(5, [0, 0], mu_from_values(5, [0, 0])) == (1, 1)
    assert rank_bounds(5, [1, 0], mu_from_values(5, [1, 0])) == (2, 2)
    assert rank_bounds(5, [1, 1], mu_from_values(5, [1, 1])) == (3, 3)


def test_rank_bounds_p7_table():
    expected = {
        "0000": (1, 1),
        "1000": (2, 2),
        "0010": (2, 2),
        "1010": (2, 3),
        "1001": (2, 3),
        "0110": (2, 3),
        "1011": (2, 4),
        "1110": (2, 4),
        "1111": (2, 5),
    }
    for s, bounds in expected.items():
        values = [int(c) for c in s]
        assert rank_bounds(7, values, mu_from_values(7, values)) == bounds, s


def test_rank_bounds_crossing_is_a_bug():
    with pytest.raises(InvariantViolation):
        rank_bounds(7, [1, 0, 0, 0], 2)


def test_mu_matches_values_for_regular_p():
    for p in (5, 7, 11):
        for n in sieve(p, 2, 5000):
            pair = PrimePair(p, n)
            values = [e.value for e in dimension_string(pair).entries]
            assert mu_count(pair) == mu_from_values(p, values)


def test_mu_domain():
    with pytest.raises(OutOfDomain):
        mu_count(PrimePair(3, 7))


def test_deterministic():
    a = dimension_string(PrimePair(7, 337))
    b = dimension_string(PrimePair(7, 337))
    assert a == b
