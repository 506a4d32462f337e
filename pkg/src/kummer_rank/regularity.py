"""Regular pairs (p, e) via Bernoulli numbers mod p.

Two independent computations of the same regularity bit:

* ``bernoulli_table``: exact rational Bernoulli numbers reduced mod p.
* ``gen_bernoulli_mod_p``: B_{1, omega^i} mod p from the Teichmueller lift
  x -> x^p in Z/p^2, with no rational arithmetic at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import BadExponent, EvenExponent, OutOfRange
from .modarith import is_prime

TABLE_LIMIT = 2000

_bernoulli: list[Fraction] = [Fraction(1)]


def bernoulli_numbers(n: int) -> list[Fraction]:
    """B_0..B_n (B_1 = -1/2) from sum_{k<=m} C(m+1, k) B_k = 0."""
    while len(_bernoulli) <= n:
        m = len(_bernoulli)
        acc = sum((comb(m + 1, k) * b for k, b in enumerate(_bernoulli) if b), Fraction(0))
        _bernoulli.append(-acc / (m + 1))
    return _bernoulli[: n + 1]


def bernoulli_mod(k: int, p: int) -> int:
    """B_k mod p; the denominator of B_k must be prime to p."""
    b = bernoulli_numbers(k)[k]
    if b.denominator % p == 0:
        raise OutOfRange(f"B_{k} is not p-integral for p={p}")
    return b.numerator * pow(b.denominator, -1, p) % p


@dataclass(frozen=True)
class BernoulliTable:
    p: int
    residues: dict[int, int]  # even k in [2, p-3] -> B_k mod p

    def irregular_indices(self) -> list[int]:
        return [k for k, r in self.residues.items() if r == 0]


@lru_cache(maxsize=64)
def bernoulli_table(p: int) -> BernoulliTable:
    if p < 3 or p > TABLE_LIMIT or not is_prime(p):
        raise OutOfRange(f"bernoulli_table needs an odd prime p <= {TABLE_LIMIT}")
    return BernoulliTable(p, {k: bernoulli_mod(k, p) for k in range(2, p - 2, 2)})


@dataclass(frozen=True)
class RegularityVerdict:
    p: int
    exponent: int  # representative in [0, p-2]
    regular: bool
    witness_index: int | None  # Bernoulli index k consulted, None if unconditional
    witness_residue: int | None


def regular_pair(p: int, e: int) -> RegularityVerdict:
    """Is the chi^e eigenspace of the p-class group of Q(zeta_p) trivial?

    Odd classes are decided by Herbrand-Ribet: regular iff p does not divide
    B_{p-e}.  The trivial class and e = 1 are regular unconditionally; any
    other even class raises EvenExponent.
    """
    r = e % (p - 1)
    if r == 0 or r == 1:
        return RegularityVerdict(p, r, True, None, None)
    if r % 2 == 0:
        raise EvenExponent(f"exponent class {r} mod {p - 1} is even")
    k = p - r
    res = bernoulli_table(p).residues[k]
    return RegularityVerdict(p, r, res != 0, k, res)


@lru_cache(maxsize=64)
def odd_pairs_regular(p: int) -> dict[int, bool]:
    """(p, -i) regularity for every odd i in [1, p-2]."""
    return {i: regular_pair(p, -i).regular for i in range(1, p - 1, 2)}


@dataclass(frozen=True)
class GenBernoulli:
    p: int
    exponent: int
    residue: int  # B_{1, omega^i} mod p


def gen_bernoulli_mod_p(p: int, i: int) -> GenBernoulli:
    """(1/p) sum_{r=1}^{p-1} r * tau(r^i) mod p, tau(x) = x^p mod p^2."""
    if p < 3 or not is_prime(p):
        raise BadExponent(f"p={p} is not an odd prime")
    e = i % (p - 1)
    if e % 2 == 0:
        raise BadExponent(f"exponent {i} is even mod {p - 1}")
    if e == p - 2:
        raise BadExponent(f"exponent {i} is -1 mod {p - 1}; B_(1,omega^-1) is not p-integral")
    p2 = p * p
    total = sum(r * pow(pow(r, e, p), p, p2) for r in range(1, p)) % p2
    if total % p:
        raise AssertionError("Teichmueller sum not divisible by p")
    return GenBernoulli(p, e, total // p % p)
