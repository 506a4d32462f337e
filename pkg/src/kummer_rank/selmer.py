"""Selmer dimension strings and p-rank bounds for Q(N^(1/p)).

The entry for index i (1 <= i <= p-3) is the dimension of the Sigma-Selmer
group of F_p(-i):

* odd i:  1 iff S_i is a pth power mod N, provided (p, -i) is regular;
* even i: 1 iff the odd partner p-2-i has entry 1 and a Kummer generator of
  the chi^(-i) eigenspace of p-units of Q(zeta_p) is a pth power mod N,
  provided (p, 1+i) is regular.

Irregular pairs give Unknown entries; nothing is guessed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import BadIndex, InvariantViolation, OutOfDomain, RootStatusMismatch
from .invariants import factorial_checkpoints, s_invariants
from .modarith import (
    PrimePair,
    ResidueClass,
    element_of_order_p,
    is_pth_power,
    poly_roots_mod,
)
from .regularity import bernoulli_table, regular_pair

# Kummer generators found by computer algebra for the small primes; keyed by
# (p, even i), coefficients highest degree first.
HARDCODED_UNIT_POLYNOMIALS: dict[tuple[int, int], tuple[int, ...]] = {
    (5, 2): (1, 1, -1),
    (7, 2): (1, 41, 54, 1),
    (7, 4): (1, -25, 31, 1),
}

ALLOWED_P7 = frozenset({"0000", "1000", "0010", "1010", "1001", "0110", "1011", "1110", "1111"})


class UnitStatus(enum.Enum):
    IS_PTH_POWER = "is_pth_power"
    NOT_PTH_POWER = "not_pth_power"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class DimEntry:
    """One Selmer dimension: 0, 1, or None (unknown, with a reason)."""

    index: int
    value: int | None
    source: str
    reason: str | None = None
    best_effort: bool = False

    @property
    def known(self) -> bool:
        return self.value is not None

    def render(self) -> str:
        return "?" if self.value is None else str(self.value)


@dataclass(frozen=True)
class UnitVerdict:
    status: UnitStatus
    source: str
    degenerate: bool = False  # hardcoded polynomial had a repeated root mod N


@dataclass(frozen=True)
class DimensionString:
    pair: PrimePair
    entries: tuple[DimEntry, ...]
    degenerate: bool = False

    def __str__(self) -> str:
        return "".join(e.render() for e in self.entries)

    def entry(self, i: int) -> DimEntry:
        return self.entries[i - 1]

    @property
    def fully_determined(self) -> bool:
        return all(e.known for e in self.entries)


@dataclass(frozen=True)
class RankEstimate:
    pair: PrimePair
    lower: int
    upper: int
    exact: bool
    mu: int
    assumed_r_cyclotomic: int = 0
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __str__(self) -> str:
        if self.exact:
            return f"r_K = {self.lower} (exact)"
        return f"{self.lower} <= r_K <= {self.upper}"


# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def s_classes(pair: PrimePair) -> tuple[ResidueClass, ...]:
    """S_1..S_{p-2} for the pair, cached per pair."""
    return s_invariants(pair, factorial_checkpoints(pair))


def _check_index(pair: PrimePair, i: int, parity: int) -> None:
    if not 1 <= i <= pair.p - 3 or i % 2 != parity:
        kind = "odd" if parity else "even"
        raise BadIndex(f"need {kind} i in [1, {pair.p - 3}], got {i}")


def h_sigma_odd(pair: PrimePair, i: int) -> DimEntry:
    _check_index(pair, i, 1)
    if not regular_pair(pair.p, -i).regular:
        return DimEntry(i, None, f"S_{i}", reason=f"({pair.p}, -{i}) is an irregular pair")
    s = s_classes(pair)[i - 1]
    return DimEntry(i, 1 if s.is_pth_power else 0, f"S_{i}")


def cyclotomic_eigenunit(pair: PrimePair, i: int) -> int:
    """prod_{a=1}^{p-1} (1 - zeta^a)^(a^i mod p), evaluated in F_N.

    Under sigma_c: zeta -> zeta^c this unit goes to its c^(-i) power modulo pth
    powers, so it spans the chi^(-i) eigenspace for even i != 0 mod p-1.
    Replacing zeta by another primitive root only changes u by a prime-to-p
    power, which leaves its pth-power status alone.
    """
    p, n = pair.p, pair.N
    z = element_of_order_p(pair).zeta
    u, za = 1, 1
    for a in range(1, p):
        za = za * z % n
        u = u * pow((1 - za) % n, pow(a, i, p), n) % n
    return u


def eigenunit_status(pair: PrimePair, i: int) -> UnitStatus:
    u = cyclotomic_eigenunit(pair, i)
    return UnitStatus.IS_PTH_POWER if is_pth_power(u, pair) else UnitStatus.NOT_PTH_POWER


def polynomial_unit_status(pair: PrimePair, i: int) -> UnitStatus:
    """Shared pth-power status of the roots of the hardcoded polynomial.

    DEGENERATE if N divides the discriminant or the roots do not split
    completely; RootStatusMismatch if conjugate roots disagree.
    """
    coeffs = HARDCODED_UNIT_POLYNOMIALS[(pair.p, i)]
    res = poly_roots_mod(coeffs, pair.N)
    if res.repeated or len(res.roots) != len(coeffs) - 1:
        return UnitStatus.DEGENERATE
    flags = {is_pth_power(r, pair) for r in res.roots}
    if len(flags) != 1:
        raise RootStatusMismatch(f"roots {res.roots} of {coeffs} disagree mod {pair.N}")
    return UnitStatus.IS_PTH_POWER if flags.pop() else UnitStatus.NOT_PTH_POWER


def even_unit_status(pair: PrimePair, i: int) -> UnitVerdict:
    _check_index(pair, i, 0)
    if (pair.p, i) in HARDCODED_UNIT_POLYNOMIALS:
        st = polynomial_unit_status(pair, i)
        if st is not UnitStatus.DEGENERATE:
            return UnitVerdict(st, "polynomial")
        return UnitVerdict(eigenunit_status(pair, i), "eigenunit", degenerate=True)
    return UnitVerdict(eigenunit_status(pair, i), "eigenunit")


def h_sigma_even(pair: PrimePair, i: int, odd_partner: DimEntry | None = None) -> tuple[DimEntry, UnitVerdict | None]:
    _check_index(pair, i, 0)
    j = pair.p - 2 - i
    if not regular_pair(pair.p, 1 + i).regular:
        return DimEntry(i, None, f"S_{j}", reason=f"({pair.p}, {1 + i}) is an irregular pair"), None
    if odd_partner is None:
        odd_partner = h_sigma_odd(pair, j)
    unit = even_unit_status(pair, i)
    src = f"S_{j} & {_unit_label(pair, i, unit)}"
    best = unit.source == "eigenunit" and (pair.p, i) not in HARDCODED_UNIT_POLYNOMIALS
    if odd_partner.value is None:
        return DimEntry(i, None, src, reason=f"partner entry {j} unknown", best_effort=best), unit
    value = int(odd_partner.value == 1 and unit.status is UnitStatus.IS_PTH_POWER)
    return DimEntry(i, value, src, best_effort=best), unit


def _unit_label(pair: PrimePair, i: int, unit: UnitVerdict) -> str:
    if unit.source == "polynomial":
        return "roots of " + _poly_str(HARDCODED_UNIT_POLYNOMIALS[(pair.p, i)])
    return f"cyclotomic eigenunit chi^-{i}"


def _poly_str(coeffs) -> str:
    deg = len(coeffs) - 1
    terms = []
    for k, c in enumerate(coeffs):
        e = deg - k
        if c == 0:
            continue
        mono = "" if e == 0 else "x" if e == 1 else f"x^{e}"
        mag = abs(c)
        body = f"{mag}{mono}" if mag != 1 or not mono else mono
        terms.append(("- " if c < 0 else "+ ") + body)
    s = " ".join(terms)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def dimension_string(pair: PrimePair) -> DimensionString:
    p = pair.p
    entries: dict[int, DimEntry] = {}
    for i in range(1, p - 2, 2):
        entries[i] = h_sigma_odd(pair, i)
    degenerate = False
    for i in range(2, p - 2, 2):
        entry, unit = h_sigma_even(pair, i, entries[p - 2 - i])
        entries[i] = entry
        degenerate |= bool(unit and unit.degenerate)
    dims = DimensionString(pair, tuple(entries[i] for i in range(1, p - 2)), degenerate)
    _validate(dims)
    return dims


def _validate(dims: DimensionString) -> None:
    p = dims.pair.p
    for e in dims.entries:
        if e.index % 2 == 0 and e.value == 1 and dims.entry(p - 2 - e.index).value != 1:
            raise InvariantViolation(f"even entry {e.index} is 1 but entry {p - 2 - e.index} is not")
    if p == 7 and dims.fully_determined and str(dims) not in ALLOWED_P7:
        raise InvariantViolation(f"string {dims} is outside the allowed set for p=7")


def mu_count(pair: PrimePair) -> int:
    """Odd i in [1, p-4] with (p, -i) regular and M_i (~ S_i^-1) not a pth power."""
    if pair.p < 5:
        raise OutOfDomain("mu is defined for p >= 5")
    s = s_classes(pair)
    return sum(
        1 for i in range(1, pair.p - 3, 2) if regular_pair(pair.p, -i).regular and not s[i - 1].is_pth_power
    )


def mu_from_values(p: int, values: Sequence[int | None]) -> int:
    """mu implied by a dimension string when every odd pair is regular."""
    return sum(1 for i in range(1, p - 3, 2) if values[i - 1] == 0)


def rank_bounds(
    p: int,
    values: Sequence[int | None],
    mu: int,
    assumed_r_cyclotomic: int = 0,
) -> tuple[int, int]:
    """(lower, upper) for r_K from the dimension entries (None = unknown).

    p=3: exactly 1.  p=5: r_K = 1 + h_1 + h_2.  p=7: lower is 2 as soon as h_1
    or h_3 is 1.  Otherwise only h_1 raises the lower bound.  The upper bound
    is always min(1 + sum h, r_cyc + p - 2 - 2 mu), counting unknowns as 1.
    """
    if p == 3:
        return 1, 1
    ones = sum(1 for v in values if v == 1)
    unknown = sum(1 for v in values if v is None)
    upper = min(1 + ones + unknown, assumed_r_cyclotomic + p - 2 - 2 * mu)
    if p == 5:
        lower = 1 + ones
    elif p == 7:
        lower = 2 if values[0] == 1 or values[2] == 1 else 1
    else:
        lower = 1 + int(values[0] == 1)
    if upper < lower:
        raise InvariantViolation(f"bounds crossed: lower={lower} upper={upper}")
    return lower, upper


def rank_estimate(
    pair: PrimePair, dims: DimensionString | None = None, assumed_r_cyclotomic: int = 0
) -> RankEstimate:
    if pair.p == 3:
        return RankEstimate(pair, 1, 1, True, 0, assumed_r_cyclotomic)
    if dims is None:
        dims = dimension_string(pair)
    values = [e.value for e in dims.entries]
    mu = mu_count(pair)
    lower, upper = rank_bounds(pair.p, values, mu, assumed_r_cyclotomic)
    notes = []
    if any(e.best_effort for e in dims.entries):
        notes.append("even entries use the cyclotomic eigenunit (best effort for p >= 11)")
    if assumed_r_cyclotomic == 0 and bernoulli_table(pair.p).irregular_indices():
        notes.append(f"p={pair.p} is irregular; upper bound assumes r_cyc = 0")
    unknown = values.count(None)
    if unknown:
        notes.append(f"{unknown} unknown entr{'y' if unknown == 1 else 'ies'} widen the upper bound")
    return RankEstimate(pair, lower, upper, lower == upper, mu, assumed_r_cyclotomic, tuple(notes))
