"""Identity suite: relations among the invariants that must hold for every N.

Each check returns True/False, or is left out when it does not apply to the
pair (e.g. the literal M_i oracle above its size guard).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import KummerError
from .invariants import (
    M_DIRECT_LIMIT,
    a_invariant,
    a_label_from_s,
    factorial_checkpoints,
    m_direct,
    m_gamma,
    merel_c,
    s_invariants,
    wilson_pairing_holds,
)
from .modarith import PrimePair
from .selmer import HARDCODED_UNIT_POLYNOMIALS, UnitStatus, eigenunit_status, polynomial_unit_status
from .survey import sieve

WILSON_LIMIT = 1 << 31


def check_pair(pair: PrimePair) -> dict[str, bool]:
    p, n = pair.p, pair.N
    out: dict[str, bool] = {}
    cp = factorial_checkpoints(pair)
    s = s_invariants(pair, cp)
    labels = [c.label for c in s]

    out["s_even_trivial"] = all(labels[i - 1] == 0 for i in range(2, p - 1, 2))
    if n < WILSON_LIMIT:
        out["wilson_pairing"] = wilson_pairing_holds(n)
    if p >= 5:
        odd = range(1, p - 3, 2)
        gamma_ok = all((m_gamma(i, pair, cp).label + labels[i - 1]) % p == 0 for i in odd)
        out["m_gamma_inverse_s"] = gamma_ok
        if n <= M_DIRECT_LIMIT:
            out["m_direct_inverse_s"] = all((m_direct(i, pair).label + labels[i - 1]) % p == 0 for i in odd)
        a_ok = True
        for m in range(1, p - 1):
            a_ok &= a_invariant(m, pair).label == a_label_from_s(m, labels, p)
        out["a_relation"] = a_ok
        a2 = a_invariant(2, pair).label
        out["c_relation"] = (4 * merel_c(pair).label + 3 * a2) % p == 0
        unit_ok = True
        for (pp, i) in HARDCODED_UNIT_POLYNOMIALS:
            if pp != p:
                continue
            st = polynomial_unit_status(pair, i)
            if st is not UnitStatus.DEGENERATE:
                unit_ok &= st is eigenunit_status(pair, i)
        out["eigenunit_vs_polynomial"] = unit_ok
    return out


@dataclass
class SuiteReport:
    p: int
    max_n: int
    primes: int = 0
    passed: Counter = field(default_factory=Counter)
    failed: Counter = field(default_factory=Counter)
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "max_n": self.max_n,
            "primes": self.primes,
            "passed": dict(sorted(self.passed.items())),
            "failed": dict(sorted(self.failed.items())),
            "failures": [{"N": n, "check": c} for n, c in self.failures],
        }

    def render(self) -> str:
        lines = [f"identity suite p={self.p}, N <= {self.max_n}: {self.primes} primes"]
        for name in sorted(set(self.passed) | set(self.failed)):
            lines.append(f"  {name:<26} pass {self.passed[name]:>7}  fail {self.failed[name]:>5}")
        for n, c in self.failures[:20]:
            lines.append(f"  FAIL N={n}: {c}")
        lines.append("OK" if self.ok else "FAILED")
        return "\n".join(lines)


def run_suite(p: int, max_n: int, min_n: int = 2) -> SuiteReport:
    rep = SuiteReport(p, max_n)
    for n in sieve(p, min_n, max_n) if max_n >= min_n else []:
        rep.primes += 1
        try:
            results = check_pair(PrimePair(p, n))
        except KummerError as exc:
            results = {type(exc).__name__: False}
        for name, ok in results.items():
            if ok:
                rep.passed[name] += 1
            else:
                rep.failed[name] += 1
                rep.failures.append((n, name))
    return rep
