"""Gauss-sum invariants of a prime pair as pth-power classes in F_N^x.

S_i   = prod_{k=1}^{p-1} ((Mk)!)^(k^i)
M_i   = prod_{k=1}^{N-1} prod_{a=1}^{k-1} k^(a^i)     (oracle, O(N^2) naive)
A_m   = prod_{k=1}^{N-1} k^(k^m)
C     = prod_{k=1}^{(N-1)/2} k^k

All exponents are reduced mod N-1.  Classes are compared through labels, never
through raw values: two routes to the same invariant may differ by a pth power.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _kernels
from .errors import IndexOutOfRange, OracleBoundExceeded, OutOfDomain
from .modarith import PrimePair, ResidueClass, residue_class

M_DIRECT_LIMIT = 5000


@dataclass(frozen=True)
class FactorialCheckpoints:
    """(Mk)! mod N for k = 1..p-1; ``values[k-1]`` holds (Mk)!."""

    pair: PrimePair
    values: tuple[int, ...]

    def at(self, k: int) -> int:
        return self.values[k - 1]


@dataclass(frozen=True)
class InvariantSet:
    pair: PrimePair
    s: tuple[ResidueClass, ...]  # S_1 .. S_{p-2}
    m_gamma: dict[int, ResidueClass]  # odd i -> M_i via N-adic Gamma
    a2: ResidueClass | None
    c: ResidueClass | None
    m_direct: dict[int, ResidueClass] = field(default_factory=dict)

    def s_class(self, i: int) -> ResidueClass:
        return self.s[i - 1]


def factorial_checkpoints(pair: PrimePair) -> FactorialCheckpoints:
    """One ascending pass of M*(p-1) multiplications."""
    values = _kernels.factorial_checkpoints(pair.N, pair.M, pair.p - 1)
    return FactorialCheckpoints(pair, tuple(values))


def _prod_powers(bases, exps, n: int) -> int:
    out = 1
    for b, e in zip(bases, exps):
        out = out * pow(b, e, n) % n
    return out


def s_invariant(i: int, pair: PrimePair, cp: FactorialCheckpoints | None = None) -> ResidueClass:
    if not 1 <= i <= pair.p - 2:
        raise IndexOutOfRange(f"S_i needs 1 <= i <= {pair.p - 2}, got {i}")
    if cp is None:
        cp = factorial_checkpoints(pair)
    elif cp.pair != pair:
        raise ValueError("checkpoints belong to a different pair")
    n = pair.N
    ks = range(1, pair.p)
    value = _prod_powers(cp.values, (pow(k, i, n - 1) for k in ks), n)
    return residue_class(value, pair)


def s_invariants(pair: PrimePair, cp: FactorialCheckpoints | None = None) -> tuple[ResidueClass, ...]:
    """S_1..S_{p-2} from a single factorial pass."""
    if cp is None:
        cp = factorial_checkpoints(pair)
    return tuple(s_invariant(i, pair, cp) for i in range(1, pair.p - 1))


def m_direct(i: int, pair: PrimePair) -> ResidueClass:
    """The double product evaluated literally; an oracle only."""
    if pair.N > M_DIRECT_LIMIT:
        raise OracleBoundExceeded(f"m_direct is guarded at N <= {M_DIRECT_LIMIT}")
    if i < 1:
        raise OutOfDomain("i must be positive")
    return residue_class(_kernels.m_direct_product(pair.N, i), pair)


def gamma_n(x: int, n: int) -> int:
    """Gamma_N(x) = (-1)^x (x-1)! for 0 < x < N."""
    if not 0 < x < n:
        raise OutOfDomain(f"Gamma_N is evaluated here only on 0 < x < {n}")
    f = _kernels.segment_product(1, x - 1, n)
    return f if x % 2 == 0 else (-f) % n


def gamma_n_batch(xs, n: int) -> dict[int, int]:
    """Gamma_N on several points from one shared ascending factorial pass."""
    pts = sorted(set(xs))
    for x in pts:
        if not 0 < x < n:
            raise OutOfDomain(f"Gamma_N is evaluated here only on 0 < x < {n}")
    out, acc, done = {}, 1, 0
    for x in pts:
        acc = acc * _kernels.segment_product(done + 1, x - 1, n) % n
        done = x - 1
        out[x] = acc if x % 2 == 0 else (-acc) % n
    return out


def m_gamma(i: int, pair: PrimePair, cp: FactorialCheckpoints | None = None) -> ResidueClass:
    """M_i = prod_{k=1}^{p-1} Gamma_N(k/p)^(k^i), in O(N).

    k/p is read as the integer M(p-k)+1 in (0, N), so each Gamma value is a
    signed checkpoint factorial (M(p-k))!.
    """
    if pair.p < 5:
        raise OutOfDomain("M_i is defined for p >= 5")
    if cp is None:
        cp = factorial_checkpoints(pair)
    n, p, m = pair.N, pair.p, pair.M
    value = 1
    for k in range(1, p):
        x = m * (p - k) + 1
        g = cp.at(p - k)
        if x % 2:
            g = n - g
        value = value * pow(g, pow(k, i, n - 1), n) % n
    return residue_class(value, pair)


def a_invariant(m: int, pair: PrimePair) -> ResidueClass:
    if not 0 < m < pair.p - 1:
        raise OutOfDomain(f"A_m needs 0 < m < {pair.p - 1}")
    return residue_class(_kernels.a_product(pair.N, m), pair)


def merel_c(pair: PrimePair) -> ResidueClass:
    if pair.p < 5:
        raise OutOfDomain("C is used for p >= 5")
    return residue_class(_kernels.c_product(pair.N), pair)


def a_label_from_s(m: int, s_labels, p: int) -> int:
    """Predicted label of A_m from the S labels (S_0 contributes nothing)."""
    return sum((-1) ** j * comb(m, j) * s_labels[j - 1] for j in range(1, m)) % p


def compute_invariants(pair: PrimePair, *, with_oracles: bool = False) -> InvariantSet:
    cp = factorial_checkpoints(pair)
    s = s_invariants(pair, cp)
    odd = range(1, pair.p - 3, 2)
    mg = {i: m_gamma(i, pair, cp) for i in odd} if pair.p >= 5 else {}
    a2 = a_invariant(2, pair) if pair.p >= 5 else None
    c = merel_c(pair) if pair.p >= 5 else None
    md = {}
    if with_oracles and pair.N <= M_DIRECT_LIMIT:
        md = {i: m_direct(i, pair) for i in odd}
    return InvariantSet(pair, s, mg, a2, c, md)


def wilson_pairing_holds(n: int) -> bool:
    """(a! (N-1-a)!)^2 = 1 mod N for every a in [1, N-2]."""
    if n >= _kernels.I64_LIMIT:
        raise OutOfDomain("Wilson pairing sweep is limited to N < 2**31")
    f = _kernels.factorial_table(n, n - 1)
    v = f[1 : n - 1] * f[n - 2 : 0 : -1] % n
    return bool(np.all(v * v % n == 1))
