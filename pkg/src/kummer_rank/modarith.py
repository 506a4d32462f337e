"""Exact arithmetic in F_N for prime N = 1 mod p.

Everything here is pure: values are plain Python ints, so products never
overflow regardless of the size of N (the 64-bit ceiling is a validation
rule, not an arithmetic limit).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

from .errors import DegenerateModulus, ValidationError, ZeroInput

__all__ = [
    "PrimePair",
    "PthRootOfUnity",
    "PolyRoots",
    "ResidueClass",
    "class_label",
    "element_of_order_p",
    "is_prime",
    "is_pth_power",
    "poly_roots_mod",
    "poly_roots_scan",
    "pow_mod",
    "residue_character",
    "residue_class",
    "sqrt_mod",
]

U64_LIMIT = 1 << 64

# Deterministic Miller-Rabin for n < 3.3e24, which covers every 64-bit input.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test for n < 2**64 (and well beyond)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_odd_prime(p: int) -> None:
    if p < 3 or not is_prime(p):
        raise ValidationError(f"p={p} is not an odd prime")


@dataclass(frozen=True)
class PrimePair:
    """The pair (p, N) with p an odd prime and N a prime with N = 1 mod p."""

    p: int
    N: int

    def __post_init__(self) -> None:
        p, n = self.p, self.N
        if not isinstance(p, int) or not isinstance(n, int):
            raise ValidationError("p and N must be integers")
        check_odd_prime(p)
        if n >= U64_LIMIT:
            raise ValidationError(f"N={n} does not fit in 64 bits")
        if not is_prime(n):
            raise ValidationError(f"N={n} is not prime")
        if n % p != 1:
            raise ValidationError(f"N={n} is not 1 mod p={p}")

    @property
    def M(self) -> int:
        return (self.N - 1) // self.p


@dataclass(frozen=True)
class PthRootOfUnity:
    zeta: int
    p: int
    N: int

    def power(self, e: int) -> int:
        return pow(self.zeta, e % self.p, self.N)


@dataclass(frozen=True)
class ResidueClass:
    """An element of F_N^x with its pth-power character and Z/p label."""

    value: int
    char: int
    label: int

    @property
    def is_pth_power(self) -> bool:
        return self.label == 0


def pow_mod(base: int, exp: int, n: int) -> int:
    if exp < 0:
        raise ValidationError("negative exponent")
    return pow(base, exp, n)


def _nonzero(x: int, n: int) -> int:
    x %= n
    if x == 0:
        raise ZeroInput("0 has no pth-power class")
    return x


def residue_character(x: int, pair: PrimePair) -> int:
    """x^((N-1)/p) mod N, an element whose order divides p."""
    return pow(_nonzero(x, pair.N), pair.M, pair.N)


def is_pth_power(x: int, pair: PrimePair) -> bool:
    return residue_character(x, pair) == 1


@lru_cache(maxsize=256)
def element_of_order_p(pair: PrimePair) -> PthRootOfUnity:
    """g^((N-1)/p) for the smallest g >= 2 giving a value other than 1.

    The smallest-g rule fixes the labelling of nonzero classes, so labels are
    comparable between runs and machines.
    """
    g = 2
    while True:
        z = pow(g, pair.M, pair.N)
        if z != 1:
            return PthRootOfUnity(z, pair.p, pair.N)
        g += 1


def class_label(x: int, pair: PrimePair, zeta: PthRootOfUnity | None = None) -> int:
    """The e in [0, p-1] with residue_character(x) == zeta**e."""
    if zeta is None:
        zeta = element_of_order_p(pair)
    c = residue_character(x, pair)
    z = 1
    for e in range(pair.p):
        if z == c:
            return e
        z = z * zeta.zeta % pair.N
    raise ValidationError(f"zeta={zeta.zeta} does not have order {pair.p} mod {pair.N}")


def residue_class(x: int, pair: PrimePair, zeta: PthRootOfUnity | None = None) -> ResidueClass:
    value = _nonzero(x, pair.N)
    if zeta is None:
        zeta = element_of_order_p(pair)
    return ResidueClass(value, residue_character(value, pair), class_label(value, pair, zeta))


def sqrt_mod(a: int, n: int) -> int | None:
    """Square root of a modulo an odd prime n, or None for a non-residue.

    Tonelli-Shanks with the non-residue found by ascending scan from 2.  Of the
    two roots, the smaller representative is returned.
    """
    a %= n
    if a == 0 or n == 2:
        return a
    if pow(a, (n - 1) // 2, n) != 1:
        return None
    q, s = n - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    if s == 1:
        r = pow(a, (n + 1) // 4, n)
        return min(r, n - r)
    z = 2
    while pow(z, (n - 1) // 2, n) != n - 1:
        z += 1
    m, c, t, r = s, pow(z, q, n), pow(a, q, n), pow(a, (q + 1) // 2, n)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % n
            i += 1
        b = pow(c, 1 << (m - i - 1), n)
        m, c = i, b * b % n
        t, r = t * c % n, r * b % n
    return min(r, n - r)


# ---------------------------------------------------------------------------
# Roots of polynomials of degree <= 3.  Public coefficient order is
# highest degree first: x^2 + x - 1 -> [1, 1, -1].  Internally polynomials
# are lists of coefficients, lowest degree first.


class PolyRoots(NamedTuple):
    roots: tuple[int, ...]
    repeated: bool


def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _monic(f: list[int], n: int) -> list[int]:
    inv = pow(f[-1], -1, n)
    return [c * inv % n for c in f]


def _divmod_poly(a: list[int], b: list[int], n: int) -> tuple[list[int], list[int]]:
    a = a[:]
    inv = pow(b[-1], -1, n)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] * inv % n
        q[shift] = c
        for k, bk in enumerate(b):
            a[shift + k] = (a[shift + k] - c * bk) % n
    return _trim(q), a


def _mulmod_poly(a: list[int], b: list[int], f: list[int], n: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            prod[i + j] = (prod[i + j] + ai * bj) % n
    return _divmod_poly(_trim(prod), f, n)[1]


def _powmod_poly(base: list[int], e: int, f: list[int], n: int) -> list[int]:
    result = [1]
    base = _divmod_poly(base, f, n)[1]
    while e:
        if e & 1:
            result = _mulmod_poly(result, base, f, n)
        base = _mulmod_poly(base, base, f, n)
        e >>= 1
    return result


def _gcd_poly(a: list[int], b: list[int], n: int) -> list[int]:
    a, b = _trim(a[:]), _trim(b[:])
    while b:
        a, b = b, _divmod_poly(a, b, n)[1]
    return _monic(a, n) if a else a


def _sub(a: list[int], b: list[int], n: int) -> list[int]:
    size = max(len(a), len(b))
    a = a + [0] * (size - len(a))
    b = b + [0] * (size - len(b))
    return _trim([(x - y) % n for x, y in zip(a, b)])


def _split_distinct(g: list[int], n: int) -> list[int]:
    """Roots of a monic g that is a product of distinct linear factors."""
    d = len(g) - 1
    if d <= 0:
        return []
    if d == 1:
        return [(-g[0]) % n]
    if d == 2:
        c, b = g[0], g[1]
        r = sqrt_mod(b * b - 4 * c, n)
        if r is None:
            return []
        inv2 = pow(2, -1, n)
        return sorted({(-b + r) * inv2 % n, (-b - r) * inv2 % n})
    # equal-degree splitting with deterministic shifts delta = 0, 1, 2, ...
    half = (n - 1) // 2
    for delta in range(n):
        h = _powmod_poly([delta, 1], half, g, n)
        h = _gcd_poly(g, _sub(h, [1], n), n)
        if 0 < len(h) - 1 < d:
            other = _divmod_poly(g, h, n)[0]
            return sorted(_split_distinct(h, n) + _split_distinct(_monic(other, n), n))
    raise AssertionError("equal-degree splitting did not terminate")


def _discriminant(c: Sequence[int]) -> int:
    """Discriminant from highest-first integer coefficients (degree <= 3)."""
    if len(c) == 2:
        return 1
    if len(c) == 3:
        a, b, cc = c
        return b * b - 4 * a * cc
    a, b, cc, d = c
    return 18 * a * b * cc * d - 4 * b**3 * d + b * b * cc * cc - 4 * a * cc**3 - 27 * a * a * d * d


def poly_roots_scan(coeffs: Sequence[int], n: int) -> list[int]:
    """Exhaustive root search; the oracle for poly_roots_mod on small n."""
    out = []
    for x in range(n):
        v = 0
        for c in coeffs:
            v = (v * x + c) % n
        if v == 0:
            out.append(x)
    return out


def poly_roots_mod(coeffs: Sequence[int], n: int) -> PolyRoots:
    """All distinct roots in F_n of a polynomial of degree <= 3.

    Quadratics use sqrt_mod.  Cubics are depressed (x -> y - b/3) and then
    split against y^n - y by equal-degree factorization.  `repeated` is set
    when n divides the discriminant.
    """
    coeffs = [int(c) for c in coeffs]
    if not 1 <= len(coeffs) <= 4:
        raise ValidationError("degree must be between 0 and 3")
    if coeffs[0] % n == 0:
        raise DegenerateModulus(f"leading coefficient vanishes mod {n}")
    deg = len(coeffs) - 1
    if deg == 0:
        return PolyRoots((), False)
    repeated = deg >= 2 and _discriminant(coeffs) % n == 0
    if n <= 3:
        return PolyRoots(tuple(poly_roots_scan(coeffs, n)), repeated)
    f = _monic([c % n for c in reversed(coeffs)], n)
    if deg == 2 and repeated:
        return PolyRoots(((-f[1]) * pow(2, -1, n) % n,), True)
    if deg < 3:
        return PolyRoots(tuple(_split_distinct(f, n)), repeated)
    # y = x + b/3 removes the quadratic term
    shift = f[2] * pow(3, -1, n) % n
    # depressed y^3 + P y + Q with x = y - shift
    P = (f[1] - 3 * shift * shift) % n
    Q = (2 * pow(shift, 3, n) - f[1] * shift + f[0]) % n
    dep = [Q, P, 0, 1]
    frob = _powmod_poly([0, 1], n, dep, n)
    g = _gcd_poly(dep, _sub(frob, [0, 1], n), n)
    ys = _split_distinct(g, n)
    return PolyRoots(tuple(sorted((y - shift) % n for y in ys)), repeated)

