"""Exact p-adic scalars backed by rationals.

Elements of F are modelled by rational numbers viewed inside Q_p.  Only the
p-adic absolute value is ever consulted, so Q (dense in Q_p) is enough for
every finite computation done here.  The uniformizer is p itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpq, mpz, remove

INF = math.inf

Q = mpq


def to_q(x) -> mpq:
    """Coerce int / Fraction / mpq / PAdicScalar to mpq."""
    if isinstance(x, PAdicScalar):
        return x.value
    if isinstance(x, str):
        num, _, den = x.partition("/")
        return mpq(int(num), int(den or 1))
    return mpq(x)


def vp_int(n, p: int) -> int:
    """Valuation of a nonzero integer."""
    if not n:
        raise ValueError("valuation of 0")
    return int(remove(mpz(n), p)[1])


def vp(x, p: int):
    """p-adic valuation of a rational, INF for zero."""
    x = to_q(x)
    if not x:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def unit_part(x, p: int) -> mpq:
    x = to_q(x)
    v = vp(x, p)
    return x / mpq(p) ** v


def residue(x, p: int, m: int) -> int:
    """Image of an integral rational in Z/p^m."""
    x = to_q(x)
    if x and vp(x, p) < 0:
        raise ValueError(f"{x} is not integral at {p}")
    mod = p ** m
    return int(x.numerator) * pow(int(x.denominator), -1, mod) % mod


def frac_part(x, p: int) -> tuple[int, int]:
    """Return (r, k) with x = r / p^k mod Z_p, 0 <= r < p^k, p not | r (or r=0, k=0)."""
    x = to_q(x)
    if not x:
        return 0, 0
    v = vp(x, p)
    if v >= 0:
        return 0, 0
    k = -v
    mod = p ** k
    den = int(x.denominator)
    unit_den = den // mod
    r = int(x.numerator) * pow(unit_den, -1, mod) % mod
    return r, k


def unit_residues(p: int, m: int) -> list[int]:
    """Units of Z/p^m as integers in [0, p^m)."""
    if m < 1:
        raise ValueError("m must be positive")
    return [r for r in range(p ** m) if r % p]


def legendre(u: int, p: int) -> int:
    s = pow(u % p, (p - 1) // 2, p)
    if s == 0:
        raise ValueError(f"{u} is not a unit mod {p}")
    return 1 if s == 1 else -1


@dataclass(frozen=True)
class ResidueElement:
    value: int
    m: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p ** self.m)

    def _check(self, other):
        if isinstance(other, int):
            return ResidueElement(other, self.m, self.p)
        if (other.m, other.p) != (self.m, self.p):
            raise ValueError("residue rings differ")
        return other

    def __add__(self, other):
        other = self._check(other)
        return ResidueElement(self.value + other.value, self.m, self.p)

    def __mul__(self, other):
        other = self._check(other)
        return ResidueElement(self.value * other.value, self.m, self.p)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return ResidueElement(-self.value, self.m, self.p)

    def __sub__(self, other):
        return self + (-self._check(other))

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def __int__(self):
        return self.value


class PAdicScalar:
    """A rational number together with the prime used to measure it."""

    __slots__ = ("value", "p")

    def __init__(self, value, p: int):
        self.value = to_q(value)
        self.p = p

    @classmethod
    def from_parts(cls, numerator: int, exponent: int, p: int) -> "PAdicScalar":
        """numerator / p^exponent."""
        return cls(mpq(numerator, p ** exponent) if exponent >= 0
                   else mpq(numerator * p ** -exponent), p)

    def _other(self, other):
        if isinstance(other, PAdicScalar):
            if other.p != self.p:
                raise ValueError("mixing primes")
            return other.value
        return to_q(other)

    def __add__(self, other):
        return PAdicScalar(self.value + self._other(other), self.p)

    def __sub__(self, other):
        return PAdicScalar(self.value - self._other(other), self.p)

    def __rsub__(self, other):
        return PAdicScalar(self._other(other) - self.value, self.p)

    def __mul__(self, other):
        return PAdicScalar(self.value * self._other(other), self.p)

    def __truediv__(self, other):
        return PAdicScalar(self.value / self._other(other), self.p)

    def __rtruediv__(self, other):
        return PAdicScalar(self._other(other) / self.value, self.p)

    def __neg__(self):
        return PAdicScalar(-self.value, self.p)

    __radd__ = __add__
    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            return self.value == self._other(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"PAdicScalar({self.value}, p={self.p})"

    @property
    def valuation(self):
        return vp(self.value, self.p)

    @property
    def unit_part(self) -> mpq:
        return unit_part(self.value, self.p)

    @property
    def denominator_exponent(self) -> int:
        return max(0, -self.valuation) if self.value else 0

    def is_integral(self) -> bool:
        return not self.value or self.valuation >= 0

    def is_unit(self) -> bool:
        return bool(self.value) and self.valuation == 0

    def norm(self) -> mpq:
        """|x| with |p| = 1/p."""
        if not self.value:
            return mpq(0)
        return mpq(self.p) ** (-self.valuation)


def valuation(x, p: int | None = None):
    if isinstance(x, PAdicScalar):
        return x.valuation
    return vp(x, p)


def reduce(x, m: int, p: int | None = None) -> ResidueElement:
    """Image of an integral scalar in O/p^m."""
    if isinstance(x, PAdicScalar):
        p = x.p
        x = x.value
    if m < 1:
        raise ValueError("m must be positive")
    return ResidueElement(residue(x, p, m), m, p)


def unit_representatives(p: int, m: int) -> list[ResidueElement]:
    return [ResidueElement(r, m, p) for r in unit_residues(p, m)]
