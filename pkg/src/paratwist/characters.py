"""Quadratic characters of F^x, Haar quadrature, Gauss sums."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .cyclotomic import CycScalar, psi
from .padic import legendre, residue, to_q, unit_part, unit_residues, vp


@dataclass(frozen=True)
class QuadraticCharacter:
    p: int
    conductor: int
    sign: int = 1  # value at the uniformizer

    def __post_init__(self):
        if self.p % 2 == 0:
            raise ValueError("p = 2 is not supported")
        if self.conductor not in (0, 1):
            raise ValueError("for odd p a quadratic character has conductor 0 or 1")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def ramified(self) -> bool:
        return self.conductor > 0

    def on_unit(self, u: int) -> int:
        if not self.conductor:
            if u % self.p == 0:
                raise ValueError("not a unit")
            return 1
        return legendre(u, self.p)

    def unit_values(self) -> dict[int, int]:
        if not self.conductor:
            return {0: 1}
        return {u: self.on_unit(u) for u in unit_residues(self.p, self.conductor)}

    def __call__(self, x) -> int:
        return chi_eval(self, x)

    def label(self) -> str:
        kind = "ramified" if self.conductor else "unramified"
        return f"{kind}(c={self.conductor},sign={self.sign:+d})"


def enumerate_quadratic_characters(p: int) -> list[QuadraticCharacter]:
    if p % 2 == 0:
        raise ValueError("p = 2 is not supported")
    return [QuadraticCharacter(p, c, s) for c in (0, 1) for s in (1, -1)]


def chi_eval(chi: QuadraticCharacter, x) -> int:
    x = to_q(x)
    if not x:
        raise ValueError("character evaluated at 0")
    v = vp(x, chi.p)
    val = chi.sign ** (v % 2)
    if chi.conductor:
        val *= chi.on_unit(residue(unit_part(x, chi.p), chi.p, 1))
    return val


@dataclass
class QuadratureRule:
    """Representatives of X/p^L, each carrying weight q^-L."""
    p: int
    level: int
    points: list = field(default_factory=list)
    tag: str = ""

    @property
    def weight(self) -> mpq:
        return mpq(1, self.p ** self.level) if self.level >= 0 else mpq(self.p ** -self.level)

    def mass(self) -> mpq:
        return self.weight * len(self.points)

    def __iter__(self):
        w = self.weight
        return ((w, x) for x in self.points)

    def __len__(self):
        return len(self.points)


def units_rule(p: int, level: int) -> QuadratureRule:
    """O^x / (1 + p^level)."""
    level = max(level, 1)
    return QuadratureRule(p, level, [mpq(u) for u in unit_residues(p, level)], "units")


def integers_rule(p: int, level: int) -> QuadratureRule:
    """O / p^level."""
    return QuadratureRule(p, level, [mpq(x) for x in range(p ** level)], "integers")


def ideal_rule(p: int, k: int, level: int) -> QuadratureRule:
    """p^k / p^level, for k <= level (k may be negative)."""
    if level < k:
        raise ValueError("level below the ideal")
    scale = mpq(p) ** k
    return QuadratureRule(p, level, [scale * x for x in range(p ** (level - k))], f"p^{k}")


def gauss_sum(chi: QuadraticCharacter, k: int, M: int | None = None,
              level: int | None = None) -> CycScalar:
    """Integral of chi(u) psi(u p^k) over the units, as an exact finite sum.

    ``level`` refines the quadrature beyond the minimal max(c, -k, 1).
    """
    p = chi.p
    L = max(chi.conductor, -k, 1, level or 0)
    M = max(M or 1, -k, 1)
    total = CycScalar.zero(p, M)
    shift = mpq(p) ** k
    for w, u in units_rule(p, L):
        total = total + psi(u * shift, p, M) * (w * chi.on_unit(int(u)))
    return total


@dataclass
class ChangeLemmaReport:
    b: int
    t: int
    n: int
    bijective: bool
    sums_agree: bool
    classes: int
    identity_map: bool

    @property
    def passed(self) -> bool:
        return self.bijective and self.sums_agree


def verify_change_lemma(p: int, b, t: int, n: int, rng: random.Random | None = None) -> ChangeLemmaReport:
    """Check that u -> u + b p^t permutes (O/p^n)^x and preserves a random finite Haar sum."""
    if t < 1 or n < 1:
        raise ValueError("t and n must be positive")
    rng = rng or random.Random(0)
    mod = p ** n
    b_res = residue(b, p, n)
    units = unit_residues(p, n)
    # u(1 + b u^-1 p^t) = u + b p^t
    image = [(u + b_res * p ** t) % mod for u in units]
    bijective = sorted(image) == units
    f = {u: mpq(rng.randint(-50, 50), rng.randint(1, 9)) for u in units}
    lhs = sum((f[v] for v in image if v in f), mpq(0)) / mod
    rhs = sum(f.values(), mpq(0)) / mod
    return ChangeLemmaReport(int(b_res), t, n, bijective, lhs == rhs, len(units),
                             image == units)
