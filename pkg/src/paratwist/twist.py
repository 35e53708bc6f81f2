"""Quadratic twisting operators on lazy Whittaker vectors.

Every operator is a finite quadrature sum_j w_j pi(h_j) v; the quadrature
levels are chosen at the invariance level of each integrand and can be
refined by one step to confirm that choice (``refinement_check``).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from gmpy2 import mpq

from .characters import (QuadraticCharacter, ideal_rule, integers_rule,
                         units_rule)
from .groups import (GroupElement, corner, diag, gl2, lower32, special_element,
                     twist_unipotent, upper_unipotent, weyl_s2)
from .whittaker import SmoothVector, WhittakerDatum, combine


@dataclass(frozen=True)
class TwistConfig:
    """Twisting data for a level-n input on GL(2) (size 2) or GSp(4) (size 4).

    ``levels`` overrides individual quadrature levels by name: ``gl2_b``,
    ``a``, ``b``, ``z``, ``x``, ``zN``.  ``refine`` adds one to every level.
    """
    chi: QuadraticCharacter
    n: int = 0
    size: int = 4
    levels: dict = field(default_factory=dict, compare=False, hash=False)
    refine: int = 0

    def __post_init__(self):
        if self.size not in (2, 4):
            raise ValueError("size must be 2 or 4")
        if self.n < 0:
            raise ValueError("level n must be non-negative")

    @property
    def p(self) -> int:
        return self.chi.p

    @property
    def c(self) -> int:
        return self.chi.conductor

    @property
    def N(self) -> int:
        c = self.c
        if self.size == 2:
            return max(self.n, 2 * c)
        return max(self.n + 2 * c, 4 * c)

    def level(self, name: str) -> int:
        c = self.c
        base = {
            "gl2_b": max(c, 1),
            "a": max(2 * c, 1),
            "b": max(c, 1),
            "z": 0,
            "x": max(2 * c, 1),
            "zN": 0,  # offset added to the N and N-1 corner levels
        }[name]
        return self.levels.get(name, base) + self.refine

    def refined(self, step: int = 1) -> "TwistConfig":
        return replace(self, refine=self.refine + step)


def _check_size(v: SmoothVector, cfg: TwistConfig):
    if v.datum.size != cfg.size:
        raise ValueError(f"vector of size {v.datum.size} given to a size-{cfg.size} operator")
    if v.datum.p != cfg.p:
        raise ValueError("vector and character live over different primes")


def _unit_sign(chi: QuadraticCharacter, u) -> int:
    return chi.on_unit(int(u))


# ---------------------------------------------------------------------------
# GL(2)

def twist_gl2_quadrature(cfg: TwistConfig) -> list[tuple[mpq, GroupElement]]:
    p, c = cfg.p, cfg.c
    shift = mpq(1, p ** c)
    return [(w * _unit_sign(cfg.chi, b), gl2(1, b * shift, 0, 1, p))
            for w, b in units_rule(p, cfg.level("gl2_b"))]


def twist_gl2(v: SmoothVector, cfg: TwistConfig) -> SmoothVector:
    """T_chi(v) = int_{O^x} chi(b) pi([[1, b p^-c], [0, 1]]) v db."""
    _check_size(v, cfg)
    return combine(v.datum, twist_gl2_quadrature(cfg), v)


def beta(v: SmoothVector) -> SmoothVector:
    """Level raising by pi(diag(1, p))."""
    if v.datum.size != 2:
        raise ValueError("beta is a GL(2) operator")
    return v.translate(gl2(1, 0, 0, v.datum.p, v.datum.p))


def beta_prime(v: SmoothVector) -> SmoothVector:
    """Inclusion V(n) -> V(n+1); the vector itself."""
    return v


# ---------------------------------------------------------------------------
# GSp(4)

def tau_power(c: int, p: int) -> GroupElement:
    P = mpq(p)
    return diag((1, P ** -c, P ** c, 1), p)


def eta_translate(v: SmoothVector) -> SmoothVector:
    """pi(eta) v with eta = diag(p^-1, 1, 1, p)."""
    return v.translate(special_element("eta", 0, v.datum.p))


def v_chi_quadrature(cfg: TwistConfig, corner_level: int | None = None,
                     corner_scale=None) -> list[tuple[mpq, GroupElement]]:
    """Weighted elements U(a, b, z) tau^c.

    By default z runs over p^-2c / p^Lz.  With ``corner_level`` set, z is
    replaced by z * corner_scale for z in O / p^corner_level, which is the
    form the corner translates take in the expanded operator.
    """
    p, c, chi = cfg.p, cfg.c, cfg.chi
    tc = tau_power(c, p)
    if corner_level is None:
        zs = list(ideal_rule(p, -2 * c, cfg.level("z")))
    else:
        zs = [(w, z * corner_scale) for w, z in integers_rule(p, corner_level)]
    out = []
    for wa, a in units_rule(p, cfg.level("a")):
        for wb, b in units_rule(p, cfg.level("b")):
            sign = _unit_sign(chi, a) * _unit_sign(chi, b)
            for wz, z in zs:
                out.append((wa * wb * wz * sign, twist_unipotent(a, b, z, c, p) * tc))
    return out


def v_chi(v: SmoothVector, cfg: TwistConfig) -> SmoothVector:
    _check_size(v, cfg)
    return combine(v.datum, v_chi_quadrature(cfg), v)


def t_kl_quadrature(cfg: TwistConfig, parts=("x", "y")) -> list[tuple[mpq, GroupElement]]:
    """``x``: lower32(x), x in O; ``y``: s2 lower32(y), y in p."""
    p = cfg.p
    Lx = cfg.level("x")
    s2 = weyl_s2(p)
    out = []
    if "x" in parts:
        out += [(w, lower32(x, p)) for w, x in integers_rule(p, Lx)]
    if "y" in parts:
        out += [(w, s2 * lower32(y, p)) for w, y in ideal_rule(p, 1, Lx)]
    return out


def t_kl(v: SmoothVector, cfg: TwistConfig, vchi: SmoothVector | None = None) -> SmoothVector:
    """T_chi^Kl(v): the (3,2)-translates of v^chi over O plus their Weyl twists over p."""
    _check_size(v, cfg)
    vchi = v_chi(v, cfg) if vchi is None else vchi
    return combine(v.datum, t_kl_quadrature(cfg), vchi)


def _corner_levels(cfg: TwistConfig) -> tuple[int, int]:
    N = cfg.N
    extra = cfg.level("zN")
    return N + extra, max(N - 1, 0) + extra


def t_chi_quadrature(cfg: TwistConfig) -> list[tuple[mpq, GroupElement]]:
    p, N = cfg.p, cfg.N
    P = mpq(p)
    L1, L2 = _corner_levels(cfg)
    tN = special_element("t_n", N, p)
    out = [(P * w, corner(z / P ** N, p)) for w, z in integers_rule(p, L1)]
    out += [(w, tN * corner(z / P ** (N - 1), p)) for w, z in integers_rule(p, L2)]
    return out


def t_chi(v: SmoothVector, cfg: TwistConfig, tkl: SmoothVector | None = None) -> SmoothVector:
    """T_chi(v) = q int_O pi(corner(z p^-N)) T^Kl v dz + pi(t_N) int_O pi(corner(z p^(1-N))) T^Kl v dz."""
    _check_size(v, cfg)
    tkl = t_kl(v, cfg) if tkl is None else tkl
    return combine(v.datum, t_chi_quadrature(cfg), tkl)


def t_chi_expanded_quadrature(cfg: TwistConfig) -> list[tuple[mpq, GroupElement]]:
    """The four-term explicit form, already multiplied back by q^{2c}.

    The fourth term carries chi(ab) like the other three; without it the term
    would not even transform correctly under the torus.
    """
    p, c, N = cfg.p, cfg.c, cfg.N
    P = mpq(p)
    L1, L2 = _corner_levels(cfg)
    Lx = cfg.level("x")
    s2 = weyl_s2(p)
    tN = special_element("t_n", N, p)
    left_x = [(w, lower32(x, p)) for w, x in integers_rule(p, Lx)]
    left_y = [(w, s2 * lower32(y, p)) for w, y in ideal_rule(p, 1, Lx)]
    inner_N = v_chi_quadrature(cfg, L1, P ** -N)
    inner_N1 = v_chi_quadrature(cfg, L2, P ** (1 - N))
    scale = P ** (2 * c)
    out = []
    for outer, inner, front in ((P, inner_N, None), (mpq(1), inner_N1, tN)):
        for wl, hl in left_x + left_y:
            h0 = hl if front is None else front * hl
            for wi, hi in inner:
                out.append((scale * outer * wl * wi, h0 * hi))
    return out


def t_chi_expanded(v: SmoothVector, cfg: TwistConfig) -> SmoothVector:
    _check_size(v, cfg)
    return combine(v.datum, t_chi_expanded_quadrature(cfg), v)


# ---------------------------------------------------------------------------
# checks

def r1r2_element(r1, r2, p: int) -> GroupElement:
    """[[1, r1/p, r2/p, 0], [., 1, ., r2/p], [., ., 1, -r1/p], [., ., ., 1]]."""
    P = mpq(p)
    x, u = mpq(r1) / P, mpq(r2) / P
    return upper_unipotent(x, 0, u, -x * u, p)


@dataclass
class VanishingReport:
    invariant: bool
    zero: bool
    formally_invariant: bool
    points: int
    failures: list

    @property
    def consistent(self) -> bool:
        """The implication 'invariant => zero' holds on this input."""
        return (not self.invariant) or self.zero


def values_agree(f, g, points) -> tuple[bool, list]:
    bad = []
    for y in points:
        if f(y) != g(y):
            bad.append(y)
    return not bad, bad


def vanishing_criterion_check(v: SmoothVector, cfg: TwistConfig, points,
                              tchi: SmoothVector | None = None) -> VanishingReport:
    """Test invariance of T_chi(v) under all r1r2 elements with r1, r2 in O/p, and vanishing."""
    if not cfg.c:
        raise ValueError("the vanishing criterion needs a ramified character")
    T = t_chi(v, cfg) if tchi is None else tchi
    p = cfg.p
    elems = [r1r2_element(r1, r2, p) for r1 in range(p) for r2 in range(p)]
    base = T.formal_key()
    formal = all(T.translate(h).formal_key() == base for h in elems)
    invariant = formal
    failures = []
    if not formal:
        invariant = True
        for h in elems:
            for y in points:
                if T(y * h) != T(y):
                    invariant = False
                    failures.append(("not-invariant", h, y))
                    break
            if not invariant:
                break
    zero = all(not T(y) for y in points)
    return VanishingReport(invariant, zero, formal, len(points), failures)


@dataclass
class RefinementReport:
    formal_equal: bool
    values_equal: bool
    terms: tuple

    @property
    def passed(self) -> bool:
        return self.formal_equal or self.values_equal


def refinement_check(op, v: SmoothVector, cfg: TwistConfig, points) -> RefinementReport:
    """Run op at cfg and at every level + 1; the results must agree."""
    a = op(v, cfg)
    b = op(v, cfg.refined())
    formal = a.formal_key() == b.formal_key()
    vals = formal or values_agree(a, b, points)[0]
    return RefinementReport(formal, vals, (len(a), len(b)))


def psi_factor_check(v: SmoothVector, cfg: TwistConfig, samples: int = 20,
                     rng: random.Random | None = None) -> tuple[int, int]:
    """Moving U(a, b, z) left past lower32(x) releases psi(c1(-a p^-c - b x p^-2c)).

    Both sides are evaluated at diag(t, t, 1, 1) lower32(x) U(a, b, z) tau^c
    for random t, x, a, b, z.  Returns (passed, total).
    """
    rng = rng or random.Random(0)
    d: WhittakerDatum = v.datum
    p, c = cfg.p, cfg.c
    P = mpq(p)
    tc = tau_power(c, p)
    units = [u for u in range(1, p ** 2) if u % p]
    ok = 0
    for _ in range(samples):
        a, b = rng.choice(units), rng.choice(units)
        x = mpq(rng.randrange(p ** 3))
        z = mpq(rng.randrange(p ** 3)) / P ** (2 * c)
        t = P ** rng.randint(-2, 3) * rng.choice(units)
        torus = diag((t, t, 1, 1), p)
        lhs = v(torus * lower32(x, p) * twist_unipotent(a, b, z, c, p) * tc)
        factor = d.psi(d.c1 * (-mpq(a) / P ** c - mpq(b) * x / P ** (2 * c)))
        rhs = factor * v(torus * lower32(x, p) * corner(z, p) * tc)
        ok += lhs == rhs
    return ok, samples
