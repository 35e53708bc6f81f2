"""GL(2) and GSp(4) over Q_p with exact rational entries."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .padic import INF, residue, to_q, unit_residues, vp

ZERO = mpq(0)
ONE = mpq(1)

# the alternating form preserved up to scalar by GSp(4)
J4 = ((0, 0, 0, 1), (0, 0, 1, 0), (0, -1, 0, 0), (-1, 0, 0, 0))


def _matmul(a, b):
    n = len(a)
    m = len(b[0])
    inner = len(b)
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(inner) if a[i][k] and b[k][j]), ZERO)
                       for j in range(m)) for i in range(n))


class NotSymplecticError(ValueError):
    pass


class GroupElement:
    """Invertible 2x2 matrix or 4x4 symplectic similitude with rational entries."""

    __slots__ = ("p", "rows", "__dict__")

    def __init__(self, rows, p: int, check: bool = True):
        self.rows = tuple(tuple(mpq(x) if not isinstance(x, type(ZERO)) else x for x in r)
                          for r in rows)
        self.p = p
        n = len(self.rows)
        if n not in (2, 4) or any(len(r) != n for r in self.rows):
            raise ValueError("expected a 2x2 or 4x4 matrix")
        if check:
            if n == 2:
                if not self.det():
                    raise ValueError("singular matrix")
            else:
                self.similitude()

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        out = GroupElement(_matmul(self.rows, other.rows), self.p, check=False)
        if self.size == 4 and "_lam" in self.__dict__ and "_lam" in other.__dict__:
            out.__dict__["_lam"] = self.similitude() * other.similitude()
        return out

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"GroupElement([{body}], p={self.p})"

    def det(self) -> mpq:
        r = self.rows
        if self.size == 2:
            return r[0][0] * r[1][1] - r[0][1] * r[1][0]
        return _det4(r)

    def transpose(self) -> "GroupElement":
        return GroupElement(tuple(zip(*self.rows)), self.p, check=False)

    def similitude(self) -> mpq:
        """lambda(g) with tg J g = lambda J; raises on failure, naming the bad entry."""
        cached = self.__dict__.get("_lam")
        if cached is not None:
            return cached
        if self.size != 4:
            raise ValueError("similitude is defined for 4x4 elements")
        form = _matmul(_matmul(tuple(zip(*self.rows)), J4), self.rows)
        lam = form[0][3]
        for i in range(4):
            for j in range(4):
                expected = lam * J4[i][j]
                if form[i][j] != expected:
                    raise NotSymplecticError(
                        f"entry ({i + 1},{j + 1}) of tgJg - lam J is {form[i][j] - expected}")
        if not lam:
            raise NotSymplecticError("degenerate similitude")
        self.__dict__["_lam"] = lam
        return lam

    def inverse(self) -> "GroupElement":
        r = self.rows
        if self.size == 2:
            d = self.det()
            return GroupElement(((r[1][1] / d, -r[0][1] / d), (-r[1][0] / d, r[0][0] / d)), self.p,
                                check=False)
        lam = self.similitude()
        # g^-1 = lam^-1 J^-1 tg J with J^-1 = -J
        t = tuple(zip(*r))
        inv = _matmul(_matmul(tuple(tuple(-x for x in row) for row in J4), t), J4)
        out = GroupElement(tuple(tuple(x / lam for x in row) for row in inv), self.p, check=False)
        out.__dict__["_lam"] = 1 / lam
        return out

    def is_integral(self) -> bool:
        p = self.p
        return all(not x or vp(x, p) >= 0 for r in self.rows for x in r)

    def min_valuation(self):
        return min((vp(x, self.p) for r in self.rows for x in r if x), default=INF)

    def is_identity(self) -> bool:
        return all(self.rows[i][j] == (1 if i == j else 0)
                   for i in range(self.size) for j in range(self.size))

    def scaled(self, c) -> "GroupElement":
        c = to_q(c)
        return GroupElement(tuple(tuple(x * c for x in r) for r in self.rows), self.p, check=False)


def _det4(m):
    # Laplace along the first row; entries are sparse in practice
    total = ZERO
    for j in range(4):
        if not m[0][j]:
            continue
        minor = [[m[i][k] for k in range(4) if k != j] for i in range(1, 4)]
        d3 = (minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1])
              - minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0])
              + minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]))
        total += (-1) ** j * m[0][j] * d3
    return total


def similitude(g: GroupElement) -> mpq:
    return g.similitude()


# ---------------------------------------------------------------------------
# constructors

def identity(p: int, size: int = 4) -> GroupElement:
    return GroupElement(tuple(tuple(ONE if i == j else ZERO for j in range(size))
                              for i in range(size)), p, check=False)


def diag(entries, p: int) -> GroupElement:
    n = len(entries)
    return GroupElement(tuple(tuple(to_q(entries[i]) if i == j else ZERO for j in range(n))
                              for i in range(n)), p)


def upper_unipotent(x, y, u, v, p: int) -> GroupElement:
    """x_{a1}(x) x_{a2}(y) with the centre-adjacent coordinates u (1,3)=(2,4) and v."""
    x, y, u, v = map(to_q, (x, y, u, v))
    g = GroupElement(((ONE, x, x * y + u, x * u + v),
                      (ZERO, ONE, y, u),
                      (ZERO, ZERO, ONE, -x),
                      (ZERO, ZERO, ZERO, ONE)), p, check=False)
    g.__dict__["_lam"] = ONE
    return g


def lower_unipotent(x, y, u, v, p: int) -> GroupElement:
    g = upper_unipotent(x, y, u, v, p).transpose()
    g.__dict__["_lam"] = ONE
    return g


def elementary(i: int, j: int, x, p: int, size: int = 4) -> GroupElement:
    """Identity plus x in position (i, j), 1-based."""
    rows = [[ONE if a == b else ZERO for b in range(size)] for a in range(size)]
    rows[i - 1][j - 1] = to_q(x)
    return GroupElement(rows, p, check=(size == 2))


def corner(w, p: int) -> GroupElement:
    """I + w E_14."""
    g = elementary(1, 4, w, p)
    g.__dict__["_lam"] = ONE
    return g


def lower32(x, p: int) -> GroupElement:
    """I + x E_32."""
    g = elementary(3, 2, x, p)
    g.__dict__["_lam"] = ONE
    return g


def levi_gl2(a, b, c, d, p: int, outer=ONE) -> GroupElement:
    """diag(outer, A, det(A)/outer) with A = [[a, b], [c, d]]."""
    a, b, c, d, outer = map(to_q, (a, b, c, d, outer))
    det = a * d - b * c
    g = GroupElement(((outer, ZERO, ZERO, ZERO), (ZERO, a, b, ZERO),
                      (ZERO, c, d, ZERO), (ZERO, ZERO, ZERO, det / outer)), p, check=False)
    g.__dict__["_lam"] = det
    return g


def weyl_s2(p: int) -> GroupElement:
    """The middle Weyl element [[1],[.,.,1],[.,-1,.],[...,1]]."""
    return levi_gl2(0, 1, -1, 0, p)


def special_element(name: str, n: int = 0, p: int = 3) -> GroupElement:
    P = mpq(p)
    if name == "eta":
        return diag((1 / P, 1, 1, P), p)
    if name == "tau":
        return diag((1, 1 / P, P, 1), p)
    if name in ("t_n", "t"):
        g = GroupElement(((ZERO, ZERO, ZERO, -P ** -n), (ZERO, ONE, ZERO, ZERO),
                          (ZERO, ZERO, ONE, ZERO), (P ** n, ZERO, ZERO, ZERO)), p)
        return g
    raise ValueError(f"unknown special element {name!r}")


def gl2(a, b, c, d, p: int) -> GroupElement:
    return GroupElement(((a, b), (c, d)), p)


# ---------------------------------------------------------------------------
# subgroups

def _val_ok(x, bound, p) -> bool:
    if bound is None:
        return not x
    if bound == "one":
        return x == 1
    return not x or vp(x, p) >= bound


@dataclass(frozen=True)
class SubgroupSpec:
    """Entrywise ideal conditions.

    Each pattern entry is an exponent e (entry in p^e), None (entry is 0) or
    "one" (entry equals 1).  ``unit_similitude`` additionally requires
    lambda in O^x (or det in O^x for GL(2)).
    """
    kind: str
    level: int
    pattern: tuple = field(default=None)
    unit_similitude: bool = True

    def __post_init__(self):
        if self.pattern is None:
            object.__setattr__(self, "pattern", _standard_pattern(self.kind, self.level))

    @property
    def size(self) -> int:
        return len(self.pattern)


def _standard_pattern(kind: str, n: int):
    if kind == "Gamma0":
        return ((0, 0), (n, 0))
    if kind == "Klingen":
        return ((0, 0, 0, 0), (n, 0, 0, 0), (n, 0, 0, 0), (n, n, n, 0))
    if kind == "Paramodular":
        return ((0, 0, 0, -n), (n, 0, 0, 0), (n, 0, 0, 0), (n, n, n, 0))
    if kind == "Maximal":
        return ((0,) * 4,) * 4
    raise ValueError(f"pattern required for subgroup kind {kind!r}")


def gamma0(n: int) -> SubgroupSpec:
    return SubgroupSpec("Gamma0", n)


def klingen(n: int) -> SubgroupSpec:
    return SubgroupSpec("Klingen", n)


def paramodular(n: int) -> SubgroupSpec:
    return SubgroupSpec("Paramodular", n)


def maximal_compact() -> SubgroupSpec:
    return SubgroupSpec("Maximal", 0)


def twist_invariance_group(c: int) -> SubgroupSpec:
    """The group under which the averaged vector transforms by chi(lambda)."""
    Z = None
    return SubgroupSpec("PrincipalPattern", c, (
        (0, 0, 0, -2 * c),
        (Z, 0, 0, 0),
        (Z, 2 * c, 0, 0),
        (Z, Z, Z, 0)))


def lower_congruence_group(first: int, corner_exp: int, with_32: bool = False,
                           with_41: bool = True) -> SubgroupSpec:
    """Unipotent lower-triangular groups with unit diagonal.

    ``first`` bounds the (2,1),(3,1),(4,2),(4,3) entries and ``corner_exp`` the (4,1) entry.
    """
    Z, I = None, "one"
    return SubgroupSpec("PrincipalPattern", first, (
        (I, Z, Z, Z),
        (first, I, Z, Z),
        (first, first if with_32 else Z, I, Z),
        (corner_exp if with_41 else Z, first, first, I)), unit_similitude=False)


def conjugation_invariance_group(n: int, c: int) -> SubgroupSpec:
    a = max(n + c, 3 * c)
    b = max(n + 2 * c, 4 * c)
    return lower_congruence_group(a, b)


def second_klingen_group(n: int, c: int) -> SubgroupSpec:
    N = max(n + 2 * c, 4 * c)
    return lower_congruence_group(N - c, None, with_41=False)


def is_member(g: GroupElement, S: SubgroupSpec) -> bool:
    if g.size != S.size:
        return False
    p = g.p
    for i in range(g.size):
        for j in range(g.size):
            if not _val_ok(g.rows[i][j], S.pattern[i][j], p):
                return False
    if g.size == 4:
        try:
            lam = g.similitude()
        except NotSymplecticError:
            return False
    else:
        lam = g.det()
    if S.unit_similitude and vp(lam, p) != 0:
        return False
    return True


# ---------------------------------------------------------------------------
# generators

def _rand_unit(rng, p, m=3):
    return mpq(rng.choice(unit_residues(p, m)))


def _rand_int(rng, p, m=3):
    return mpq(rng.randrange(p ** m))


def _rand_in(rng, p, e, m=3):
    """Random element of p^e (truncated)."""
    return mpq(p) ** e * _rand_int(rng, p, m)


class GeneratorSampler:
    """Yields the listed generator families of a subgroup and random words in them."""

    def __init__(self, S: SubgroupSpec, p: int, seed: int = 0, depth: int = 3):
        self.S = S
        self.p = p
        self.rng = random.Random(seed)
        self.depth = depth
        self.families = _families(S, p)
        # a pattern whose corner is forced to 0 is a set of elements, not a group
        self.closed = not (S.kind == "PrincipalPattern" and S.pattern[3][0] is None)

    def family_names(self) -> list[str]:
        return list(self.families)

    def sample(self, family: str | None = None) -> GroupElement:
        name = family or self.rng.choice(list(self.families))
        return self.families[name](self.rng)

    def word(self, length: int | None = None) -> GroupElement:
        length = self.rng.randint(0, 4) if length is None else length
        if not self.closed:
            length = min(length, 1)
        g = identity(self.p, self.S.size)
        for _ in range(length):
            g = g * self.sample()
        return g

    def __iter__(self):
        while True:
            yield self.word()


def _families(S: SubgroupSpec, p: int) -> dict:
    n = S.level
    if S.kind == "Gamma0":
        return {
            "torus": lambda r: diag((_rand_unit(r, p), _rand_unit(r, p)), p),
            "upper": lambda r: gl2(1, _rand_int(r, p), 0, 1, p),
            "lower": lambda r: gl2(1, 0, _rand_in(r, p, n), 1, p),
        }
    if S.kind in ("Klingen", "Maximal"):
        return _klingen_families(n, p)
    if S.kind == "Paramodular":
        reps = paramodular_coset_representatives(n, p)
        kl = _klingen_families(n, p)

        def coset_times_klingen(r):
            g = r.choice(reps)
            for _ in range(r.randint(1, 3)):
                g = g * kl[r.choice(list(kl))](r)
            return g

        fam = dict(kl)
        fam["t_N"] = lambda r: special_element("t_n", n, p)
        fam["corner"] = lambda r: corner(_rand_int(r, p) / mpq(p) ** n, p)
        fam["coset_klingen"] = coset_times_klingen
        return fam
    if S.kind == "PrincipalPattern":
        return _pattern_families(S, p)
    raise ValueError(S.kind)


def _klingen_families(n: int, p: int) -> dict:
    def lower(r):
        x, u, w = (_rand_in(r, p, n) for _ in range(3))
        # transpose of n(x, 0, u, v) has (4,1) entry x u + v
        return lower_unipotent(x, 0, u, w - x * u, p)

    def upper(r):
        return upper_unipotent(_rand_int(r, p), 0, _rand_int(r, p), _rand_int(r, p), p)

    def levi(r):
        while True:
            a, b, c, d = (_rand_int(r, p) for _ in range(4))
            if (a * d - b * c) % p:
                break
        outer = _rand_unit(r, p)
        return levi_gl2(a, b, c, d, p, outer)

    return {"lower": lower, "upper": upper, "levi": levi}


def _pattern_families(S: SubgroupSpec, p: int) -> dict:
    pat = S.pattern
    if pat == twist_invariance_group(S.level).pattern:
        c = S.level

        def torus(r):
            w1, w2, w = (_rand_unit(r, p) for _ in range(3))
            return diag((w1 * w2 * w, w1 * w, w2 * w, w), p)

        return {
            "torus": torus,
            "corner": lambda r: corner(_rand_in(r, p, -2 * c, 4), p),
            "x12": lambda r: upper_unipotent(_rand_int(r, p), 0, 0, 0, p),
            "x13": lambda r: upper_unipotent(0, 0, _rand_int(r, p), 0, p),
            "x23": lambda r: upper_unipotent(0, _rand_int(r, p), 0, 0, p),
            "x32": lambda r: lower32(_rand_in(r, p, 2 * c), p),
        }
    # lower unipotent congruence groups
    first = pat[1][0]
    corner_exp = pat[3][0]
    has_32 = pat[2][1] is not None

    def member(r):
        x = _rand_in(r, p, first)
        u = _rand_in(r, p, first)
        y = _rand_in(r, p, first) if has_32 else ZERO
        if corner_exp is None:
            w = ZERO
        else:
            w = _rand_in(r, p, corner_exp)
        # transpose of n(x, y, u, v): (4,1) = x u + v
        return lower_unipotent(x, y, u, w - x * u, p)

    return {"member": member}


def generators(S: SubgroupSpec, p: int, seed: int = 0) -> GeneratorSampler:
    return GeneratorSampler(S, p, seed)


# ---------------------------------------------------------------------------
# Iwasawa decomposition

@dataclass
class Iwasawa:
    n: GroupElement
    t: GroupElement
    k: GroupElement

    @property
    def exponents(self) -> tuple:
        return tuple(vp(self.t.rows[i][i], self.t.p) for i in range(self.t.size))


def _weyl_elements(p: int):
    out = []
    for perm in itertools.permutations(range(4)):
        for signs in itertools.product((1, -1), repeat=4):
            rows = [[ZERO] * 4 for _ in range(4)]
            for i in range(4):
                rows[i][perm[i]] = mpq(signs[i])
            g = GroupElement(rows, p, check=False)
            try:
                if g.similitude() == 1:
                    out.append(g)
            except NotSymplecticError:
                pass
    return out


_WEYL_CACHE: dict = {}


def _weyl_to_last(j: int, p: int) -> GroupElement:
    """A signed permutation in GSp(4,Z) whose right action moves column j to column 3 (0-based)."""
    key = (j, p)
    if key not in _WEYL_CACHE:
        for w in _weyl_elements(p):
            if w.rows[j][3]:
                _WEYL_CACHE[key] = w
                break
    return _WEYL_CACHE[key]


def _min_col(row, cols, p):
    best, best_v = None, INF
    for j in cols:
        x = row[j]
        if x:
            v = vp(x, p)
            if v < best_v:
                best, best_v = j, v
    return best


def iwasawa(g: GroupElement) -> Iwasawa:
    """g = n t k with n upper unipotent, t = diag of p-powers, k integral with unit similitude."""
    p = g.p
    if g.size == 2:
        return _iwasawa2(g)
    kacc = identity(p)
    h = g
    j = _min_col(h.rows[3], range(4), p)
    if j != 3:
        w = _weyl_to_last(j, p)
        h, kacc = h * w, kacc * w
    r = h.rows
    piv = r[3][3]
    # clear (4,3) together with (2,1), then (4,2) with (3,1), then (4,1)
    s = -r[3][2] / piv
    if s:
        m = lower_unipotent(-s, 0, 0, 0, p)
        h, kacc = h * m, kacc * m
    r = h.rows
    s = -r[3][1] / piv
    if s:
        m = lower_unipotent(0, 0, s, 0, p)
        h, kacc = h * m, kacc * m
    r = h.rows
    s = -r[3][0] / piv
    if s:
        m = lower_unipotent(0, 0, 0, s, p)
        h, kacc = h * m, kacc * m
    r = h.rows
    # middle block: triangularize with the Levi GL(2,O)
    a, b = r[2][1], r[2][2]
    if a:
        if not b or vp(a, p) < vp(b, p):
            m = levi_gl2(0, 1, 1, 0, p)
            h, kacc = h * m, kacc * m
            r = h.rows
            a, b = r[2][1], r[2][2]
        m = levi_gl2(1, 0, -a / b, 1, p)
        h, kacc = h * m, kacc * m
        r = h.rows
    return _finish(g, h, kacc)


def _iwasawa2(g: GroupElement) -> Iwasawa:
    p = g.p
    kacc = identity(p, 2)
    h = g
    c, d = h.rows[1]
    if c and (not d or vp(c, p) < vp(d, p)):
        w = gl2(0, 1, -1, 0, p)
        h, kacc = h * w, kacc * w
        c, d = h.rows[1]
    if c:
        m = gl2(1, 0, -c / d, 1, p)
        h, kacc = h * m, kacc * m
    return _finish(g, h, kacc)


def _finish(g: GroupElement, b: GroupElement, kacc: GroupElement) -> Iwasawa:
    p = g.p
    size = g.size
    for i in range(size):
        for j in range(i):
            if b.rows[i][j]:
                raise ArithmeticError("triangularization failed")
    exps = [vp(b.rows[i][i], p) for i in range(size)]
    t = diag([mpq(p) ** e for e in exps], p)
    dvals = [b.rows[i][i] for i in range(size)]
    n = GroupElement(tuple(tuple(b.rows[i][j] / dvals[j] for j in range(size)) for i in range(size)),
                     p, check=False)
    if size == 4:
        n.__dict__["_lam"] = ONE
    k = (n * t).inverse() * g
    if not k.is_integral():
        raise ArithmeticError("non-integral compact factor")
    lam = k.similitude() if size == 4 else k.det()
    if vp(lam, p) != 0:
        raise ArithmeticError("compact factor has non-unit similitude")
    if n * t * k != g:
        raise ArithmeticError("reconstruction failed")
    return Iwasawa(n, t, k)


# ---------------------------------------------------------------------------
# coset decompositions

def sl2_coset_representatives(c: int, p: int) -> list[GroupElement]:
    """SL(2,O) / Gamma0(p^{2c}): lower unipotents, then the Weyl-twisted ones."""
    m = 2 * c
    reps = [gl2(1, 0, x, 1, p) for x in range(p ** m)]
    w = gl2(0, 1, -1, 0, p)
    reps += [w * gl2(1, 0, p * y, 1, p) for y in range(p ** (m - 1))]
    return reps


def sl2_coset_index(g, c: int, p: int, reps=None) -> list[int]:
    """Indices i with reps[i]^-1 g in Gamma0(p^{2c}); g may be a residue-matrix tuple."""
    reps = reps or sl2_coset_representatives(c, p)
    mod = p ** (2 * c)
    hits = []
    for i, r in enumerate(reps):
        ri = r.inverse()
        # only the lower-left entry of ri * g matters
        ll = ri.rows[1][0] * g[0][0] + ri.rows[1][1] * g[1][0]
        if residue(ll, p, 2 * c) % mod == 0:
            hits.append(i)
    return hits


def enumerate_sl2_mod(p: int, m: int):
    """All of SL(2, Z/p^m) as residue tuples."""
    mod = p ** m
    for a in range(mod):
        if a % p:
            ainv = pow(a, -1, mod)
            for b in range(mod):
                for c in range(mod):
                    yield ((a, b), (c, (1 + b * c) * ainv % mod))
        else:
            # a is not a unit, so b is
            for b in range(mod):
                if b % p == 0:
                    continue
                binv = pow(b, -1, mod)
                for d in range(mod):
                    yield ((a, b), ((a * d - 1) * binv % mod, d))


def paramodular_coset_representatives(N: int, p: int) -> list[GroupElement]:
    """K(p^N) / Kl(p^N)."""
    P = mpq(p)
    reps = [corner(z / P ** N, p) for z in range(p ** N)]
    if N >= 1:
        tN = special_element("t_n", N, p)
        reps += [tN * corner(z / P ** (N - 1), p) for z in range(p ** (N - 1))]
    return reps


def coset_memberships(g: GroupElement, reps, S: SubgroupSpec, inverses=None) -> list[int]:
    inverses = inverses or [r.inverse() for r in reps]
    return [i for i, ri in enumerate(inverses) if is_member(ri * g, S)]


# ---------------------------------------------------------------------------
# the conjugation identities behind the twisted-vector invariance

def twist_unipotent(a, b, z, c: int, p: int) -> GroupElement:
    """[[1, -a/p^c, b/p^2c, z], [., 1, ., b/p^2c], [., ., 1, a/p^c], [., ., ., 1]]."""
    P = mpq(p)
    a, b, z = map(to_q, (a, b, z))
    x = -a / P ** c
    u = b / P ** (2 * c)
    # n(x, 0, u, v) has (1,4) entry x u + v
    return upper_unipotent(x, 0, u, z - x * u, p)


@dataclass
class IdentityReport:
    first: bool
    second: bool
    third: bool
    residual_in_klingen: bool
    L: int

    @property
    def passed(self) -> bool:
        return self.first and self.second and self.third and self.residual_in_klingen


def verify_conjugation_identities(a, b, cc, y, L: int, c: int, n: int, p: int,
                                  third_L: int | None = None) -> IdentityReport:
    """Check the three matrix identities for g = U(a, b, cc p^-2c) tau^c.

    The first two use the supplied L; the third uses third_L (default max(n+c, 3c)).
    """
    P = mpq(p)
    a, b, cc, y = map(to_q, (a, b, cc, y))
    tau_c = diag((1, P ** -c, P ** c, 1), p)
    g = twist_unipotent(a, b, cc / P ** (2 * c), c, p) * tau_c
    e = P ** L
    yl = y * e

    def pw(k):
        return P ** k

    lhs1 = lower_unipotent(yl, 0, 0, 0, p) * g
    rhs1 = g * GroupElement((
        (1 + a * y * pw(L - c), -a * a * y * pw(L - 3 * c), (a * b + cc * pw(c)) * y * pw(L - 2 * c),
         2 * a * cc * y * pw(L - 3 * c)),
        (y * pw(L + c), 1 - a * y * pw(L - c), 2 * b * y * pw(L), (a * b + cc * pw(c)) * y * pw(L - 2 * c)),
        (0, 0, 1 + a * y * pw(L - c), a * a * y * pw(L - 3 * c)),
        (0, 0, -y * pw(L + c), 1 - a * y * pw(L - c))), p, check=False)
    first = lhs1 == rhs1

    lhs2 = elementary(4, 1, yl, p) * g
    rhs2 = g * GroupElement((
        (1 - cc * y * pw(L - 2 * c), a * cc * y * pw(L - 4 * c), -b * cc * y * pw(L - 3 * c),
         -cc * cc * y * pw(L - 4 * c)),
        (-b * y * pw(L - c), 1 + a * b * y * pw(L - 3 * c), -b * b * y * pw(L - 2 * c),
         -b * cc * y * pw(L - 3 * c)),
        (-a * y * pw(L - 2 * c), a * a * y * pw(L - 4 * c), 1 - a * b * y * pw(L - 3 * c),
         -a * cc * y * pw(L - 4 * c)),
        (y * pw(L), -a * y * pw(L - 2 * c), b * y * pw(L - c), 1 + cc * y * pw(L - 2 * c))), p, check=False)
    second = lhs2 == rhs2

    L3 = max(n + c, 3 * c) if third_L is None else third_L
    y3 = y * P ** L3
    u = 1 + b * y * P ** (L3 - 2 * c)
    lhs3 = lower_unipotent(0, 0, y3, 0, p) * g
    w = (-2 * b * y * cc + a * b ** 3 * y * y * P ** (L3 - 3 * c)) / (u * u) * P ** (L3 - 4 * c)
    s = a * b * y / u * P ** (L3 - 4 * c)
    pre = g * corner(w, p) * upper_unipotent(s, 0, 0, 0, p)
    k = pre.inverse() * lhs3
    residual = is_member(k, klingen(n))
    third = pre * k == lhs3
    return IdentityReport(first, second, third, residual, L)
