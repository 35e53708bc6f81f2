"""Exact arithmetic in Q(zeta_{p^M}, sqrt p).

Elements are a + b*sqrt(p) with a, b in Q(zeta) stored sparsely in the
power basis {zeta^e : 0 <= e < (p-1) p^(M-1)}.

When p = 1 mod 4 the quadratic Gauss sum already lies in Q(zeta_p) and
squares to p, so sqrt(p) is rewritten in terms of zeta and b is always 0.
When p = 3 mod 4, sqrt(p) is not in Q(zeta_{p^M}) and the pair (a, b) is a
faithful coordinate system for the degree-2 extension.  Either way the
representation is canonical and equality is exact.
"""
from __future__ import annotations

from gmpy2 import mpq

from .padic import frac_part, legendre, to_q


class PrecisionError(ValueError):
    """A root of unity deeper than the configured depth M was required."""


def _reduce_poly(poly: dict, p: int, M: int) -> dict:
    """Reduce a sparse exponent->coeff map modulo Phi_{p^M}."""
    n = p ** M
    step = p ** (M - 1)
    deg = (p - 1) * step
    out: dict = {}
    for e, c in poly.items():
        if not c:
            continue
        e %= n
        if e < deg:
            out[e] = out.get(e, 0) + c
        else:
            r = e - deg
            for j in range(p - 1):
                k = r + j * step
                out[k] = out.get(k, 0) - c
    return {e: c for e, c in out.items() if c}


def _promote(poly: dict, factor: int) -> dict:
    if factor == 1:
        return poly
    return {e * factor: c for e, c in poly.items()}


def _mul_poly(x: dict, y: dict, p: int, M: int) -> dict:
    if not x or not y:
        return {}
    n = p ** M
    out: dict = {}
    for e1, c1 in x.items():
        for e2, c2 in y.items():
            e = (e1 + e2) % n
            out[e] = out.get(e, 0) + c1 * c2
    return _reduce_poly(out, p, M)


def _add_poly(x: dict, y: dict, sign=1) -> dict:
    out = dict(x)
    for e, c in y.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _gauss_sqrt(p: int, M: int) -> dict:
    """sqrt(p) as a polynomial in zeta_{p^M}, valid for p = 1 mod 4."""
    step = p ** (M - 1)
    poly = {a * step: mpq(legendre(a, p)) for a in range(1, p)}
    return _reduce_poly(poly, p, M)


class CycScalar:
    __slots__ = ("p", "M", "a", "b")

    def __init__(self, p: int, M: int = 1, a: dict | None = None, b: dict | None = None,
                 _reduced: bool = False):
        if p % 2 == 0:
            raise ValueError("only odd primes are supported")
        self.p = p
        self.M = max(M, 1)
        a = {e: mpq(c) for e, c in (a or {}).items()}
        b = {e: mpq(c) for e, c in (b or {}).items()}
        if not _reduced:
            a = _reduce_poly(a, p, self.M)
            b = _reduce_poly(b, p, self.M)
        if b and p % 4 == 1:
            a = _add_poly(a, _mul_poly(b, _gauss_sqrt(p, self.M), p, self.M))
            b = {}
        self.a = a
        self.b = b

    # construction helpers
    @classmethod
    def rational(cls, x, p: int, M: int = 1) -> "CycScalar":
        x = to_q(x)
        return cls(p, M, {0: x} if x else {}, _reduced=True)

    @classmethod
    def zero(cls, p: int, M: int = 1) -> "CycScalar":
        return cls(p, M, _reduced=True)

    @classmethod
    def one(cls, p: int, M: int = 1) -> "CycScalar":
        return cls.rational(1, p, M)

    @classmethod
    def zeta_power(cls, r: int, k: int, p: int, M: int) -> "CycScalar":
        """zeta_{p^k}^r inside depth M >= k."""
        if k > M:
            raise PrecisionError(f"need zeta of order {p}^{k} but depth is {M}")
        return cls(p, M, {(r * p ** (M - k)) % p ** M: mpq(1)})

    @classmethod
    def sqrt_p_power(cls, n: int, p: int, M: int = 1) -> "CycScalar":
        """sqrt(p)^n for any integer n."""
        half, odd = divmod(n, 2)
        scale = mpq(p) ** half
        if odd:
            return cls(p, M, b={0: scale})
        return cls.rational(scale, p, M)

    # internal
    def _lift(self, M: int):
        f = self.p ** (M - self.M)
        return _promote(self.a, f), _promote(self.b, f)

    def _coerce(self, other):
        if isinstance(other, CycScalar):
            if other.p != self.p:
                raise ValueError("mixing primes")
            return other
        return CycScalar.rational(other, self.p, self.M)

    def with_depth(self, M: int) -> "CycScalar":
        if M < self.M:
            raise ValueError("cannot lower depth")
        a, b = self._lift(M)
        return CycScalar(self.p, M, a, b, _reduced=True)

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        M = max(self.M, other.M)
        a1, b1 = self._lift(M)
        a2, b2 = other._lift(M)
        return CycScalar(self.p, M, _add_poly(a1, a2), _add_poly(b1, b2), _reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(self.p, self.M, {e: -c for e, c in self.a.items()},
                         {e: -c for e, c in self.b.items()}, _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, CycScalar):
            x = to_q(other)
            if not x:
                return CycScalar.zero(self.p, self.M)
            return CycScalar(self.p, self.M, {e: c * x for e, c in self.a.items()},
                             {e: c * x for e, c in self.b.items()}, _reduced=True)
        other = self._coerce(other)
        p = self.p
        M = max(self.M, other.M)
        a1, b1 = self._lift(M)
        a2, b2 = other._lift(M)
        a = _mul_poly(a1, a2, p, M)
        bb = _mul_poly(b1, b2, p, M)
        if bb:
            a = _add_poly(a, {e: c * p for e, c in bb.items()})
        b = _add_poly(_mul_poly(a1, b2, p, M), _mul_poly(b1, a2, p, M))
        return CycScalar(p, M, a, b, _reduced=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers unsupported")
        out = CycScalar.one(self.p, self.M)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        M = max(self.M, other.M)
        return self._lift(M) == other._lift(M)

    def __hash__(self):
        a, b = self.normalized()
        return hash((self.p, tuple(sorted(a.items())), tuple(sorted(b.items()))))

    def normalized(self):
        """Coordinates at the smallest depth that holds the element."""
        M = self.M
        a, b = self.a, self.b
        while M > 1:
            f = self.p
            if all(e % f == 0 for e in a) and all(e % f == 0 for e in b):
                a = {e // f: c for e, c in a.items()}
                b = {e // f: c for e, c in b.items()}
                M -= 1
            else:
                break
        return a, b

    def __bool__(self):
        return bool(self.a or self.b)

    def is_rational(self) -> bool:
        return not self.b and set(self.a) <= {0}

    def to_rational(self) -> mpq:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.a.get(0, mpq(0))

    def conjugate(self) -> "CycScalar":
        """zeta -> zeta^-1, sqrt p fixed."""
        n = self.p ** self.M
        return CycScalar(self.p, self.M, {(-e) % n: c for e, c in self.a.items()},
                         {(-e) % n: c for e, c in self.b.items()})

    def conjugate_abs_square(self) -> "CycScalar":
        return self * self.conjugate()

    def __repr__(self):
        return f"CycScalar({self.to_string()})"

    def to_string(self) -> str:
        """Stable text form: rational coefficients on z^e, z = zeta_{p^M}."""
        a, b = self.normalized()
        depth = self._min_depth()

        def poly_str(poly):
            if not poly:
                return "0"
            parts = []
            for e in sorted(poly):
                c = poly[e]
                mono = "1" if e == 0 else f"z^{e}"
                parts.append(f"{c}*{mono}")
            return " + ".join(parts)

        out = f"[p={self.p},M={depth}] {poly_str(a)}"
        if b:
            out += f" + sqrt({self.p})*({poly_str(b)})"
        return out

    def _min_depth(self) -> int:
        M = self.M
        a, b = self.a, self.b
        while M > 1 and all(e % self.p == 0 for e in a) and all(e % self.p == 0 for e in b):
            a = {e // self.p: c for e, c in a.items()}
            b = {e // self.p: c for e, c in b.items()}
            M -= 1
        return M

    def to_json(self) -> dict:
        """Integer-coefficient serialization: common denominator plus coefficient lists."""
        a, b = self.normalized()
        depth = self._min_depth()
        coeffs = list(a.values()) + list(b.values())
        den = 1
        for c in coeffs:
            den = den * int(c.denominator) // _gcd(den, int(c.denominator))
        deg = (self.p - 1) * self.p ** (depth - 1)
        av = [0] * deg
        bv = [0] * deg
        for e, c in a.items():
            av[e] = int(c * den)
        for e, c in b.items():
            bv[e] = int(c * den)
        out = {"p": self.p, "M": depth, "den": den, "zeta": " ".join(map(str, av))}
        if any(bv):
            out["sqrtp_zeta"] = " ".join(map(str, bv))
        return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def psi(x, p: int, M: int) -> CycScalar:
    """The additive character trivial on O but not on p^-1: x = r/p^k mod O -> zeta_{p^k}^r."""
    r, k = frac_part(x, p)
    if k == 0:
        return CycScalar.one(p, M)
    return CycScalar.zeta_power(r, k, p, M)


class ZetaSeries:
    """Finitely supported Laurent polynomial in X with CycScalar coefficients."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: dict | None = None):
        self.p = p
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if c}

    def __add__(self, other: "ZetaSeries") -> "ZetaSeries":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return ZetaSeries(self.p, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "ZetaSeries":
        return ZetaSeries(self.p, {m: v * c for m, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, ZetaSeries):
            return self.scale(other)
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = m1 + m2
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return ZetaSeries(self.p, out)

    def __eq__(self, other):
        if not isinstance(other, ZetaSeries):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        zero = CycScalar.zero(self.p)
        return all(self.coeffs.get(m, zero) == other.coeffs.get(m, zero) for m in keys)

    def __getitem__(self, m: int) -> CycScalar:
        return self.coeffs.get(m, CycScalar.zero(self.p))

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def is_constant(self) -> bool:
        return set(self.coeffs) <= {0}

    def constant_term(self) -> CycScalar:
        return self[0]

    def __repr__(self):
        inner = ", ".join(f"X^{m}: {self.coeffs[m].to_string()}" for m in self.support())
        return f"ZetaSeries({{{inner}}})"
