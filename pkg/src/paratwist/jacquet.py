"""Independent evaluation of spherical Whittaker values by Jacquet integrals.

W(t) = int_N f0(w n t) conj(psi(n)) dn for the normalized spherical section
f0 of the unramified principal series, divided by the same integral at t = 1.

Substituting n = t n' t^-1 moves t out of the section and into the character.
The section at w n depends only on the norms of the last row and of the
wedge of the last two rows of w n, which are:

    GL(2):   A = max(1, |x|)
    GSp(4):  A = max(1, |x|, |xy+u|, |xu+v|)
             B = max(1, |y|, |u|, |v|, |yv-u^2|)

for n = n(x, y, u, v).  The integrand is right N(O)-invariant, and the torus
acts on the coordinates by units.  So the x and y integrals reduce to a few
valuation shells, where the additive character integrates to an elementary
constant.  Shells far out are killed exactly by the character.

The remaining (u, v) integral is truncated to {A <= q^T, B <= q^2T}.  Volumes
of the sublevel sets are computed exactly: for fixed u the v-slice is an
intersection of ultrametric balls, and the admissible u depend only on |u|
and |u + xy|.  The truncated integrals form a sequence in T that satisfies a
linear recurrence (sums over dilated polyhedra of exponentials).  Its constant
component is the value of the integral, or of its analytic continuation.  The
recurrence is found by Berlekamp-Massey over Q and confirmed on additional
truncation levels before its constant component is read off.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from .cyclotomic import CycScalar
from .whittaker import SatakeParams


class StabilizationError(RuntimeError):
    pass


@dataclass
class OracleReport:
    exponents: tuple
    value: CycScalar
    truncation: int
    stable: bool
    recurrence_order: int


def _qpow(q: int, k: int) -> mpq:
    return mpq(q) ** k


def _ball_char_integral(q: int, k: int, d: int) -> mpq:
    """int over p^k of psi(w^d x) dx."""
    return _qpow(q, -k) if k + d >= 0 else mpq(0)


def _shell_weights(q: int, d: int, reach: int | None = None):
    """[(rep valuation or None for O, weight)] for the x-integral against psi(w^d x).

    Shells out to valuation -reach are visited; those beyond -(d+1) carry weight 0.
    """
    reach = d + 1 if reach is None else reach
    out = [(None, _ball_char_integral(q, 0, d))]
    for i in range(-reach, 0):
        w = _ball_char_integral(q, i, d) - _ball_char_integral(q, i + 1, d)
        if w:
            out.append((i, w))
    return out


# ---------------------------------------------------------------------------
# GL(2)

def jacquet_gl2(params: SatakeParams, m: int, q: int, truncation: int) -> mpq:
    """Jacquet integral at diag(w^m, 1) over |x| <= q^truncation, up to q^(m/2)."""
    a1, a2 = params.values
    # f0(w n(x)) = a1^alpha a2^-alpha q^-alpha with |x| = q^alpha, alpha >= 0
    def phi(alpha):
        return a1 ** alpha * a2 ** (-alpha) * _qpow(q, -alpha)

    inner = mpq(0)
    for rep, w in _shell_weights(q, m, truncation):
        inner += w * phi(0 if rep is None else -rep)
    # delta_B(t) times (chi delta^1/2)(w t w^-1) with w t w^-1 = diag(1, w^m)
    return _qpow(q, -m) * a2 ** m * inner  # the q^(m/2) is applied by the caller


def jacquet_oracle_gl2(params: SatakeParams, m: int, q: int, M: int = 1,
                       truncation: int = 8) -> OracleReport:
    vals = []
    for T in (truncation, 2 * truncation):
        base = jacquet_gl2(params, 0, q, T)
        vals.append(jacquet_gl2(params, m, q, T) / base)
    # the remaining half-power q^(m/2) of the section
    out = CycScalar.sqrt_p_power(m, q, M) * vals[1]
    return OracleReport((m, 0), out, truncation, vals[0] == vals[1], 0)


# ---------------------------------------------------------------------------
# GSp(4): sublevel volumes

def _le(a, b):
    """a <= b for log-norms where None means -infinity."""
    if a is None:
        return True
    if b is None:
        return False
    return a <= b


def _add(a, b):
    return None if a is None or b is None else a + b


@lru_cache(maxsize=None)
def sublevel_volume(q: int, nx, ny, alpha: int, beta: int) -> mpq:
    """vol{(u, v) : A <= q^alpha, B <= q^beta} for |x| = q^nx, |y| = q^ny (None: zero)."""
    if alpha < 0 or beta < 0 or not _le(nx, alpha) or not _le(ny, beta):
        return mpq(0)

    def h(lu, lw):
        # v-slice volume for |u| = q^lu, |u + xy| = q^lw
        if not _le(lu, beta) or not _le(lw, alpha):
            return mpq(0)
        if not _le(_add(nx, lu), max(alpha, beta)):
            return mpq(0)
        if ny is None:
            if not _le(_add(lu, lu), beta):
                return mpq(0)
            return _qpow(q, min(alpha, beta))
        if not _le(None if lu is None else 2 * lu - ny, beta + max(0, -ny)):
            return mpq(0)
        if not _le(None if lu is None or lw is None else lu + lw - ny, max(alpha, beta - ny)):
            return mpq(0)
        return _qpow(q, min(alpha, beta, beta - ny))

    span = abs(alpha) + abs(beta) + 2 * abs(nx or 0) + 2 * abs(ny or 0) + 4
    kmin = -span
    total = mpq(0)
    shell = mpq(q - 1, q)
    d = _add(nx, ny)
    top = beta
    if d is None:
        for k in range(kmin, top + 1):
            total += _qpow(q, k) * shell * h(k, k)
        total += _qpow(q, kmin - 1) * h(None, None)
        return total
    for k in range(max(d + 1, kmin), top + 1):
        total += _qpow(q, k) * shell * h(k, k)
    for k in range(kmin, min(d, top + 1)):
        total += _qpow(q, k) * shell * h(k, d)
    total += _qpow(q, kmin - 1) * h(None, d)
    if d <= top:
        total += _qpow(q, d) * mpq(q - 2, q) * h(d, d)
        for k in range(kmin, d):
            total += _qpow(q, k) * shell * h(d, k)
        total += _qpow(q, kmin - 1) * h(d, None)
    return total


def _truncated_inner(params: SatakeParams, q: int, nx, ny, T: int) -> list[mpq]:
    """[J_0, ..., J_T]: u, v integrals of f0(w n) over {A <= q^t, B <= q^2t}."""
    x1, x2, _ = params.values
    r_alpha = x1 / x2 / q
    r_beta = x2 / q
    out = []
    cum = mpq(0)
    # the truncation region grows by alpha = t and beta in (2t-2, 2t]
    F = lambda a, b: sublevel_volume(q, nx, ny, a, b)

    def cell(a, b):
        return F(a, b) - F(a - 1, b) - F(a, b - 1) + F(a - 1, b - 1)

    def phi(a, b):
        return r_alpha ** a * r_beta ** b

    done_a, done_b = -1, -1
    for t in range(T + 1):
        na, nb = t, 2 * t
        for a in range(0, na + 1):
            for b in range(0, nb + 1):
                if a <= done_a and b <= done_b:
                    continue
                c = cell(a, b)
                if c:
                    cum += phi(a, b) * c
        done_a, done_b = na, nb
        out.append(cum)
    return out


def berlekamp_massey(seq: list) -> list:
    """Minimal connection polynomial [1, c1, ..., cL] over Q."""
    C, B = [mpq(1)], [mpq(1)]
    L, m, b = 0, 1, mpq(1)
    for n in range(len(seq)):
        d = seq[n]
        for i in range(1, L + 1):
            d += C[i] * seq[n - i]
        if not d:
            m += 1
            continue
        coef = d / b
        T = list(C)
        C = C + [mpq(0)] * max(0, len(B) + m - len(C))
        for i, bi in enumerate(B):
            C[i + m] -= coef * bi
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1
    return C[:L + 1] + [mpq(0)] * max(0, L + 1 - len(C))


def constant_component(seq: list, check: int = 6):
    """Constant part of a sequence satisfying a linear recurrence.

    Returns (value, order, confirmed).  ``confirmed`` is true when the
    recurrence found on the leading terms predicts the last ``check`` terms and
    1 is at most a simple characteristic root.
    """
    head = seq[:-check] if check else seq
    C = berlekamp_massey(head)
    L = len(C) - 1
    confirmed = 2 * L + 2 <= len(head)
    for n in range(max(L, len(head)), len(seq)):
        pred = -sum((C[i] * seq[n - i] for i in range(1, L + 1)), mpq(0))
        if pred != seq[n]:
            confirmed = False
    # characteristic polynomial P(z) = sum_i C[i] z^(L-i), highest degree first
    P = list(C)
    if sum(P, mpq(0)) != 0:
        return mpq(0), L, confirmed
    # divide by (z - 1): synthetic division, highest degree first
    Qc = []
    acc = mpq(0)
    for c in P[:-1]:
        acc = acc + c
        Qc.append(acc)
    Q1 = sum(Qc, mpq(0))
    if not Q1:
        return mpq(0), L, False  # repeated root at 1: divergent truncations
    # Q(E) s_n = Q(1) * S, Q(z) = sum_j Qc[j] z^(L-1-j)
    n0 = len(seq) - L
    val = sum((Qc[j] * seq[n0 + (L - 1 - j)] for j in range(L)), mpq(0)) / Q1
    return val, L, confirmed


@lru_cache(maxsize=None)
def _inner_limit(params: SatakeParams, q: int, nx, ny, T: int, extra: int = 8):
    """Constant component read off at truncation T and again at T + extra."""
    seq = _truncated_inner(params, q, nx, ny, T + extra)
    v1, L1, ok1 = constant_component(seq[:T + 1])
    v2, L2, ok2 = constant_component(seq)
    return v2, max(L1, L2), ok1 and ok2 and v1 == v2 and L1 == L2


def _gsp4_integral(params: SatakeParams, e: tuple, q: int, T: int):
    """Unnormalized rational part of the Jacquet integral at t = diag(w^e)."""
    d1, d2 = e[0] - e[1], e[1] - e[2]
    total = mpq(0)
    stable, order = True, 0
    for rx, wx in _shell_weights(q, d1):
        for ry, wy in _shell_weights(q, d2):
            nx = None if rx is None else -rx
            ny = None if ry is None else -ry
            val, L, ok = _inner_limit(params, q, nx, ny, T)
            stable &= ok
            order = max(order, L)
            total += wx * wy * val
    x1, x2, s = params.values
    e1, e2, e3, e4 = e
    m = e1 + e4
    # delta_B(t) * (chi delta^1/2)(w t w^-1) with w t w^-1 = diag(w^e4, w^e3, w^e2, w^e1);
    # the q-powers are returned separately as a half-integer exponent of q
    char = x1 ** e4 * x2 ** e3 * s ** m
    half_q = 2 * (-4 * e1 - 2 * e2 + 3 * m) + (-4 * e4 - 2 * e3 + 3 * m)
    return total * char, half_q, stable, order


def jacquet_oracle_gsp4(params: SatakeParams, e: tuple, q: int, M: int = 1,
                        truncation: int = 40) -> OracleReport:
    """Normalized Jacquet value at diag(w^e); stability is rechecked at a larger truncation."""
    e = tuple(int(x) for x in e)
    if e[0] + e[3] != e[1] + e[2]:
        raise ValueError("not a GSp(4) torus element")
    base, hb, ok0, _ = _gsp4_integral(params, (0, 0, 0, 0), q, truncation)
    if not base:
        raise StabilizationError("Jacquet integral vanishes at the identity")
    num, hn, ok1, order = _gsp4_integral(params, e, q, truncation)
    value = CycScalar.sqrt_p_power(hn - hb, q, M) * (num / base)
    return OracleReport(e, value, truncation, ok0 and ok1, order)


def jacquet_oracle(datum, exponents, truncation: int = 40) -> OracleReport:
    """Dispatch on the group size of a WhittakerDatum."""
    if datum.size == 2:
        m = exponents[0] - exponents[1]
        rep = jacquet_oracle_gl2(datum.satake, m, datum.p, datum.depth)
    else:
        rep = jacquet_oracle_gsp4(datum.satake, tuple(exponents), datum.p, datum.depth, truncation)
    if not rep.stable:
        raise StabilizationError(f"truncated Jacquet integral did not stabilize at {exponents}")
    return rep
