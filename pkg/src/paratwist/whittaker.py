"""Spherical Whittaker functions and lazy combinations of their translates.

Convention: (pi(h) W)(x) = W(x h), so pi(h) pi(g) = pi(h g) and a vector
sum_i c_i pi(g_i) W0 evaluates at x to sum_i c_i W0(x g_i).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from .cyclotomic import CycScalar, PrecisionError, psi
from .groups import GroupElement
from .lattice import (AdaptiveKernel, BatchKernel, LatticeForm, _form_from_hermite, hermite_exact,
                      lattice_form_exact, scaled_integer_matrix)
from .padic import to_q, vp, vp_int


class RegularityError(ValueError):
    pass


@dataclass(frozen=True)
class SatakeParams:
    """Unramified data: (alpha1, alpha2) for GL(2), (chi1, chi2, sigma) at p for GSp(4)."""
    values: tuple

    def __post_init__(self):
        vals = tuple(to_q(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(not v for v in vals):
            raise ValueError("Satake values must be nonzero")
        if len(vals) == 2:
            if vals[0] * vals[1] != 1:
                raise ValueError("GL(2) parameters must satisfy alpha1 alpha2 = 1")
        elif len(vals) == 3:
            x1, x2, s = vals
            if x1 * x2 * s * s != 1:
                raise ValueError("GSp(4) parameters must satisfy chi1 chi2 sigma^2 = 1")
        else:
            raise ValueError("expected 2 or 3 Satake values")

    @property
    def size(self) -> int:
        return 2 if len(self.values) == 2 else 4

    def is_regular(self) -> bool:
        return weyl_denominator(self) != 0


def _monomial(params: SatakeParams, nu) -> mpq:
    if params.size == 2:
        a1, a2 = params.values
        return a1 ** nu[0] * a2 ** nu[1]
    x1, x2, s = params.values
    return x1 ** nu[0] * x2 ** nu[1] * s ** (nu[0] + nu[3])


def _weyl_group4():
    def s1(v):
        return (v[1], v[0], v[3], v[2])

    def s2(v):
        return (v[0], v[2], v[1], v[3])

    elems = {(0, 1, 2, 3): 1}
    frontier = [((0, 1, 2, 3), 1)]
    while frontier:
        nxt = []
        for perm, sgn in frontier:
            for s in (s1, s2):
                q = s(perm)
                if q not in elems:
                    elems[q] = -sgn
                    nxt.append((q, -sgn))
        frontier = nxt
    return [(perm, sgn) for perm, sgn in elems.items()]


WEYL4 = _weyl_group4()
RHO4 = (2, 1, 0, -1)
RHO2 = (1, 0)


def _act(perm, v):
    return tuple(v[i] for i in perm)


def _alternant(params: SatakeParams, nu) -> mpq:
    if params.size == 2:
        return _monomial(params, nu) - _monomial(params, (nu[1], nu[0]))
    return sum((sgn * _monomial(params, _act(perm, nu)) for perm, sgn in WEYL4), mpq(0))


def weyl_denominator(params: SatakeParams) -> mpq:
    return _alternant(params, RHO2 if params.size == 2 else RHO4)


def weyl_character(params: SatakeParams, e) -> mpq:
    """Character of the dual-group representation with highest weight e at the Satake element."""
    den = weyl_denominator(params)
    if not den:
        raise RegularityError("Satake parameters are not regular")
    rho = RHO2 if params.size == 2 else RHO4
    return _alternant(params, tuple(a + b for a, b in zip(e, rho))) / den


@dataclass(frozen=True)
class WhittakerDatum:
    p: int
    satake: SatakeParams
    c1: int = 1
    c2: int = 1
    depth: int = 8  # cyclotomic depth M

    def __post_init__(self):
        if self.size == 4:
            for c in (self.c1, self.c2):
                if c % self.p == 0:
                    raise ValueError("psi constants must be units")
        if not self.satake.is_regular():
            raise RegularityError("Satake parameters are not regular")

    @property
    def size(self) -> int:
        return self.satake.size

    def torus_value(self, e) -> CycScalar:
        return _torus_value(self, tuple(int(x) for x in e))

    def psi(self, x) -> CycScalar:
        return psi(x, self.p, self.depth)


@lru_cache(maxsize=None)
def _torus_value(d: WhittakerDatum, e: tuple) -> CycScalar:
    p, M = d.p, d.depth
    if d.size == 2:
        m = e[0] - e[1]
        if m < 0:
            return CycScalar.zero(p, M)
        # delta^(1/2) = q^(-m/2)
        return CycScalar.sqrt_p_power(-m, p, M) * weyl_character(d.satake, (m, 0))
    if not (e[0] >= e[1] >= e[2]):
        return CycScalar.zero(p, M)
    m = e[0] + e[3]
    # delta^(1/2) = |a|^2 |b| |c|^(-3/2) = q^(-2 e1 - e2 + 3m/2)
    half = -4 * e[0] - 2 * e[1] + 3 * m
    return CycScalar.sqrt_p_power(half, p, M) * weyl_character(d.satake, e)


def spherical_eval(d: WhittakerDatum, g: GroupElement) -> CycScalar:
    """W0(g) via the lattice form of gK."""
    form = lattice_form_exact(g)
    return _value_from_form(d, form)


def _value_from_form(d: WhittakerDatum, form: LatticeForm) -> CycScalar:
    if not form.is_dominant():
        return CycScalar.zero(d.p, d.depth)
    return d.psi(form.psi_argument(d.c1, d.c2)) * d.torus_value(form.exponents)


def spherical_eval_iwasawa(d: WhittakerDatum, g: GroupElement) -> CycScalar:
    """W0(g) via the certified Iwasawa decomposition (independent route)."""
    from .groups import iwasawa
    iw = iwasawa(g)
    e = iw.exponents
    dominant = e[0] >= e[1] if d.size == 2 else e[0] >= e[1] >= e[2]
    if not dominant:
        return CycScalar.zero(d.p, d.depth)
    n = iw.n
    if d.size == 2:
        arg = n[0, 1]
    else:
        arg = d.c1 * n[0, 1] + d.c2 * n[1, 2]
    return d.psi(arg) * d.torus_value(e)


# ---------------------------------------------------------------------------
# lazy vectors

def _common_denominator(coefs):
    den = 1
    for c in coefs:
        dc = int(c.denominator)
        den = den * dc // np.gcd(den, dc) if dc != 1 else den
    return int(den)


class SmoothVector:
    """sum_i c_i pi(g_i) W0 with distinct cosets g_i K and rational c_i.

    Terms sharing a coset are merged exactly (the key is the Hermite form of
    the lattice g O^n).
    """

    def __init__(self, datum: WhittakerDatum, terms=(), merge: bool = True):
        self.datum = datum
        self.merge = merge
        coefs, reps = [], []
        for c, g in terms:
            coefs.append(to_q(c))
            reps.append(g)
        self._coefs = coefs
        self._reps = reps
        self._cache = None
        if merge and reps:
            self._merge_exact()

    # -- basic structure
    @classmethod
    def spherical(cls, datum: WhittakerDatum) -> "SmoothVector":
        from .groups import identity
        return cls(datum, [(1, identity(datum.p, datum.size))])

    @classmethod
    def zero(cls, datum: WhittakerDatum) -> "SmoothVector":
        return cls(datum, [])

    @property
    def terms(self):
        return list(zip(self._coefs, self._reps))

    def __len__(self):
        return len(self._coefs)

    def is_formally_zero(self) -> bool:
        return not self._coefs

    def _merge_exact(self):
        seen: dict = {}
        coefs, reps = [], []
        for c, g in zip(self._coefs, self._reps):
            k = lattice_form_exact(g).key
            if k in seen:
                coefs[seen[k]] += c
            else:
                seen[k] = len(coefs)
                coefs.append(c)
                reps.append(g)
        keep = [i for i, c in enumerate(coefs) if c]
        self._coefs = [coefs[i] for i in keep]
        self._reps = [reps[i] for i in keep]

    def __add__(self, other: "SmoothVector") -> "SmoothVector":
        return SmoothVector(self.datum, self.terms + other.terms, merge=self.merge)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "SmoothVector":
        c = to_q(c)
        out = SmoothVector(self.datum, merge=self.merge)
        if c:
            out._coefs = [x * c for x in self._coefs]
            out._reps = list(self._reps)
        return out

    def translate(self, h: GroupElement) -> "SmoothVector":
        """pi(h) v."""
        return combine(self.datum, [(1, h)], self)

    def formal_key(self) -> dict:
        """Coset key -> coefficient; equal dicts imply equal functions."""
        return {lattice_form_exact(g).key: c for c, g in self.terms}

    # -- evaluation
    def __call__(self, g: GroupElement) -> CycScalar:
        return smooth_eval(self, g)

    def _batch(self):
        if self._cache is None:
            self._cache = _VectorBatch(self)
        return self._cache


class _VectorBatch:
    """Integer data for vectorized evaluation."""

    def __init__(self, v: SmoothVector):
        d = v.datum
        self.kernel = AdaptiveKernel(d.p)
        n = d.size
        forms = [lattice_form_exact(g) for g in v._reps] if len(v) < 64 else None
        if forms is None:
            forms = _forms_batch(self.kernel, v._reps, n)
        self.forms = forms
        K = len(forms)
        self.n = n
        p = d.p
        self.s = np.zeros(K, dtype=np.int64)
        self.basis = np.zeros((K, n, n), dtype=np.int64)
        self.vlam = np.zeros(K, dtype=np.int64)
        for t, f in enumerate(forms):
            rows = f.basis()
            M, s = scaled_integer_matrix(rows, p)
            self.s[t] = s
            for i in range(n):
                for j in range(n):
                    self.basis[t, i, j] = M[i][j] % self.kernel.mod
            # similitude (or determinant) valuation of the unscaled coset
            self.vlam[t] = (sum(f.exponents) // 2) if n == 4 else sum(f.exponents)
        self.den = _common_denominator(v._coefs) if v._coefs else 1
        nums = [int(c * self.den) for c in v._coefs]
        big = max((abs(x) for x in nums), default=0) * max(K, 1) >= 2 ** 62
        self.nums = np.array(nums, dtype=object if big else np.int64)
        self.rows = [f.basis() for f in forms]


def _forms_batch(kernel: AdaptiveKernel, reps, n: int) -> list[LatticeForm]:
    rows = [g.rows for g in reps]
    res, s = kernel.to_residues(rows, n)
    if n == 4:
        vl = np.array([vp(g.similitude(), kernel.p) for g in reps], dtype=np.int64)
    else:
        vl = np.array([vp(g.det(), kernel.p) for g in reps], dtype=np.int64)
    return forms_from_residues(kernel, res, s, vl + 2 * s, reps)


def forms_from_residues(kernel: AdaptiveKernel, res, s, vlam_scaled, fallback_elems=None,
                        fallback=None) -> list[LatticeForm]:
    """Lattice forms for a batch; elements failing the exactness test are redone exactly."""
    f, B, ok = kernel.forms(res, vlam_scaled)
    return _forms_from_data(kernel.p, f, B, ok, s, fallback_elems, fallback)


def _forms_from_data(p, f, B, ok, s, fallback_elems=None, fallback=None) -> list[LatticeForm]:
    out = []
    for t in range(len(ok)):
        if ok[t]:
            out.append(_form_from_hermite([int(x) for x in f[t]],
                                          [[int(x) for x in r] for r in B[t]], int(s[t]), p))
        elif fallback_elems is not None:
            out.append(lattice_form_exact(fallback_elems[t]))
        else:
            out.append(fallback(t))
    return out


def combine(datum: WhittakerDatum, quadrature, v: SmoothVector) -> SmoothVector:
    """sum_j w_j pi(h_j) v for a list of (weight, h_j) pairs."""
    out = SmoothVector(datum, merge=v.merge)
    if not len(v) or not quadrature:
        return out
    if not v.merge:
        out._coefs = [to_q(w) * c for w, _ in quadrature for c in v._coefs]
        out._reps = [h * g for _, h in quadrature for g in v._reps]
        return out
    kernel = AdaptiveKernel(datum.p)
    n = datum.size
    p = datum.p
    hs = [h for _, h in quadrature]
    ws = [to_q(w) for w, _ in quadrature]
    Hres, Hs = kernel.to_residues([h.rows for h in hs], n)
    Gres, Gs = kernel.to_residues([g.rows for g in v._reps], n)
    if n == 4:
        Hl = np.array([vp(h.similitude(), p) for h in hs], dtype=np.int64)
        Gl = np.array([vp(g.similitude(), p) for g in v._reps], dtype=np.int64)
    else:
        Hl = np.array([vp(h.det(), p) for h in hs], dtype=np.int64)
        Gl = np.array([vp(g.det(), p) for g in v._reps], dtype=np.int64)
    m = len(v)
    s = (Hs[:, None] + Gs[None, :]).reshape(-1)
    vl = (Hl[:, None] + Gl[None, :]).reshape(-1)
    vl_scaled = vl + 2 * s

    def exact(t):
        j, i = divmod(t, m)
        return lattice_form_exact(hs[j] * v._reps[i])

    f, B, ok = kernel.product_forms(Hres[:, None], Gres[None, :], vl_scaled)
    forms = _forms_from_data(p, f, B, ok, s, fallback=exact)
    acc: dict = {}
    first: dict = {}
    for t, form in enumerate(forms):
        j, i = divmod(t, m)
        c = ws[j] * v._coefs[i]
        k = form.key
        if k in acc:
            acc[k] += c
        else:
            acc[k] = c
            first[k] = (j, i, form)
    coefs, reps = [], []
    for k, c in acc.items():
        if c:
            j, i, _ = first[k]
            coefs.append(c)
            reps.append(hs[j] * v._reps[i])
    out._coefs = coefs
    out._reps = reps
    return out


def smooth_eval(v: SmoothVector, g: GroupElement) -> CycScalar:
    d = v.datum
    if not len(v):
        return CycScalar.zero(d.p, d.depth)
    if len(v) < 16:
        total = CycScalar.zero(d.p, d.depth)
        for c, h in v.terms:
            total = total + spherical_eval(d, g * h) * c
        return total
    return _batch_eval(v, g)


def _batch_eval(v: SmoothVector, g: GroupElement) -> CycScalar:
    return _batch_eval_many(v, [g])[0]


def evaluate_many(v: SmoothVector, points, chunk: int = 400_000) -> list[CycScalar]:
    """[v(g) for g in points], sharing one vectorized pass per chunk of products."""
    d = v.datum
    points = list(points)
    if not len(v):
        return [CycScalar.zero(d.p, d.depth) for _ in points]
    if len(v) < 16:
        return [smooth_eval(v, g) for g in points]
    per = max(1, chunk // len(v))
    out = []
    for i in range(0, len(points), per):
        out.extend(_batch_eval_many(v, points[i:i + per]))
    return out


def evaluate_across(vectors, points, chunk: int = 400_000) -> list[list[CycScalar]]:
    """[[w(g) for g in points] for w in vectors] for one formal combination read in several models.

    The vectors must share their translate list (see ``zeta.rebase``), so the
    lattice forms of the products are computed once for all of them.
    """
    vectors = list(vectors)
    points = list(points)
    v = vectors[0]
    if len(v) < 16 or any(w._reps is not v._reps and w._reps != v._reps for w in vectors[1:]):
        return [evaluate_many(w, points, chunk) for w in vectors]
    for w in vectors[1:]:
        if w._coefs != v._coefs:
            raise ValueError("evaluate_across needs one formal combination")
    data = [w.datum for w in vectors]
    per = max(1, chunk // len(v))
    out: list[list[CycScalar]] = [[] for _ in vectors]
    for i in range(0, len(points), per):
        for acc, vals in zip(out, _batch_eval_data(v, data, points[i:i + per])):
            acc.extend(vals)
    return out


def _batch_eval_many(v: SmoothVector, gs) -> list[CycScalar]:
    return _batch_eval_data(v, [v.datum], gs)[0]


def _batch_eval_data(v: SmoothVector, data, gs) -> list[list[CycScalar]]:
    """Values at gs of the combination v read in each Whittaker datum of ``data``."""
    d0 = v.datum
    b = v._batch()
    kernel = b.kernel
    p, n = d0.p, d0.size
    mod = kernel.mod
    G, K = len(gs), len(v)
    Ys = np.zeros((G, n, n), dtype=np.int64)
    sys_ = np.zeros(G, dtype=np.int64)
    vys = np.zeros(G, dtype=np.int64)
    for j, g in enumerate(gs):
        Yrows, sy = scaled_integer_matrix(g.rows, p)
        Ys[j] = [[x % mod for x in r] for r in Yrows]
        sys_[j] = sy
        vys[j] = vp(g.similitude(), p) if n == 4 else vp(g.det(), p)
    s = (b.s[None, :] + sys_[:, None]).reshape(-1)
    vl_scaled = (b.vlam[None, :] + vys[:, None]).reshape(-1) + 2 * s
    f, B, ok = kernel.product_forms(Ys[:, None], b.basis[None], vl_scaled)
    e = f - s[:, None]
    if n == 4:
        dom = (e[:, 0] >= e[:, 1]) & (e[:, 1] >= e[:, 2])
    else:
        dom = e[:, 0] >= e[:, 1]
    results = [[CycScalar.zero(p, d.depth) for _ in gs] for d in data]
    # exact fallback for elements outside the modular precision
    for t in np.nonzero(~ok)[0]:
        j, i = divmod(int(t), K)
        form = _form_exact_general(gs[j], b.rows[i], p, n)
        c = mpq(int(b.nums[i]), b.den)
        for totals, d in zip(results, data):
            totals[j] = totals[j] + _value_from_form(d, form) * c
    sel = np.nonzero(ok & dom)[0]
    if not len(sel):
        return results
    point = sel // K
    e, f, B = e[sel], f[sel], B[sel]
    nums = b.nums[sel % K]
    psi_parts: dict = {}
    for totals, d in zip(results, data):
        M = d.depth
        pM = p ** M
        if n == 4:
            if M not in psi_parts:
                psi_parts[M] = (_psi_index(kernel, B[:, 0, 1], f[:, 1], M),
                                _psi_index(kernel, B[:, 1, 2], f[:, 2], M))
            i12, i23 = psi_parts[M]
            idx = (i12 * (d.c1 % pM) + i23 * (d.c2 % pM)) % pM
        else:
            idx = _psi_index(kernel, B[:, 0, 1], f[:, 1], M)
        _accumulate(d, b, point, e, idx, nums, totals)
    return results


def _accumulate(d: WhittakerDatum, b, point, e, idx, nums, totals) -> None:
    """Add the grouped values of the selected products into ``totals``."""
    p, M = d.p, d.depth
    # group by (point, exponents, psi index)
    keys = np.concatenate([point[:, None], e, idx[:, None]], axis=1)
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    if nums.dtype == object:
        sums = [0] * len(uniq)
        for t, u in enumerate(inv):
            sums[u] += nums[t]
    else:
        sums = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(sums, inv, nums)
    by_pe: dict = {}
    for row, sm in zip(uniq, sums):
        sm = int(sm)
        if not sm:
            continue
        key = tuple(int(x) for x in row[:-1])
        poly = by_pe.setdefault(key, {})
        k = int(row[-1])
        poly[k] = poly.get(k, 0) + mpq(sm, b.den)
    for key, poly in by_pe.items():
        j, et = key[0], key[1:]
        totals[j] = totals[j] + CycScalar(p, M, poly) * d.torus_value(et)


def _psi_index(kernel: BatchKernel, num, fden, M: int):
    """Exponent k of zeta_{p^M}^k = psi(num / p^fden), with num, fden arrays."""
    p = kernel.p
    pM = p ** M
    shift = M - fden
    out = np.zeros(num.shape, dtype=np.int64)
    pos = shift >= 0
    if pos.any():
        sh = shift[pos]
        out[pos] = ((num[pos] % pM) * (kernel.pows[np.minimum(sh, kernel.P)] % pM)) % pM
    neg = ~pos
    if neg.any():
        div = kernel.pows[np.minimum(-shift[neg], kernel.P)]
        if (num[neg] % div).any():
            raise PrecisionError("additive character needs a deeper cyclotomic field")
        out[neg] = (num[neg] // div) % pM
    return out


def _form_exact_general(g: GroupElement, rows, p: int, n: int) -> LatticeForm:
    """Lattice form of g * (lattice with basis rows), exactly."""
    from .groups import _matmul
    prod = _matmul(g.rows, tuple(tuple(r) for r in rows))
    M, s = scaled_integer_matrix(prod, p)
    vals = [vp_int(x, p) for r in M for x in r if x]
    d1 = min(vals)
    # top elementary divisor is at most v(det) - (n-1) d1
    det_val = _det_val(M, p, n)
    top = det_val - (n - 1) * d1
    f, B = hermite_exact(M, p, top + 1)
    return _form_from_hermite(f, B, s, p)


def _det_val(M, p, n):
    from .groups import _det4
    if n == 2:
        d = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    else:
        d = _det4(M)
    return vp_int(d, p)
