"""Cosets gK as Z_p-lattices.

For g in GSp(4, F) the coset g GSp(4, O) is determined by the lattice g O^4,
because GL(4, O) meets GSp(4, F) exactly in GSp(4, O) with unit similitude.
(For GL(2) the same holds with GL(2, O).)  An upper-triangular basis of the
lattice is an Iwasawa factor n t up to right multiplication by the integral
Borel, which is all a spherical Whittaker function can see.

Two implementations of the Hermite form are provided: an exact one on
Python integers and a batched numpy one working modulo p^P.  The batched one
is exact whenever the lattice contains p^P times the lattice spanned by its
shortest vector, which is checked per element; failures fall back to the
exact routine.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from .padic import vp, vp_int

KEY_SCALE = 64  # keys store entries multiplied by p^KEY_SCALE


def max_precision(p: int) -> int:
    """Largest P with p^P < 2^50, keeping float-assisted mulmod exact."""
    P = 1
    while p ** (P + 1) < 2 ** 50:
        P += 1
    return P


# ---------------------------------------------------------------------------
# exact path

def scaled_integer_matrix(rows, p: int) -> tuple[list[list[int]], int]:
    """Return (M, s) with M integral and M = p^s u g for a p-adic unit u."""
    den = 1
    for r in rows:
        for x in r:
            d = int(x.denominator)
            den = den * d // _gcd(den, d)
    s = vp_int(den, p) if den > 1 else 0
    # multiplying by den = p^s * unit_den changes the lattice by a unit only
    M = [[int(x * den) for x in r] for r in rows]
    return M, s


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _val(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


def hermite_exact(M: list[list[int]], p: int, mod_exp: int):
    """Upper-triangular Hermite form of the Z_p-span of the columns of M modulo p^mod_exp.

    mod_exp must exceed the largest elementary divisor exponent of M.
    Returns (f, B) with B[i][i] = p^f[i] and B[i][j] reduced mod p^f[i].
    """
    n = len(M)
    mod = p ** mod_exp
    B = [[x % mod for x in r] for r in M]
    for r in range(n - 1, -1, -1):
        vals = [_val(B[r][j], p, mod_exp) for j in range(r + 1)]
        j = min(range(r + 1), key=lambda c: vals[c])
        f = vals[j]
        if f >= mod_exp:
            raise ArithmeticError("precision too low for Hermite form")
        if j != r:
            for i in range(n):
                B[i][j], B[i][r] = B[i][r], B[i][j]
        pf = p ** f
        w = B[r][r] // pf
        for c in range(r):
            q = B[r][c] // pf
            if q:
                for i in range(n):
                    B[i][c] = (w * B[i][c] - q * B[i][r]) % mod
            elif w != 1:
                for i in range(n):
                    B[i][c] = (w * B[i][c]) % mod
    f = []
    for i in range(n):
        fi = _val(B[i][i], p, mod_exp)
        u = B[i][i] // p ** fi
        inv = pow(u, -1, mod)
        for k in range(n):
            B[k][i] = B[k][i] * inv % mod
        f.append(fi)
    for i in range(n - 2, -1, -1):
        pf = p ** f[i]
        for j in range(i + 1, n):
            q = B[i][j] // pf
            if q:
                for k in range(n):
                    B[k][j] = (B[k][j] - q * B[k][i]) % mod
    return f, B


@dataclass(frozen=True)
class LatticeForm:
    """Canonical data of the coset gK."""
    exponents: tuple  # torus exponents e_i
    key: tuple        # hashable canonical form
    p: int

    def basis(self) -> list[list[mpq]]:
        """Rational upper-triangular basis of the lattice."""
        n = len(self.exponents)
        scale = mpq(self.p) ** KEY_SCALE
        out = [[mpq(0)] * n for _ in range(n)]
        it = iter(self.key[n:])
        for i in range(n):
            out[i][i] = mpq(self.p) ** self.exponents[i]
            for j in range(i + 1, n):
                out[i][j] = next(it) / scale
        return out

    def psi_argument(self, c1=1, c2=1) -> mpq:
        """c1 n12 + c2 n23 for the unipotent part (well defined mod O on the dominant cone)."""
        b = self.basis()
        if len(b) == 2:
            return b[0][1] / b[1][1]
        return c1 * b[0][1] / b[1][1] + c2 * b[1][2] / b[2][2]

    def is_dominant(self) -> bool:
        e = self.exponents
        if len(e) == 2:
            return e[0] >= e[1]
        return e[0] >= e[1] >= e[2]

    @property
    def similitude_valuation(self) -> int:
        e = self.exponents
        return e[0] + e[-1]


def lattice_form_exact(g) -> LatticeForm:
    p = g.p
    n = g.size
    M, s = scaled_integer_matrix(g.rows, p)
    if n == 4:
        vlam = vp(g.similitude(), p) + 2 * s
    else:
        vlam = vp(g.det(), p) + 2 * s
    d1 = min(vp_int(x, p) for r in M for x in r if x)
    # largest elementary divisor: n = 4 uses d1 + d4 = v(lambda); n = 2 uses d1 + d2 = v(det)
    d_top = vlam - d1
    f, B = hermite_exact(M, p, d_top + 1)
    return _form_from_hermite(f, B, s, p)


def _form_from_hermite(f, B, s, p) -> LatticeForm:
    n = len(f)
    exps = tuple(fi - s for fi in f)
    shift = KEY_SCALE - s
    if shift < 0:
        raise ArithmeticError("key scale exceeded")
    entries = tuple(B[i][j] * p ** shift for i in range(n) for j in range(i + 1, n))
    return LatticeForm(exps, exps + entries, p)


# ---------------------------------------------------------------------------
# batched path

def small_precision(p: int) -> int:
    """Largest P with p^2P < 2^61, so fused products stay inside int64."""
    P = 1
    while p ** (2 * P + 2) < 2 ** 61:
        P += 1
    return P


def mulmod(a, b, m: int):
    """(a*b) mod m for int64 arrays with entries in [0, m), m < 2^50."""
    if m * m < 2 ** 63:
        return (a * b) % m
    q = np.floor(a.astype(np.float64) * b.astype(np.float64) / m).astype(np.int64)
    r = a * b - q * m  # wraps modulo 2^64, the true difference is small
    return r % m


class BatchKernel:
    """Vectorized Hermite forms modulo p^P."""

    def __init__(self, p: int, P: int | None = None):
        self.p = p
        self.P = P or max_precision(p)
        self.mod = p ** self.P
        self.pows = np.array([p ** k for k in range(self.P + 1)], dtype=np.int64)

    def valuations(self, x):
        g = np.gcd(x, self.mod)
        return np.searchsorted(self.pows, g)

    def matmul(self, A, B):
        """Batched (K,n,n) @ (K,n,n) modulo p^P (broadcasting allowed)."""
        mod = self.mod
        n = A.shape[-1]
        A, B = np.broadcast_arrays(A, B)
        out = np.zeros(A.shape, dtype=np.int64)
        for k in range(n):
            out = (out + mulmod(A[..., :, k:k + 1], B[..., k:k + 1, :], mod)) % mod
        return out

    def hermite(self, M):
        """Return (f, B, ok) for a (K, n, n) batch of residues."""
        mod, P = self.mod, self.P
        B = M.copy() % mod
        K, n, _ = B.shape
        idx = np.arange(K)
        ok = np.ones(K, dtype=bool)
        for r in range(n - 1, -1, -1):
            vals = self.valuations(B[:, r, :r + 1])
            j = np.argmin(vals, axis=1)
            f = vals[idx, j]
            ok &= f < P
            swap = j != r
            if swap.any():
                sel = idx[swap]
                cj = B[sel, :, j[swap]].copy()
                B[sel, :, j[swap]] = B[sel, :, r]
                B[sel, :, r] = cj
            pf = self.pows[np.minimum(f, P)]
            w = B[:, r, r] // pf
            # rows below r vanish in columns <= r already
            for c in range(r):
                q = B[:, r, c] // pf
                B[:, :r + 1, c] = self._lincomb(w[:, None], B[:, :r + 1, c],
                                                q[:, None], B[:, :r + 1, r])
        diag = B[:, np.arange(n), np.arange(n)]
        f = self.valuations(diag)
        ok &= (f < P).all(axis=1)
        units = diag // self.pows[np.minimum(f, P)]
        units = np.where(ok[:, None], units, 1)
        inv = self.unit_inverse(units)
        for i in range(n):
            B[:, :, i] = mulmod(B[:, :, i], inv[:, i:i + 1], mod)
        for i in range(n - 2, -1, -1):
            pf = self.pows[np.minimum(f[:, i], P)]
            for j in range(i + 1, n):
                q = B[:, i, j] // pf
                B[:, :i + 1, j] = self._lincomb(1, B[:, :i + 1, j], q[:, None], B[:, :i + 1, i])
        return f, B, ok

    def _lincomb(self, w, X, q, Y):
        """(w X - q Y) mod p^P."""
        mod = self.mod
        if mod * mod < 2 ** 61:
            return (w * X - q * Y) % mod
        return (mulmod(w if np.ndim(w) else np.full_like(X, w), X, mod) - mulmod(q, Y, mod)) % mod

    def unit_inverse(self, u):
        """Inverse of units modulo p^P: table lookup mod p, then Newton steps."""
        p, mod = self.p, self.mod
        table = np.array([pow(r, -1, p) if r else 0 for r in range(p)], dtype=np.int64)
        x = table[u % p]
        prec = 1
        while prec < self.P:
            # x <- x (2 - u x) doubles the p-adic precision
            ux = mulmod(u % mod, x, mod)
            x = mulmod(x, (2 - ux) % mod, mod)
            prec *= 2
        return x

    def exactness(self, M, vlam):
        """Per-element check that arithmetic mod p^P determines the lattice.

        vlam is v(lambda(M)) (GSp(4)) or v(det M) (GL(2)) for the scaled integer
        matrices; the top elementary divisor is vlam - d1 with d1 the smallest
        entry valuation.
        """
        vals = self.valuations(M.reshape(M.shape[0], -1))
        d1 = vals.min(axis=1)
        return (d1 < self.P) & (vlam - d1 < self.P)

    def to_residues(self, rows_list, n: int):
        """Exact rational matrices -> (residues mod p^P scaled by p^s, s) per element."""
        p, mod = self.p, self.mod
        K = len(rows_list)
        out = np.zeros((K, n, n), dtype=np.int64)
        s_arr = np.zeros(K, dtype=np.int64)
        for t, rows in enumerate(rows_list):
            M, s = scaled_integer_matrix(rows, p)
            s_arr[t] = s
            for i in range(n):
                for j in range(n):
                    out[t, i, j] = M[i][j] % mod
        return out, s_arr


class AdaptiveKernel:
    """A cheap low-precision kernel with a full-precision retry for failures."""

    def __init__(self, p: int):
        self.p = p
        self.big = BatchKernel(p)
        self.small = BatchKernel(p, min(small_precision(p), self.big.P))
        self.mod = self.big.mod
        self.P = self.big.P
        self.pows = self.big.pows

    def matmul(self, A, B):
        return self.big.matmul(A, B)

    def forms(self, res, vlam_scaled):
        """(f, B, ok) for residues mod p^P(big)."""
        sm = self.small
        low = res % sm.mod
        ok = sm.exactness(low, vlam_scaled)
        f, B, ok2 = sm.hermite(low)
        ok &= ok2
        redo = np.nonzero(~ok)[0]
        if len(redo):
            sub = res[redo]
            ok_b = self.big.exactness(sub, vlam_scaled[redo])
            fb, Bb, okb2 = self.big.hermite(sub)
            f[redo] = fb
            B[redo] = Bb
            ok[redo] = ok_b & okb2
        return f, B, ok

    def to_residues(self, rows_list, n: int):
        return self.big.to_residues(rows_list, n)

    def product_forms(self, A, B, vlam_scaled):
        """(f, B, ok) for the broadcast products A @ B of full-precision residues.

        The product is formed at low precision; only elements failing the
        exactness test are multiplied again at full precision.
        """
        sm = self.small
        n = A.shape[-1]
        shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2])
        low = sm.matmul(A % sm.mod, B % sm.mod).reshape(-1, n, n)
        ok = sm.exactness(low, vlam_scaled)
        f, H, ok2 = sm.hermite(low)
        ok &= ok2
        redo = np.nonzero(~ok)[0]
        if len(redo):
            multi = np.unravel_index(redo, shape)
            ia = tuple(m if s != 1 else np.zeros_like(m)
                       for m, s in zip(multi, A.shape[:-2]))
            ib = tuple(m if s != 1 else np.zeros_like(m)
                       for m, s in zip(multi, B.shape[:-2]))
            sub = self.big.matmul(A[ia], B[ib])
            ok_b = self.big.exactness(sub, vlam_scaled[redo])
            fb, Hb, okb2 = self.big.hermite(sub)
            f[redo] = fb
            H[redo] = Hb
            ok[redo] = ok_b & okb2
        return f, H, ok
