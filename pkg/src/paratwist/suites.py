"""Named verification checks, grouped into suites.

Each check records what was expected and what was computed as exact data
(strings or integer-coefficient scalars), so a report never holds a float.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass

from gmpy2 import mpq

from . import groups as G
from .characters import QuadraticCharacter, gauss_sum, verify_change_lemma
from .config import RunConfig
from .cyclotomic import CycScalar
from .jacquet import jacquet_oracle
from .sampling import sample_points
from .twist import (TwistConfig, beta, beta_prime, eta_translate, psi_factor_check,
                    refinement_check, t_chi, t_chi_expanded, t_kl, twist_gl2,
                    v_chi, vanishing_criterion_check)
from .whittaker import SmoothVector, WhittakerDatum, evaluate_across, evaluate_many
from .zeta import (ZetaReport, default_window, rebase, verify_theorem_gsp4, zeta_gl2,
                   zeta_gsp4)


@dataclass
class Check:
    name: str
    passed: bool
    expected: object = "true"
    computed: object = None
    elapsed: float = 0.0
    detail: str = ""

    def __post_init__(self):
        if self.computed is None:
            self.computed = "true" if self.passed else "false"


def scalar_data(x: CycScalar):
    return x.to_json()


def _bool(b: bool) -> str:
    return "true" if b else "false"


class Context:
    """Per-run cache of the expensive twisted vectors; values never depend on call order."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._cache: dict = {}
        self.build_seconds: dict = {}
        self.zeta_constants: dict = {}

    def _get(self, key, build):
        if key not in self._cache:
            t0 = time.perf_counter()
            self._cache[key] = build()
            self.build_seconds[key] = time.perf_counter() - t0
        return self._cache[key]

    def chi(self, ramified: bool = True) -> QuadraticCharacter:
        cfg = self.cfg
        return QuadraticCharacter(cfg.p, cfg.conductor if ramified else 0, cfg.sign)

    def datum(self, size: int, c2: int = 1) -> WhittakerDatum:
        cfg = self.cfg
        params = cfg.gl2_params if size == 2 else cfg.gsp4_params
        return self._get(("datum", size, c2), lambda: WhittakerDatum(
            cfg.p, params, cfg.c1, c2, depth=cfg.cyclotomic_depth(size)))

    def twist_config(self, size: int, chi=None, n=None) -> TwistConfig:
        chi = chi or self.chi()
        return TwistConfig(chi, self.cfg.n if n is None else n, size,
                           levels=self.cfg.level_overrides())

    def gsp4_vectors(self, c2: int = 1) -> dict:
        """W0, v^chi, T^Kl, T_chi for the configured ramified character."""
        def build_base():
            d = self.datum(4, 1)
            cfg = self.twist_config(4)
            W0 = SmoothVector.spherical(d)
            vc = v_chi(W0, cfg)
            tk = t_kl(W0, cfg, vc)
            return {"W0": W0, "vchi": vc, "tkl": tk, "tchi": t_chi(W0, cfg, tk)}

        base = self._get(("gsp4", 1), build_base)
        if c2 == 1:
            return base
        d = self.datum(4, c2)
        return self._get(("gsp4", c2), lambda: {k: rebase(v, d) for k, v in base.items()})

    def eta_vectors(self) -> dict:
        def build():
            d = self.datum(4, 1)
            W0 = SmoothVector.spherical(d)
            ev = eta_translate(W0)
            return {"eta": ev, "tchi": t_chi(ev, self.twist_config(4))}
        return self._get(("eta",), build)


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        dt = time.perf_counter() - t0
        for c in out:
            c.elapsed = c.elapsed or dt / max(len(out), 1)
        return out
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _perturb(cfg: RunConfig, x):
    """Self-test mode doubles every expected constant."""
    return x * 2 if cfg.self_test else x


# ---------------------------------------------------------------------------
# gauss

@_timed
def suite_gauss(ctx: Context, rng: random.Random) -> list[Check]:
    cfg = ctx.cfg
    p = cfg.p
    q = mpq(p)
    out = []
    for sign in (1, -1):
        chi = QuadraticCharacter(p, 1, sign)
        tag = f"sign{sign:+d}"
        for k in range(-3, 4):
            g = gauss_sum(chi, k)
            if k == -1:
                out.append(Check(f"gauss.{tag}.k={k}.nonzero", bool(g), "nonzero",
                                 scalar_data(g)))
            else:
                out.append(Check(f"gauss.{tag}.k={k}.zero", not g, "0", scalar_data(g)))
        norm = gauss_sum(chi, -1).conjugate_abs_square()
        expected = CycScalar.rational(_perturb(cfg, 1 / q), p)
        out.append(Check(f"gauss.{tag}.abs_square", norm == expected,
                         scalar_data(expected), scalar_data(norm)))
    passed = 0
    total = 50
    for _ in range(total):
        n = rng.randint(1, 4)
        t = rng.randint(1, 4)
        b = rng.randrange(-100, 100)
        passed += verify_change_lemma(p, b, t, n, rng).passed
    out.append(Check("gauss.change_lemma", passed == total, f"{total}/{total}", f"{passed}/{total}"))
    return out


# ---------------------------------------------------------------------------
# cosets

@_timed
def suite_cosets(ctx: Context, rng: random.Random) -> list[Check]:
    cfg = ctx.cfg
    p = cfg.p
    c = max(cfg.conductor, 1)
    out = []
    reps = G.sl2_coset_representatives(c, p)
    expected_count = p ** (2 * c) + p ** (2 * c - 1)
    out.append(Check("cosets.sl2.count", len(reps) == expected_count, str(expected_count), str(len(reps))))
    gamma = G.gamma0(2 * c)
    disjoint = all(not G.is_member(reps[i].inverse() * reps[j], gamma)
                   for i in range(len(reps)) for j in range(len(reps)) if i != j)
    out.append(Check("cosets.sl2.disjoint", disjoint))
    m = 2 * c + 1
    bad = 0
    seen = 0
    for g in G.enumerate_sl2_mod(p, m):
        seen += 1
        if len(G.sl2_coset_index(g, c, p, reps)) != 1:
            bad += 1
    out.append(Check("cosets.sl2.partition", bad == 0 and seen > 0, f"{seen} elements in exactly one coset",
                     f"{seen - bad} of {seen}"))

    N = cfg.N_gsp4 if cfg.N_gsp4 >= 1 else 1
    preps = G.paramodular_coset_representatives(N, p)
    expected_count = p ** N + p ** (N - 1)
    out.append(Check("cosets.paramodular.count", len(preps) == expected_count, str(expected_count), str(len(preps))))
    kl = G.klingen(N)
    inv = [r.inverse() for r in preps]
    disjoint = all(not G.is_member(inv[i] * preps[j], kl)
                   for i in range(len(preps)) for j in range(len(preps)) if i != j)
    out.append(Check("cosets.paramodular.disjoint", disjoint))
    sampler = G.generators(G.paramodular(N), p, seed=rng.randrange(2 ** 31))
    total = cfg.coset_samples
    good = 0
    members = 0
    for _ in range(total):
        g = sampler.word(rng.randint(1, 4))
        members += G.is_member(g, G.paramodular(N))
        good += len(G.coset_memberships(g, preps, kl, inv)) == 1
    out.append(Check("cosets.paramodular.samples_in_group", members == total, f"{total}/{total}", f"{members}/{total}"))
    out.append(Check("cosets.paramodular.complete", good == total, f"{total}/{total}", f"{good}/{total}"))
    return out


# ---------------------------------------------------------------------------
# identities and invariance groups

def _random_unit(rng, p, depth=3):
    return rng.choice([u for u in range(1, p ** depth) if u % p])


def group_action_check(v: SmoothVector, sampler, count: int, points, chi=None) -> tuple[int, int]:
    """Count samples k with v(y k) = chi(lambda(k)) v(y) at every point (chi None: invariance)."""
    base = evaluate_many(v, points)
    good = 0
    for _ in range(count):
        k = sampler.word()
        lam = k.similitude() if k.size == 4 else k.det()
        sign = 1 if chi is None else chi(lam)
        vals = evaluate_many(v, [y * k for y in points])
        good += all(a == b * sign for a, b in zip(vals, base))
    return good, count


def check_identities(ctx: Context, rng: random.Random, tuples: int) -> Check:
    p = ctx.cfg.p
    c = max(ctx.cfg.conductor, 1)
    good = 0
    for _ in range(tuples):
        a, b = _random_unit(rng, p), _random_unit(rng, p)
        cc = rng.randrange(p ** 3)
        y = rng.randrange(-50, 50)
        L = rng.randint(0, 6)
        n = rng.randint(0, 3)
        good += G.verify_conjugation_identities(a, b, cc, y, L, c, n, p).passed
    return Check("identities.conjugation", good == tuples, f"{tuples}/{tuples}", f"{good}/{tuples}")


def check_expanded(ctx: Context, rng: random.Random, points: int) -> list[Check]:
    vec = ctx.gsp4_vectors()
    T = vec["tchi"]
    E = t_chi_expanded(vec["W0"], ctx.twist_config(4))
    pts = sample_points(T, points, rng)
    a, b = evaluate_many(T, pts), evaluate_many(E, pts)
    agree = sum(x == y for x, y in zip(a, b))
    nonzero = sum(bool(x) for x in a)
    return [
        Check("identities.expanded.values", agree == points, f"{points}/{points}", f"{agree}/{points}",
              detail=f"{nonzero} nonzero values"),
        Check("identities.expanded.formal", E.formal_key() == T.formal_key()),
    ]


def check_invariance_groups(ctx: Context, rng: random.Random) -> list[Check]:
    cfg = ctx.cfg
    chi = ctx.chi()
    c, n, p = chi.conductor, cfg.n, cfg.p
    N = cfg.N_gsp4
    vec = ctx.gsp4_vectors()
    count, npts = cfg.group_samples, cfg.group_points
    out = []
    plan = [
        ("identities.lemma_twist_group", vec["vchi"], G.twist_invariance_group(c), chi),
        ("identities.lemma_congruence_group", vec["vchi"], G.conjugation_invariance_group(n, c), None),
        ("identities.klingen_transformation", vec["tkl"], G.klingen(N), chi),
        ("identities.second_klingen_group", vec["tkl"], G.second_klingen_group(n, c), None),
    ]
    for name, v, S, ch in plan:
        sampler = G.generators(S, p, seed=rng.randrange(2 ** 31))
        pts = sample_points(v, npts, rng)
        good, total = group_action_check(v, sampler, count, pts, ch)
        out.append(Check(name, good == total, f"{total}/{total}", f"{good}/{total}"))
    return out


def check_convention(ctx: Context, rng: random.Random) -> Check:
    """pi(h) pi(g) W0 = pi(hg) W0, and both read off as W0(x h g)."""
    d = ctx.datum(4)
    W0 = SmoothVector.spherical(d)
    sampler = G.generators(G.klingen(1), d.p, seed=rng.randrange(2 ** 31))
    P = mpq(d.p)
    ok = True
    for _ in range(5):
        h = sampler.word() * G.special_element("tau", 0, d.p)
        g = G.corner(1 / P ** 2, d.p) * G.special_element("eta", 0, d.p)
        lhs = W0.translate(g).translate(h)
        rhs = W0.translate(h * g)
        pts = sample_points(rhs, 4, rng)
        direct = [W0(x * h * g) for x in pts]
        ok &= evaluate_many(lhs, pts) == evaluate_many(rhs, pts) == direct
    return Check("identities.composition_convention", ok)


@_timed
def suite_identities(ctx: Context, rng: random.Random) -> list[Check]:
    cfg = ctx.cfg
    out = [check_identities(ctx, rng, cfg.identity_tuples), check_convention(ctx, rng)]
    if not cfg.conductor:
        return out
    out += check_expanded(ctx, rng, cfg.eval_points)
    out += check_invariance_groups(ctx, rng)
    vec = ctx.gsp4_vectors()
    cfg4 = ctx.twist_config(4)
    ok, total = psi_factor_check(vec["W0"], cfg4, 20, rng)
    out.append(Check("identities.psi_factor", ok == total, f"{total}/{total}", f"{ok}/{total}"))
    W0 = vec["W0"]
    pts = sample_points(vec["tkl"], 10, rng)
    for name, op in (("vchi", v_chi), ("tkl", t_kl)):
        r = refinement_check(op, W0, cfg4, pts)
        out.append(Check(f"identities.refinement.{name}", r.passed, "stable", "stable" if r.passed else "changed",
                         detail=f"terms {r.terms[0]} -> {r.terms[1]}"))
    d2 = ctx.datum(2)
    cfg2 = ctx.twist_config(2)
    W2 = SmoothVector.spherical(d2)
    r = refinement_check(twist_gl2, W2, cfg2, sample_points(twist_gl2(W2, cfg2), 10, rng))
    out.append(Check("identities.refinement.gl2", r.passed, "stable", "stable" if r.passed else "changed"))
    return out


# ---------------------------------------------------------------------------
# GL(2)

def check_unramified_gl2(ctx: Context, rng: random.Random, points: int) -> list[Check]:
    d = ctx.datum(2)
    chi0 = ctx.chi(ramified=False)
    q = mpq(d.p)
    cfg = ctx.twist_config(2, chi0)
    out = []
    W0 = SmoothVector.spherical(d)
    for label, v in (("W0", W0), ("betaW0", beta(W0))):
        T = twist_gl2(v, cfg)
        const = _perturb(ctx.cfg, 1 - 1 / q)
        pts = sample_points(v, points, rng)
        ok = evaluate_many(T, pts) == [x * const for x in evaluate_many(v, pts)]
        out.append(Check(f"gl2.unramified.{label}", ok, str(const), _bool(ok)))
    return out


def check_gl2_theorem(ctx: Context, rng: random.Random) -> list[Check]:
    cfg = ctx.cfg
    chi = ctx.chi()
    d = ctx.datum(2)
    p = d.p
    q = mpq(p)
    tcfg = ctx.twist_config(2)
    N = tcfg.N
    W0 = SmoothVector.spherical(d)
    T = twist_gl2(W0, tcfg)
    out = []
    # transformation under Gamma_0(p^N)
    pts = sample_points(T, cfg.gl2_points, rng)
    sampler = G.generators(G.gamma0(N), p, seed=rng.randrange(2 ** 31))
    good, total = group_action_check(T, sampler, cfg.gl2_samples, pts, chi)
    out.append(Check("gl2.transformation", good == total, f"{total}/{total}", f"{good}/{total}"))
    window = cfg.window(2)
    z = zeta_gl2(T, chi, window, N=N)
    expected = gauss_sum(chi, -chi.conductor) * _perturb(cfg, 1 - 1 / q) * W0(G.identity(p, 2))
    rep = ZetaReport(z, expected, window or default_window(N))
    out.append(Check("gl2.zeta.twisted_newform", rep.match, scalar_data(expected),
                     _series_data(z)))
    zb = zeta_gl2(twist_gl2(beta(W0), tcfg), chi, window, N=N)
    out.append(Check("gl2.zeta.twisted_beta", not zb.coeffs, "0", _series_data(zb)))
    z0 = zeta_gl2(W0, chi, window, N=N)
    out.append(Check("gl2.zeta.untwisted_newform", not z0.coeffs, "0", _series_data(z0)))
    out.append(Check("gl2.beta_at_identity", not beta(W0)(G.identity(p, 2))))
    out.append(Check("gl2.beta_prime_identity", beta_prime(W0) is W0))
    return out


def _series_data(z) -> dict:
    return {str(m): scalar_data(z[m]) for m in z.support()}


@_timed
def suite_gl2(ctx: Context, rng: random.Random) -> list[Check]:
    out = check_unramified_gl2(ctx, rng, 10)
    if ctx.cfg.conductor:
        out += check_gl2_theorem(ctx, rng)
    return out


# ---------------------------------------------------------------------------
# GSp(4)

def check_unramified_gsp4(ctx: Context, rng: random.Random, points: int) -> list[Check]:
    d = ctx.datum(4)
    q = mpq(d.p)
    chi0 = ctx.chi(ramified=False)
    out = []
    W0 = SmoothVector.spherical(d)
    for label, v, n in (("W0", W0, 0), ("etaW0", eta_translate(W0), 2)):
        cfg = ctx.twist_config(4, chi0, n)
        pts = sample_points(v, points, rng)
        base = evaluate_many(v, pts)
        vc = v_chi(v, cfg)
        c1 = _perturb(ctx.cfg, (1 - 1 / q) ** 2)
        ok = evaluate_many(vc, pts) == [x * c1 for x in base]
        out.append(Check(f"gsp4.unramified.vchi.{label}", ok, str(c1), _bool(ok)))
        tk = t_kl(v, cfg, vc)
        c2 = _perturb(ctx.cfg, (1 + 1 / q) * (1 - 1 / q) ** 2)
        ok = evaluate_many(tk, pts) == [x * c2 for x in base]
        out.append(Check(f"gsp4.unramified.tkl.{label}", ok, str(c2), _bool(ok)))
    return out


def check_paramodular_transformation(ctx: Context, rng: random.Random, c2s) -> list[Check]:
    """T_chi(pi(k) y) = chi(lambda(k)) T_chi(y) for k = rep * (Klingen member), one check per c2.

    The c2 models share their translate list, so the same elements and points
    are evaluated for all of them in one pass over the lattice forms.
    """
    cfg = ctx.cfg
    chi = ctx.chi()
    Ts = [ctx.gsp4_vectors(c2)["tchi"] for c2 in c2s]
    p = cfg.p
    N = cfg.N_gsp4
    reps = G.paramodular_coset_representatives(N, p)
    kl = G.generators(G.klingen(N), p, seed=rng.randrange(2 ** 31))
    pts = sample_points(Ts[0], cfg.gsp4_points, rng)
    ks = [r * kl.sample() for r in reps for _ in range(cfg.klingen_per_coset)]
    flat = [y * k for k in ks for y in pts]
    npts = len(pts)
    values = evaluate_across(Ts, pts + flat)
    signs = [chi(k.similitude()) for k in ks]
    out = []
    for c2, vals in zip(c2s, values):
        base, vals = vals[:npts], vals[npts:]
        good = sum(all(vals[i * npts + j] == base[j] * sign for j in range(npts))
                   for i, sign in enumerate(signs))
        out.append(Check(f"gsp4.c2={c2}.transformation", good == len(ks), f"{len(ks)}/{len(ks)}",
                         f"{good}/{len(ks)}", detail=f"{sum(bool(x) for x in base)} of {npts} base values nonzero"))
    return out


def check_gsp4_zeta(ctx: Context, c2: int) -> list[Check]:
    cfg = ctx.cfg
    chi = ctx.chi()
    vec = ctx.gsp4_vectors(c2)
    modes = ["shortcut", "full"] if cfg.zeta_mode == "both" else [cfg.zeta_mode]
    out = []
    series = {}
    for mode in modes:
        r = verify_theorem_gsp4(cfg.gsp4_params, chi, cfg.c1, c2, mode, vectors=vec,
                                window=cfg.window(4), twist=ctx.twist_config(4))
        thm_exp = _perturb(cfg, r.theorem.expected)
        lem_exp = _perturb(cfg, r.lemma.expected)
        tag = f"gsp4.c2={c2}.{mode}"
        out.append(Check(f"{tag}.zeta_tchi", ZetaReport(r.theorem.series, thm_exp, r.theorem.window).match,
                         scalar_data(thm_exp), _series_data(r.theorem.series)))
        out.append(Check(f"{tag}.zeta_tkl", ZetaReport(r.lemma.series, lem_exp, r.lemma.window).match,
                         scalar_data(lem_exp), _series_data(r.lemma.series)))
        out.append(Check(f"{tag}.factor_q", r.factor_q))
        out.append(Check(f"{tag}.weyl_part_zero", r.weyl_part_zero))
        series[mode] = (r.theorem.series, r.lemma.series)
    if len(series) == 2:
        out.append(Check(f"gsp4.c2={c2}.mode_agreement", series["shortcut"] == series["full"]))
    ctx.zeta_constants[c2] = next(iter(series.values()))[0]
    return out


@_timed
def suite_gsp4(ctx: Context, rng: random.Random) -> list[Check]:
    out = check_unramified_gsp4(ctx, rng, 10)
    if not ctx.cfg.conductor:
        return out
    out += check_paramodular_transformation(ctx, rng, ctx.cfg.c2_values)
    for c2 in ctx.cfg.c2_values:
        out += check_gsp4_zeta(ctx, c2)
    c2s = ctx.cfg.c2_values
    if len(c2s) >= 2:
        # the zeta constant follows chi(c2)
        chi = ctx.chi()
        first = ctx.zeta_constants[c2s[0]].scale(chi(c2s[0]))
        follows = all(ctx.zeta_constants[c].scale(chi(c)) == first for c in c2s[1:])
        signs = ",".join(f"{c}:{chi(c):+d}" for c in c2s)
        out.append(Check("gsp4.c2_sign_rule", follows, "Z(c2) chi(c2) independent of c2",
                         "independent" if follows else "varies", detail=f"chi(c2) {signs}"))
    return out


# ---------------------------------------------------------------------------
# vanishing

@_timed
def suite_vanishing(ctx: Context, rng: random.Random) -> list[Check]:
    cfg = ctx.cfg
    if not cfg.conductor:
        return [Check("vanishing.skipped_unramified", True, "n/a", "n/a")]
    ev = ctx.eta_vectors()
    Te = ev["tchi"]
    vec = ctx.gsp4_vectors()
    pts = sample_points(vec["tchi"], cfg.eval_points, rng)
    vals = evaluate_many(Te, pts)
    zeros = sum(not x for x in vals)
    out = [Check("vanishing.eta_newform.values", zeros == len(pts), f"{len(pts)}/{len(pts)}",
                 f"{zeros}/{len(pts)}", detail=f"{len(Te)} terms after merging")]
    ze = zeta_gsp4(Te, ctx.chi(), cfg.window(4), N=cfg.N_gsp4)
    out.append(Check("vanishing.eta_newform.zeta", not ze.coeffs, "0", _series_data(ze)))
    cfg4 = ctx.twist_config(4)
    cases = (("eta_newform", ev["eta"], Te, True, True),
             ("newform", vec["W0"], vec["tchi"], False, False),
             ("zero", SmoothVector.zero(vec["W0"].datum), None, True, True))
    for label, v, T, inv_expected, zero_expected in cases:
        r = vanishing_criterion_check(v, cfg4, pts[:10], T)
        ok = r.consistent and r.invariant == inv_expected and r.zero == zero_expected
        out.append(Check(f"vanishing.criterion.{label}", ok,
                         f"invariant={_bool(inv_expected)} zero={_bool(zero_expected)}",
                         f"invariant={_bool(r.invariant)} zero={_bool(r.zero)}"))
    return out


# ---------------------------------------------------------------------------
# oracles

def dominant_points(size: int, bound: int):
    if size == 2:
        return [(m, 0) for m in range(bound + 1)]
    out = []
    for e1, e2, e3 in itertools.product(range(bound + 1), repeat=3):
        e4 = e2 + e3 - e1
        if e1 >= e2 >= e3 and 0 <= e4 <= bound:
            out.append((e1, e2, e3, e4))
    return out


@_timed
def suite_oracles(ctx: Context, rng: random.Random) -> list[Check]:
    out = []
    bound = ctx.cfg.oracle_max_exponent
    for size in (2, 4):
        d = ctx.datum(size)
        pts = dominant_points(size, bound)
        bad = []
        for e in pts:
            rep = jacquet_oracle(d, e)
            if rep.value != d.torus_value(e):
                bad.append(e)
        label = "gl2" if size == 2 else "gsp4"
        out.append(Check(f"oracles.{label}.casselman_shalika", not bad, f"{len(pts)}/{len(pts)}",
                         f"{len(pts) - len(bad)}/{len(pts)}", detail=f"mismatches {bad}" if bad else ""))
    return out


SUITE_FUNCTIONS = {
    "gauss": suite_gauss,
    "cosets": suite_cosets,
    "identities": suite_identities,
    "gl2": suite_gl2,
    "gsp4": suite_gsp4,
    "vanishing": suite_vanishing,
    "oracles": suite_oracles,
}


def suite_rng(seed: int, suite: str) -> random.Random:
    return random.Random(f"{seed}:{suite}")


def run_suite(name: str, ctx: Context) -> list[Check]:
    return SUITE_FUNCTIONS[name](ctx, suite_rng(ctx.cfg.seed, name))
