"""The nine acceptance criteria at full size, each under its runtime limit.

Each test prints one PASS/FAIL line in the terminal summary.  Objects that
several criteria share (the GSp(4) twisted vectors) are built once; their
build time is added to every criterion that uses them.
"""
import random

import pytest
from gmpy2 import mpq

from conftest import criterion
from paratwist import suites as S
from paratwist.characters import QuadraticCharacter, gauss_sum, verify_change_lemma
from paratwist.config import RunConfig
from paratwist.cyclotomic import CycScalar

pytestmark = pytest.mark.acceptance

_SHARED = {}


def shared_context() -> S.Context:
    if "ctx" not in _SHARED:
        _SHARED["ctx"] = S.Context(RunConfig(p=3, conductor=1, sign=1, n=0, c2=[1, 2]).validate())
    return _SHARED["ctx"]


def charge_builds(crit, ctx, before: dict, keys):
    """Charge builds of ``keys`` that happened before this criterion started."""
    for key in keys:
        if key in before:
            crit.charge(before[key])


def assert_all_pass(checks):
    failed = [f"{c.name}: expected {c.expected} computed {c.computed} {c.detail}" for c in checks if not c.passed]
    assert not failed, "\n".join(failed)


def test_criterion_1_gauss_lemma():
    with criterion(1, "Gauss sums vanish off k = -1, |G(chi,-1)|^2 = 1/q", 1.0):
        for p in (3, 5):
            for sign in (1, -1):
                chi = QuadraticCharacter(p, 1, sign)
                for k in range(-3, 4):
                    g = gauss_sum(chi, k)
                    assert bool(g) == (k == -1), (p, sign, k)
                g = gauss_sum(chi, -1)
                assert g.conjugate_abs_square() == CycScalar.rational(mpq(1, p), p)


def test_criterion_2_change_of_variable():
    with criterion(2, "change-of-variable lemma, 50 random (b, t, n) per prime", 1.0):
        for p in (3, 5):
            rng = random.Random(f"change:{p}")
            for _ in range(50):
                b, t, n = rng.randrange(-500, 500), rng.randint(1, 4), rng.randint(1, 4)
                rep = verify_change_lemma(p, b, t, n, rng)
                assert rep.bijective and rep.sums_agree, (p, b, t, n)


def test_criterion_3_gl2_theorem():
    with criterion(3, "GL(2): Gamma0 transformation, zeta constant, zeta of beta-twist", 30.0):
        for sign in (1, -1):
            cfg = RunConfig(p=3, conductor=1, sign=sign, satake_gl2=["2", "1/2"]).validate()
            ctx = S.Context(cfg)
            checks = S.check_gl2_theorem(ctx, S.suite_rng(cfg.seed, "gl2"))
            names = {c.name for c in checks}
            assert {"gl2.transformation", "gl2.zeta.twisted_newform", "gl2.zeta.twisted_beta"} <= names
            assert_all_pass(checks)


def test_criterion_4_gsp4_main_theorem():
    with criterion(4, "GSp(4): paramodular transformation, zeta constants for c2 = 1, 2, Klingen lemma", 600.0) as crit:
        ctx = shared_context()
        before = dict(ctx.build_seconds)
        rng = S.suite_rng(ctx.cfg.seed, "gsp4")
        checks = S.check_paramodular_transformation(ctx, rng, [1, 2])
        for c2 in (1, 2):
            checks += S.check_gsp4_zeta(ctx, c2)
        chi = ctx.chi()
        assert chi(2) == -1
        flip = ctx.zeta_constants[1].scale(-1) == ctx.zeta_constants[2]
        checks.append(S.Check("gsp4.sign_flip", flip))
        charge_builds(crit, ctx, before, [("datum", 4, 1), ("gsp4", 1), ("gsp4", 2)])
        names = [c.name for c in checks]
        for c2 in (1, 2):
            for part in ("transformation", "shortcut.zeta_tchi", "shortcut.zeta_tkl", "shortcut.factor_q",
                         "full.zeta_tchi", "mode_agreement"):
                assert f"gsp4.c2={c2}.{part}" in names
        assert_all_pass(checks)


def test_criterion_5_unramified_constants():
    with criterion(5, "unramified constants of T_chi, v^chi, T^Kl", 10.0):
        cfg = RunConfig(p=3, conductor=0, sign=1).validate()
        ctx = S.Context(cfg)
        rng = S.suite_rng(cfg.seed, "unramified")
        checks = S.check_unramified_gl2(ctx, rng, 10) + S.check_unramified_gsp4(ctx, rng, 10)
        assert len(checks) == 6
        assert_all_pass(checks)


def test_criterion_6_structural_identities():
    with criterion(6, "expanded form, conjugation identities, invariance groups", 120.0) as crit:
        ctx = shared_context()
        before = dict(ctx.build_seconds)
        rng = S.suite_rng(ctx.cfg.seed, "identities")
        checks = S.check_expanded(ctx, rng, 30)
        checks.append(S.check_identities(ctx, rng, 100))
        checks += S.check_invariance_groups(ctx, rng)
        charge_builds(crit, ctx, before, [("datum", 4, 1), ("gsp4", 1)])
        assert ctx.cfg.group_samples == 50
        assert_all_pass(checks)


def test_criterion_7_coset_decompositions():
    with criterion(7, "SL(2) partition over Z/27, paramodular cosets at N = 4", 120.0):
        cfg = RunConfig(p=3, conductor=1).validate()
        checks = S.suite_cosets(S.Context(cfg), S.suite_rng(cfg.seed, "cosets"))
        counts = {c.name: c.expected for c in checks}
        assert counts["cosets.paramodular.count"] == "108"
        assert counts["cosets.paramodular.complete"] == "500/500"
        assert_all_pass(checks)


def test_criterion_8_vanishing():
    with criterion(8, "T_chi(pi(eta) W0) = 0 and vanishing-criterion consistency", 300.0) as crit:
        ctx = shared_context()
        before = dict(ctx.build_seconds)
        checks = S.suite_vanishing(ctx, S.suite_rng(ctx.cfg.seed, "vanishing"))
        charge_builds(crit, ctx, before, [("datum", 4, 1), ("gsp4", 1), ("eta",)])
        assert ctx.cfg.eval_points == 30
        assert_all_pass(checks)


def test_criterion_9_oracles():
    with criterion(9, "Casselman-Shalika equals the Jacquet oracle, exponents <= 3", 120.0):
        cfg = RunConfig(p=3, oracle_max_exponent=3).validate()
        checks = S.suite_oracles(S.Context(cfg), S.suite_rng(cfg.seed, "oracles"))
        assert_all_pass(checks)
