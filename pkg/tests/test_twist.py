import random

import pytest
from gmpy2 import mpq

from conftest import GL2_PARAMS, GSP4_PARAMS
from paratwist import groups as G
from paratwist.characters import QuadraticCharacter
from paratwist.sampling import sample_points
from paratwist.suites import group_action_check
from paratwist.twist import (TwistConfig, beta, eta_translate, psi_factor_check, refinement_check,
                             t_chi, t_chi_expanded, t_kl, twist_gl2, v_chi,
                             vanishing_criterion_check)
from paratwist.whittaker import SmoothVector, WhittakerDatum, evaluate_many


def gl2_setup(p, sign=1, conductor=1):
    chi = QuadraticCharacter(p, conductor, sign)
    cfg = TwistConfig(chi, 0, 2)
    params = GL2_PARAMS if p == 3 else GL2_PARAMS.__class__((mpq(3), mpq(1, 3)))
    d = WhittakerDatum(p, params, depth=cfg.N + 2 * conductor + 4)
    return chi, cfg, SmoothVector.spherical(d)


@pytest.mark.parametrize("p", [3, 5])
def test_gl2_unramified_constant(p):
    chi, cfg, W0 = gl2_setup(p, conductor=0)
    rng = random.Random(p)
    q = mpq(p)
    for v in (W0, beta(W0)):
        pts = sample_points(v, 10, rng)
        assert evaluate_many(twist_gl2(v, cfg), pts) == [x * (1 - 1 / q) for x in evaluate_many(v, pts)]


@pytest.mark.parametrize("p,sign", [(3, 1), (3, -1), (5, 1)])
def test_gl2_transformation_by_family(p, sign):
    chi, cfg, W0 = gl2_setup(p, sign)
    T = twist_gl2(W0, cfg)
    rng = random.Random(1)
    pts = sample_points(T, 8, rng)
    sampler = G.generators(G.gamma0(cfg.N), p, seed=3)
    base = evaluate_many(T, pts)
    for family in sampler.family_names():
        for _ in range(10):
            k = sampler.sample(family)
            assert evaluate_many(T, [y * k for y in pts]) == [b * chi(k.det()) for b in base], family


def test_gl2_refinement():
    chi, cfg, W0 = gl2_setup(3)
    rep = refinement_check(twist_gl2, W0, cfg, [])
    assert rep.formal_equal


def test_gsp4_unramified_constants():
    d = WhittakerDatum(3, GSP4_PARAMS, depth=4)
    chi = QuadraticCharacter(3, 0, -1)
    q = mpq(3)
    rng = random.Random(2)
    for v, n in ((SmoothVector.spherical(d), 0), (eta_translate(SmoothVector.spherical(d)), 2)):
        cfg = TwistConfig(chi, n, 4)
        pts = sample_points(v, 10, rng)
        base = evaluate_many(v, pts)
        vc = v_chi(v, cfg)
        assert evaluate_many(vc, pts) == [x * (1 - 1 / q) ** 2 for x in base]
        assert evaluate_many(t_kl(v, cfg, vc), pts) == [x * (1 + 1 / q) * (1 - 1 / q) ** 2 for x in base]


def test_term_counts(gsp4):
    assert len(gsp4["vchi"]) == 108
    assert len(gsp4["tkl"]) == 1296
    assert len(gsp4["tchi"]) == 15552


@pytest.mark.parametrize("which,group,twisted", [
    ("vchi", "twist", True),
    ("vchi", "congruence", False),
    ("tkl", "klingen", True),
    ("tkl", "second_klingen", False),
])
def test_invariance_groups(gsp4, which, group, twisted):
    cfg = gsp4["cfg"]
    S = {"twist": G.twist_invariance_group(cfg.c),
         "congruence": G.conjugation_invariance_group(cfg.n, cfg.c),
         "klingen": G.klingen(cfg.N),
         "second_klingen": G.second_klingen_group(cfg.n, cfg.c)}[group]
    v = gsp4[which]
    rng = random.Random(hash(group) % 1000)
    pts = sample_points(v, 4, rng)
    good, total = group_action_check(v, G.generators(S, 3, seed=7), 15, pts, gsp4["chi"] if twisted else None)
    assert good == total


def test_paramodular_transformation_sampled(gsp4):
    T, chi, cfg = gsp4["tchi"], gsp4["chi"], gsp4["cfg"]
    rng = random.Random(5)
    pts = sample_points(T, 3, rng)
    base = evaluate_many(T, pts)
    assert any(base)
    reps = G.paramodular_coset_representatives(cfg.N, 3)
    kl = G.generators(G.klingen(cfg.N), 3, seed=8)
    for _ in range(12):
        k = rng.choice(reps) * kl.sample()
        assert evaluate_many(T, [y * k for y in pts]) == [b * chi(k.similitude()) for b in base]


def test_expanded_form_is_the_same_vector(gsp4):
    E = t_chi_expanded(gsp4["W0"], gsp4["cfg"])
    assert E.formal_key() == gsp4["tchi"].formal_key()


def test_psi_factor_identity(gsp4):
    ok, total = psi_factor_check(gsp4["W0"], gsp4["cfg"], 20, random.Random(4))
    assert ok == total


@pytest.mark.parametrize("op", [v_chi, t_kl], ids=["vchi", "tkl"])
def test_gsp4_refinement(gsp4, op):
    assert refinement_check(op, gsp4["W0"], gsp4["cfg"], []).formal_equal


@pytest.mark.slow
def test_tchi_refinement(gsp4):
    assert refinement_check(t_chi, gsp4["W0"], gsp4["cfg"], []).formal_equal


def test_eta_translate_is_killed(gsp4):
    ev = eta_translate(gsp4["W0"])
    assert t_chi(ev, gsp4["cfg"]).is_formally_zero()


def test_vanishing_criterion(gsp4):
    cfg = gsp4["cfg"]
    pts = sample_points(gsp4["tchi"], 6, random.Random(6))
    for v, invariant in ((eta_translate(gsp4["W0"]), True), (gsp4["W0"], False),
                         (SmoothVector.zero(gsp4["datum"]), True)):
        rep = vanishing_criterion_check(v, cfg, pts, gsp4["tchi"] if v is gsp4["W0"] else None)
        assert rep.consistent and rep.invariant == invariant and rep.zero == invariant


def test_operators_check_group_size(gsp4):
    chi, cfg, W0 = gl2_setup(3)
    with pytest.raises(ValueError):
        twist_gl2(gsp4["W0"], cfg)
    with pytest.raises(ValueError):
        v_chi(W0, gsp4["cfg"])
