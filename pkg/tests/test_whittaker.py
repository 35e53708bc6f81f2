import random

import pytest
from gmpy2 import mpq

from paratwist import groups as G
from paratwist.cyclotomic import CycScalar
from paratwist.jacquet import jacquet_oracle
from paratwist.sampling import gsp4_point
from paratwist.suites import dominant_points
from paratwist.whittaker import (RegularityError, SatakeParams, SmoothVector, WhittakerDatum,
                                 evaluate_across, evaluate_many, spherical_eval, spherical_eval_iwasawa,
                                 weyl_character)

P = 3
GSP4 = SatakeParams((mpq(4), mpq(1, 9), mpq(3, 2)))
GL2 = SatakeParams((mpq(2), mpq(1, 2)))


@pytest.fixture(scope="module")
def d4():
    return WhittakerDatum(P, GSP4, 1, 2, depth=6)


@pytest.fixture(scope="module")
def d2():
    return WhittakerDatum(P, GL2, depth=6)


def random_unipotent(rng):
    return G.upper_unipotent(*(mpq(rng.randrange(-30, 30), P ** rng.randint(0, 3)) for _ in range(4)), P)


def test_psi_equivariance(d4):
    rng = random.Random(1)
    compact = G.generators(G.maximal_compact(), P, seed=2)
    for _ in range(50):
        g = gsp4_point(P, rng, compact)
        n = random_unipotent(rng)
        arg = d4.c1 * n[0, 1] + d4.c2 * n[1, 2]
        assert spherical_eval(d4, n * g) == d4.psi(arg) * spherical_eval(d4, g)


@pytest.mark.parametrize("S", [G.maximal_compact(), G.klingen(0), G.paramodular(0)],
                         ids=["maximal", "klingen0", "paramodular0"])
def test_right_invariance(d4, S):
    rng = random.Random(3)
    compact = G.generators(G.maximal_compact(), P, seed=4)
    sampler = G.generators(S, P, seed=5)
    for _ in range(50):
        g = gsp4_point(P, rng, compact)
        k = sampler.word()
        assert spherical_eval(d4, g * k) == spherical_eval(d4, g)


def test_lattice_route_matches_iwasawa_route(d4, d2):
    rng = random.Random(9)
    compact = G.generators(G.maximal_compact(), P, seed=6)
    for _ in range(200):
        g = gsp4_point(P, rng, compact) * G.special_element("eta", 0, P)
        assert spherical_eval(d4, g) == spherical_eval_iwasawa(d4, g)
    for _ in range(100):
        g = G.gl2(1, mpq(rng.randrange(50), 9), 0, 1, P) * G.gl2(P ** rng.randint(-1, 3), 0, rng.randrange(9), 1, P)
        assert spherical_eval(d2, g) == spherical_eval_iwasawa(d2, g)


def test_vanishes_off_dominant_cone(d4):
    rng = random.Random(4)
    Pq = mpq(P)
    hit = 0
    while hit < 20:
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)
        e = (a + b, a, b, 0)
        if e[0] >= e[1] >= e[2]:
            continue
        hit += 1
        t = G.diag((Pq ** e[0], Pq ** e[1], Pq ** e[2], 1), P)
        assert not spherical_eval(d4, t)


def test_normalized_at_identity(d4, d2):
    assert spherical_eval(d4, G.identity(P)) == CycScalar.one(P)
    assert spherical_eval(d2, G.identity(P, 2)) == CycScalar.one(P)


@pytest.mark.parametrize("size", [2, 4])
def test_casselman_shalika_matches_jacquet(size, d2, d4):
    d = d2 if size == 2 else d4
    pts = dominant_points(size, 3 if size == 2 else 2)
    for e in pts:
        assert jacquet_oracle(d, e).value == d.torus_value(e), e


def test_weyl_character_trivial_rep():
    assert weyl_character(GSP4, (0, 0, 0, 0)) == 1


def test_irregular_parameters_rejected():
    with pytest.raises(RegularityError):
        WhittakerDatum(P, SatakeParams((mpq(1), mpq(1))))


def test_batched_evaluation_matches_termwise(d4):
    rng = random.Random(8)
    terms = []
    for _ in range(40):
        h = G.corner(mpq(rng.randrange(81), 81), P) * G.lower32(rng.randrange(9), P)
        if rng.random() < 0.5:
            h = h * G.special_element("tau", 0, P)
        terms.append((mpq(rng.randint(-4, 4), rng.randint(1, 3)), h))
    v = SmoothVector(d4, terms)
    assert len(v) >= 16
    compact = G.generators(G.maximal_compact(), P, seed=3)
    pts = [gsp4_point(P, rng, compact) for _ in range(30)]
    fast = evaluate_many(v, pts)
    slow = []
    for g in pts:
        total = CycScalar.zero(P, d4.depth)
        for c, h in v.terms:
            total = total + spherical_eval(d4, g * h) * c
        slow.append(total)
    assert fast == slow


def test_evaluation_across_models_matches_separate_runs(d4):
    from paratwist.zeta import rebase
    rng = random.Random(9)
    terms = [(mpq(rng.randint(1, 5)), G.corner(mpq(rng.randrange(81), 81), P) * G.lower32(rng.randrange(9), P))
             for _ in range(30)]
    v = SmoothVector(d4, terms)
    others = [rebase(v, WhittakerDatum(P, GSP4, c1, c2, depth=d4.depth + extra))
              for c1, c2, extra in ((1, 1, 0), (2, 5, 1), (4, 2, 0))]
    compact = G.generators(G.maximal_compact(), P, seed=4)
    pts = [gsp4_point(P, rng, compact) for _ in range(12)]
    vectors = [v] + others
    assert evaluate_across(vectors, pts) == [evaluate_many(w, pts) for w in vectors]
    # small chunks exercise the split into several passes
    assert evaluate_across(vectors, pts, chunk=len(v) * 5) == [evaluate_many(w, pts) for w in vectors]


def test_merging_combines_equal_cosets(d4):
    k = G.levi_gl2(1, 1, 0, 1, P)
    v = SmoothVector(d4, [(1, G.identity(P)), (2, k)])
    assert len(v) == 1 and v.terms[0][0] == 3
    assert SmoothVector(d4, [(1, G.identity(P)), (-1, k)]).is_formally_zero()


def test_translation_convention(d4):
    rng = random.Random(12)
    W0 = SmoothVector.spherical(d4)
    h = G.corner(mpq(1, 9), P) * G.special_element("eta", 0, P)
    compact = G.generators(G.maximal_compact(), P, seed=1)
    for _ in range(10):
        x = gsp4_point(P, rng, compact)
        assert W0.translate(h)(x) == spherical_eval(d4, x * h)
