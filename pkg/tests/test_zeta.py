import random

import pytest
from gmpy2 import mpq

from conftest import GL2_PARAMS, GSP4_PARAMS, gsp4_vectors
from paratwist import groups as G
from paratwist.characters import QuadraticCharacter, gauss_sum
from paratwist.cyclotomic import CycScalar
from paratwist.jacquet import StabilizationError
from paratwist.twist import TwistConfig, beta, twist_gl2
from paratwist.whittaker import SatakeParams, SmoothVector, WhittakerDatum
from paratwist.zeta import verify_theorem_gl2, verify_theorem_gsp4, zeta_gl2, zeta_gsp4


@pytest.mark.parametrize("p,params", [(3, GL2_PARAMS), (5, SatakeParams((mpq(3), mpq(1, 3))))])
@pytest.mark.parametrize("sign", [1, -1])
def test_gl2_theorem(p, params, sign):
    chi = QuadraticCharacter(p, 1, sign)
    rep = verify_theorem_gl2(params, chi, samples=10, points=5, seed=p)
    assert rep.match
    assert rep.series.is_constant()
    assert rep.evidence["transformation"]


def gl2_twisted(sign=1):
    chi = QuadraticCharacter(3, 1, sign)
    cfg = TwistConfig(chi, 0, 2)
    d = WhittakerDatum(3, GL2_PARAMS, depth=8)
    W0 = SmoothVector.spherical(d)
    return chi, cfg, W0


def test_gl2_zeta_kills_untwisted_and_beta():
    chi, cfg, W0 = gl2_twisted()
    assert not zeta_gl2(W0, chi, N=cfg.N).coeffs
    assert not zeta_gl2(twist_gl2(beta(W0), cfg), chi, N=cfg.N).coeffs
    assert not beta(W0)(G.identity(3, 2))


def test_unramified_zeta_does_not_stabilize():
    chi = QuadraticCharacter(3, 0, 1)
    W0 = SmoothVector.spherical(WhittakerDatum(3, GL2_PARAMS, depth=4))
    with pytest.raises(StabilizationError):
        zeta_gl2(W0, chi, window=(0, 3))


def shell_constant_combination(d, rng):
    """Translates by GSp(4, O) and by torus elements: values on diag(t, t, 1, 1) depend on |t| only."""
    P = mpq(3)
    compact = G.generators(G.maximal_compact(), 3, seed=rng.randrange(1000))
    terms = []
    for _ in range(rng.randint(1, 4)):
        a, b = rng.randint(0, 2), rng.randint(0, 2)
        h = G.diag((P ** (a + b), P ** a, P ** b, 1), 3) if rng.random() < 0.5 else compact.word(2)
        terms.append((mpq(rng.randint(-3, 3), rng.randint(1, 3)), h))
    return SmoothVector(d, terms)


def test_shells_of_ramified_character_vanish():
    chi = QuadraticCharacter(3, 1, -1)
    d = WhittakerDatum(3, GSP4_PARAMS, depth=6)
    rng = random.Random(10)
    for _ in range(10):
        v = shell_constant_combination(d, rng)
        assert not zeta_gsp4(v, chi, N=2).coeffs


def test_zeta_is_linear():
    chi, cfg, W0 = gl2_twisted(-1)
    rng = random.Random(2)
    P = mpq(3)
    for _ in range(5):
        h1 = G.gl2(1, mpq(rng.randrange(27), 9), 0, P ** rng.randint(0, 2), 3)
        h2 = G.gl2(P ** rng.randint(0, 1), mpq(rng.randrange(27), 27), 0, 1, 3)
        a, b = mpq(rng.randint(-5, 5), 2), mpq(rng.randint(-5, 5), 3)
        v1, v2 = twist_gl2(W0.translate(h1), cfg), twist_gl2(W0.translate(h2), cfg)
        lhs = zeta_gl2(v1.scale(a) + v2.scale(b), chi, N=cfg.N)
        rhs = zeta_gl2(v1, chi, N=cfg.N).scale(a) + zeta_gl2(v2, chi, N=cfg.N).scale(b)
        assert lhs == rhs


@pytest.mark.parametrize("c2", [1, 2])
def test_gsp4_theorem_shortcut(c2):
    vec, _ = gsp4_vectors(c2)
    rep = verify_theorem_gsp4(GSP4_PARAMS, vec["chi"], 1, c2, "shortcut", vectors=vec)
    assert rep.passed
    q = mpq(3)
    G3 = gauss_sum(vec["chi"], -1) ** 3
    expected = G3 * ((q - 1) * q * vec["chi"](c2))
    assert rep.theorem.series.constant_term() == expected
    assert rep.theorem.series.is_constant()


def test_sign_flip_between_c2_values():
    z1 = verify_theorem_gsp4(GSP4_PARAMS, gsp4_vectors(1)[0]["chi"], vectors=gsp4_vectors(1)[0])
    z2 = verify_theorem_gsp4(GSP4_PARAMS, gsp4_vectors(2)[0]["chi"], 1, 2, vectors=gsp4_vectors(2)[0])
    assert z1.theorem.series.scale(-1) == z2.theorem.series


def test_full_mode_agrees_for_klingen_vector(gsp4):
    chi, N = gsp4["chi"], gsp4["cfg"].N
    assert zeta_gsp4(gsp4["tkl"], chi, N=N, mode="full") == zeta_gsp4(gsp4["tkl"], chi, N=N)


def test_zeta_rejects_wrong_group(gsp4):
    with pytest.raises(ValueError):
        zeta_gl2(gsp4["W0"], gsp4["chi"])
    with pytest.raises(ValueError):
        zeta_gsp4(gsp4["W0"], gsp4["chi"], mode="other")


def test_expected_constant_is_nonzero():
    chi = QuadraticCharacter(3, 1, 1)
    assert gauss_sum(chi, -1) ** 3 != CycScalar.zero(3)
