import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from paratwist.characters import (QuadraticCharacter, enumerate_quadratic_characters,
                                  gauss_sum, ideal_rule, integers_rule, units_rule,
                                  verify_change_lemma)
from paratwist.cyclotomic import CycScalar

RAMIFIED = [QuadraticCharacter(p, 1, s) for p in (3, 5) for s in (1, -1)]


@pytest.mark.parametrize("chi", RAMIFIED, ids=lambda c: f"p{c.p}{c.label()}")
def test_gauss_sum_support(chi):
    c = chi.conductor
    for k in range(-c - 2, c + 3):
        g = gauss_sum(chi, k)
        assert bool(g) == (k == -c)


@pytest.mark.parametrize("chi", RAMIFIED, ids=lambda c: f"p{c.p}{c.label()}")
def test_gauss_sum_absolute_square(chi):
    g = gauss_sum(chi, -chi.conductor)
    assert g.conjugate_abs_square() == CycScalar.rational(mpq(1, chi.p ** chi.conductor), chi.p)


@pytest.mark.parametrize("chi", RAMIFIED, ids=lambda c: f"p{c.p}{c.label()}")
@pytest.mark.parametrize("k", [-3, -1, 0, 2])
def test_gauss_sum_stable_under_refinement(chi, k):
    base = gauss_sum(chi, k)
    assert gauss_sum(chi, k, level=max(1, -k) + 1) == base
    assert gauss_sum(chi, k, level=max(1, -k) + 2) == base


def test_unramified_gauss_sums():
    chi = QuadraticCharacter(3, 0, -1)
    # integral of psi(u p^k) over the units: 1 - 1/q, -1/q, 0
    assert gauss_sum(chi, 0) == CycScalar.rational(mpq(2, 3), 3)
    assert gauss_sum(chi, -1) == CycScalar.rational(mpq(-1, 3), 3)
    assert not gauss_sum(chi, -2)


@settings(max_examples=200)
@given(st.sampled_from([3, 5, 7]), st.integers(-10 ** 4, 10 ** 4).filter(bool), st.integers(-6, 6))
def test_character_is_multiplicative_and_quadratic(p, n, e):
    for chi in enumerate_quadratic_characters(p):
        x = mpq(n) * mpq(p) ** e
        if n % p == 0:
            continue
        assert chi(x) in (1, -1)
        assert chi(x * x) == 1
        assert chi(x * p) == chi(x) * chi.sign
        assert chi(x * 4) == chi(x)


def test_characters_reject_p2():
    with pytest.raises(ValueError):
        QuadraticCharacter(2, 1)
    with pytest.raises(ValueError):
        QuadraticCharacter(3, 2)


def test_quadrature_masses():
    assert units_rule(3, 2).mass() == mpq(2, 3)
    assert integers_rule(5, 2).mass() == 1
    assert ideal_rule(3, -2, 1).mass() == 9


@pytest.mark.parametrize("p", [3, 5])
def test_change_lemma_random(p):
    rng = random.Random(p)
    for _ in range(50):
        rep = verify_change_lemma(p, rng.randrange(-200, 200), rng.randint(1, 4), rng.randint(1, 4), rng)
        assert rep.passed


def test_change_lemma_rejects_bad_input():
    with pytest.raises(ValueError):
        verify_change_lemma(3, 1, 0, 2)
