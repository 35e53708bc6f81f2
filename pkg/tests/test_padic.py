import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from paratwist.padic import (INF, PAdicScalar, frac_part, legendre, reduce, residue,
                             unit_representatives, valuation, vp)

PRIMES = st.sampled_from([3, 5, 7])
nonzero_int = st.integers(-10 ** 6, 10 ** 6).filter(bool)


@settings(max_examples=300)
@given(PRIMES, nonzero_int, nonzero_int, st.integers(1, 999), st.integers(1, 999))
def test_valuation_is_additive_on_products(p, a, b, da, db):
    x, y = mpq(a, da), mpq(b, db)
    assert vp(x * y, p) == vp(x, p) + vp(y, p)


@settings(max_examples=300)
@given(PRIMES, nonzero_int, nonzero_int, st.integers(0, 4), st.integers(0, 4))
def test_valuation_of_sum_ultrametric(p, a, b, ea, eb):
    x, y = mpq(a, p ** ea), mpq(b, p ** eb)
    vx, vy = vp(x, p), vp(y, p)
    if x + y:
        assert vp(x + y, p) >= min(vx, vy)
    if vx != vy:
        assert vp(x + y, p) == min(vx, vy)


def test_zero_has_infinite_valuation():
    assert vp(0, 3) == INF
    assert PAdicScalar(0, 3).is_integral()


@settings(max_examples=1000)
@given(PRIMES, nonzero_int, st.integers(1, 999), nonzero_int, st.integers(1, 999), st.integers(1, 4))
def test_reduce_is_ring_homomorphism(p, a, da, b, db, m):
    while da % p == 0:
        da //= p
    while db % p == 0:
        db //= p
    x, y = mpq(a, da), mpq(b, db)
    assert reduce(x + y, m, p) == reduce(x, m, p) + reduce(y, m, p)
    assert reduce(x * y, m, p) == reduce(x, m, p) * reduce(y, m, p)


def test_reduce_rejects_non_integral():
    with pytest.raises(ValueError):
        reduce(mpq(1, 3), 2, 3)


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_unit_representative_count(p, m):
    reps = unit_representatives(p, m)
    assert len(reps) == p ** m - p ** (m - 1)
    assert all(r.is_unit() for r in reps)
    assert len({int(r) for r in reps}) == len(reps)


def test_residue_of_fraction():
    # 1/2 mod 9 is 5
    assert residue(mpq(1, 2), 3, 2) == 5


@given(st.integers(1, 10 ** 6), st.integers(1, 5))
def test_frac_part_reconstructs_polar_part(n, k):
    p = 3
    x = mpq(n, p ** k)
    r, j = frac_part(x, p)
    if j:
        assert vp(x - mpq(r, p ** j), p) >= 0
    else:
        assert vp(x, p) >= 0


def test_scalar_wrapper_arithmetic():
    x = PAdicScalar.from_parts(2, 1, 3)  # 2/3
    assert x.valuation == -1 and x.denominator_exponent == 1
    assert (x * 3).is_unit()
    assert valuation(x) == -1
    with pytest.raises(ValueError):
        x + PAdicScalar(1, 5)


def test_legendre():
    assert [legendre(u, 5) for u in (1, 2, 3, 4)] == [1, -1, -1, 1]
