"""Deterministic evaluation points for equality checks."""
from __future__ import annotations

import random

from gmpy2 import mpq

from .groups import (GroupElement, diag, generators, gl2, lower32, maximal_compact,
                     upper_unipotent)
from .whittaker import SmoothVector, evaluate_many


def _unit(rng: random.Random, p: int, bound: int = 2) -> int:
    return rng.choice([u for u in range(1, p ** bound) if u % p])


def _fraction(rng: random.Random, p: int, depth: int = 3) -> mpq:
    return mpq(rng.randrange(p ** depth), p ** rng.randint(0, depth))


def gsp4_point(p: int, rng: random.Random, compact=None) -> GroupElement:
    """n t k with n upper unipotent, t a torus element near the identity and k integral."""
    P = mpq(p)
    a, b = rng.randint(-1, 2), rng.randint(-1, 2)
    u = _unit(rng, p)
    t = diag((P ** (a + b) * u, P ** a, P ** b * u, 1), p)
    n = upper_unipotent(*(_fraction(rng, p) for _ in range(4)), p)
    k = compact.word(2) if compact is not None else lower32(rng.randrange(p ** 2), p)
    return n * t * k


def gl2_point(p: int, rng: random.Random) -> GroupElement:
    P = mpq(p)
    m = rng.randint(-1, 3)
    x = _fraction(rng, p)
    k = gl2(1, 0, rng.randrange(p), 1, p) if rng.random() < 0.5 else gl2(0, 1, -1, 0, p)
    return gl2(1, x, 0, 1, p) * gl2(_unit(rng, p) * P ** m, 0, 0, 1, p) * k


def zeta_line_point(p: int, rng: random.Random) -> GroupElement:
    """n diag(t, t, 1, 1) k, where twisted vectors tend to be supported."""
    P = mpq(p)
    t = _unit(rng, p) * P ** rng.randint(-1, 1)
    n = upper_unipotent(*(_fraction(rng, p, 2) for _ in range(4)), p)
    return n * diag((t, t, 1, 1), p) * lower32(rng.randrange(p), p)


def sample_points(v: SmoothVector, count: int, rng: random.Random,
                  nonzero_share: float = 0.5, tries: int = 400) -> list[GroupElement]:
    """``count`` points of which about ``nonzero_share`` give nonzero values of v.

    Generic points come first; points on the zeta line are added until the
    nonzero quota is met or ``tries`` candidates have been seen.
    """
    d = v.datum
    p = d.p
    if d.size == 2:
        gen = lambda: gl2_point(p, rng)  # noqa: E731
        special = gen
    else:
        compact = generators(maximal_compact(), p, seed=rng.randrange(2 ** 31))
        gen = lambda: gsp4_point(p, rng, compact)  # noqa: E731
        special = lambda: zeta_line_point(p, rng)  # noqa: E731
    want = int(round(count * nonzero_share))
    chosen: list = []
    if want and len(v):
        batch = max(8, 2 * want)
        seen = 0
        while len(chosen) < want and seen < tries:
            cands = [special() if i % 2 else gen() for i in range(batch)]
            seen += batch
            for g, val in zip(cands, evaluate_many(v, cands)):
                if val and len(chosen) < want:
                    chosen.append(g)
    while len(chosen) < count:
        chosen.append(gen())
    return chosen
