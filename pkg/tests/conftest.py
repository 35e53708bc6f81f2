"""Shared fixtures and the acceptance summary printed after the run."""
import time
from contextlib import contextmanager

import pytest
from gmpy2 import mpq

from paratwist.characters import QuadraticCharacter
from paratwist.twist import TwistConfig, t_chi, t_kl, v_chi
from paratwist.whittaker import SatakeParams, SmoothVector, WhittakerDatum

GSP4_PARAMS = SatakeParams((mpq(4), mpq(1, 9), mpq(3, 2)))
GL2_PARAMS = SatakeParams((mpq(2), mpq(1, 2)))

ACCEPTANCE: dict = {}
_BUILDS: dict = {}


def cached_build(key, build):
    """(value, seconds) for an expensive object shared between tests.

    The seconds are those of the first build; callers that care about
    runtime add them to their own clock so sharing never hides cost.
    """
    if key not in _BUILDS:
        t0 = time.perf_counter()
        value = build()
        _BUILDS[key] = (value, time.perf_counter() - t0)
    return _BUILDS[key]


def gsp4_vectors(c2=1, sign=1, p=3):
    """W0, v^chi, T^Kl, T_chi for n = 0 and a conductor-one character."""
    def build():
        chi = QuadraticCharacter(p, 1, sign)
        cfg = TwistConfig(chi, 0, 4)
        d = WhittakerDatum(p, GSP4_PARAMS, 1, c2, depth=cfg.N + 4)
        W0 = SmoothVector.spherical(d)
        vc = v_chi(W0, cfg)
        tk = t_kl(W0, cfg, vc)
        return {"chi": chi, "cfg": cfg, "datum": d, "W0": W0, "vchi": vc, "tkl": tk,
                "tchi": t_chi(W0, cfg, tk)}
    return cached_build(("gsp4", p, sign, c2), build)


@pytest.fixture(scope="session")
def gsp4():
    return gsp4_vectors()[0]


class Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.elapsed = 0.0
        self.charged = 0.0

    def charge(self, seconds):
        """Add the cost of a shared build this criterion relies on."""
        self.charged += seconds


@contextmanager
def criterion(number, title, limit):
    crit = Criterion(number, title, limit)
    t0 = time.perf_counter()
    status = "FAIL"
    note = ""
    try:
        yield crit
        crit.elapsed = time.perf_counter() - t0 + crit.charged
        status = "PASS" if crit.elapsed < limit else "FAIL"
        if status == "FAIL":
            note = " runtime over limit"
    except BaseException as exc:
        crit.elapsed = time.perf_counter() - t0 + crit.charged
        note = f" {type(exc).__name__}"
        raise
    finally:
        ACCEPTANCE[number] = (f"{status} criterion {number}: {title} "
                              f"({crit.elapsed:.1f} s, limit {limit:.0f} s){note}")
    assert crit.elapsed < limit, f"criterion {number} took {crit.elapsed:.1f} s (limit {limit} s)"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
