"""Run configuration: a flat key-value YAML document, overridable from the command line."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import yaml
from gmpy2 import mpq

from .characters import QuadraticCharacter
from .whittaker import SatakeParams

SUITES = ("gauss", "cosets", "identities", "gl2", "gsp4", "vanishing", "oracles")
LEVEL_KEYS = ("level_gl2_b", "level_a", "level_b", "level_z", "level_x", "level_zN")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass
class RunConfig:
    p: int = 3
    conductor: int = 1
    sign: int = 1
    satake_gl2: list = field(default_factory=lambda: ["2", "1/2"])
    satake_gsp4: list = field(default_factory=lambda: ["4", "1/9", "3/2"])
    c1: int = 1
    c2: list = field(default_factory=lambda: [1, 2])
    n: int = 0
    window_lo: int | None = None
    window_hi: int | None = None
    depth: int | None = None
    seed: int = 0
    suites: list = field(default_factory=lambda: list(SUITES))
    gl2_samples: int = 150
    gl2_points: int = 20
    klingen_per_coset: int = 3
    gsp4_points: int = 10
    group_samples: int = 50
    group_points: int = 5
    eval_points: int = 30
    identity_tuples: int = 100
    coset_samples: int = 500
    oracle_max_exponent: int = 3
    zeta_mode: str = "both"
    self_test: bool = False
    level_gl2_b: int | None = None
    level_a: int | None = None
    level_b: int | None = None
    level_z: int | None = None
    level_x: int | None = None
    level_zN: int | None = None

    # -- derived data
    @property
    def character(self) -> QuadraticCharacter:
        return QuadraticCharacter(self.p, self.conductor, self.sign)

    @property
    def gl2_params(self) -> SatakeParams:
        return SatakeParams(tuple(mpq(str(x)) for x in self.satake_gl2))

    @property
    def gsp4_params(self) -> SatakeParams:
        return SatakeParams(tuple(mpq(str(x)) for x in self.satake_gsp4))

    @property
    def c2_values(self) -> list[int]:
        return list(self.c2) if isinstance(self.c2, (list, tuple)) else [self.c2]

    @property
    def N_gl2(self) -> int:
        return max(self.n, 2 * self.conductor)

    @property
    def N_gsp4(self) -> int:
        return max(self.n + 2 * self.conductor, 4 * self.conductor)

    def cyclotomic_depth(self, size: int) -> int:
        if self.depth is not None:
            return self.depth
        N = self.N_gl2 if size == 2 else self.N_gsp4
        return N + 2 * self.conductor + 4

    def window(self, size: int):
        if self.window_lo is None and self.window_hi is None:
            return None
        N = self.N_gl2 if size == 2 else self.N_gsp4
        lo = -(N + 2) if self.window_lo is None else self.window_lo
        hi = N + 6 if self.window_hi is None else self.window_hi
        return lo, hi

    def level_overrides(self) -> dict:
        return {k[len("level_"):]: getattr(self, k) for k in LEVEL_KEYS
                if getattr(self, k) is not None}

    def validate(self) -> "RunConfig":
        if not isinstance(self.p, int) or not _is_prime(self.p) or self.p == 2:
            raise ConfigError("p", f"must be an odd prime, got {self.p!r}")
        if self.conductor not in (0, 1):
            raise ConfigError("conductor", "a quadratic character of odd residue characteristic has conductor 0 or 1")
        if self.sign not in (1, -1):
            raise ConfigError("sign", "must be 1 or -1")
        for name in ("satake_gl2", "satake_gsp4"):
            try:
                vals = tuple(mpq(str(x)) for x in getattr(self, name))
                params = SatakeParams(vals)
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise ConfigError(name, str(exc)) from None
            if not params.is_regular():
                raise ConfigError(name, "Satake parameters must be regular")
        for name, vals in (("c1", [self.c1]), ("c2", self.c2_values)):
            for c in vals:
                if not isinstance(c, int) or c % self.p == 0:
                    raise ConfigError(name, f"must be integers prime to p, got {c!r}")
        if not isinstance(self.n, int) or self.n < 0:
            raise ConfigError("n", "must be a non-negative integer")
        if self.depth is not None and (not isinstance(self.depth, int) or self.depth < 1):
            raise ConfigError("depth", "must be a positive integer")
        lo, hi = self.window_lo, self.window_hi
        if lo is not None and hi is not None and lo > hi:
            raise ConfigError("window_lo", "exceeds window_hi")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError("suites", f"unknown suite(s) {bad}; choose from {list(SUITES)}")
        for name in ("gl2_samples", "gl2_points", "klingen_per_coset", "gsp4_points",
                     "group_samples", "group_points", "eval_points", "identity_tuples",
                     "coset_samples", "oracle_max_exponent"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                raise ConfigError(name, "must be a positive integer")
        if self.zeta_mode not in ("shortcut", "full", "both"):
            raise ConfigError("zeta_mode", "must be shortcut, full or both")
        for k in LEVEL_KEYS:
            v = getattr(self, k)
            if v is not None and (not isinstance(v, int) or v < 0):
                raise ConfigError(k, "quadrature levels are non-negative integers")
        return self

    def echo(self) -> dict:
        """Config as plain data, with the derived levels added."""
        out = {k: v for k, v in asdict(self).items()}
        out["satake_gl2"] = [str(x) for x in self.satake_gl2]
        out["satake_gsp4"] = [str(x) for x in self.satake_gsp4]
        out["c2"] = self.c2_values
        out["derived_N_gl2"] = self.N_gl2
        out["derived_N_gsp4"] = self.N_gsp4
        out["derived_depth_gl2"] = self.cyclotomic_depth(2)
        out["derived_depth_gsp4"] = self.cyclotomic_depth(4)
        return dict(sorted(out.items()))


FIELD_NAMES = tuple(f.name for f in fields(RunConfig))


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    data: dict = {}
    if path:
        try:
            with open(path) as fh:
                loaded = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        except yaml.YAMLError as exc:
            raise ConfigError("config", f"not valid YAML: {exc}") from None
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config", "the document must be a flat mapping")
        data.update(loaded)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(data) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    for k, v in data.items():
        if isinstance(v, dict):
            raise ConfigError(k, "nested values are not allowed; the config is flat")
    return RunConfig(**data).validate()
