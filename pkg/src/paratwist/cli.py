"""``verify``: run verification suites and print a report.

Exit status: 0 all checks pass, 1 some check failed, 2 invalid configuration,
3 a numerical routine failed to stabilize or ran out of cyclotomic precision.
"""
from __future__ import annotations

import argparse
import sys
import typing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields

from .config import SUITES, ConfigError, RunConfig, load_config
from .cyclotomic import PrecisionError
from .jacquet import StabilizationError
from .report import SuiteReport, emit
from .suites import Context, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


_LIST_PARSERS = {"c2": _int_list, "satake_gl2": _str_list, "satake_gsp4": _str_list, "suites": _str_list}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verify", description="Exact verification suites for quadratic twisting operators.")
    ap.add_argument("--config", help="flat YAML file of run keys")
    ap.add_argument("--suite", action="extend", nargs="+", choices=SUITES, dest="suite_list",
                    help="suites to run (repeatable); overrides the suites key")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--parallel", type=int, default=1, metavar="K", help="run suites in K worker processes")
    ap.add_argument("--timings", action="store_true", help="include per-check wall time in the report")
    ap.add_argument("--output", help="write the report here instead of stdout")
    keys = ap.add_argument_group("run keys", "every config key, same name; flags win over the file")
    hints = typing.get_type_hints(RunConfig)
    for f in fields(RunConfig):
        hint = hints[f.name]
        if f.name in _LIST_PARSERS:
            conv = _LIST_PARSERS[f.name]
        elif hint is bool:
            conv = _bool
        elif hint is str:
            conv = str
        else:
            conv = int
        keys.add_argument(f"--{f.name}", type=conv, default=None, dest=f"key_{f.name}")
    return ap


def overrides_from(args) -> dict:
    out = {k[len("key_"):]: v for k, v in vars(args).items() if k.startswith("key_") and v is not None}
    if args.suite_list:
        out["suites"] = list(dict.fromkeys(args.suite_list))
    return out


def _run_one(cfg: RunConfig, suite: str):
    return [(suite, c) for c in run_suite(suite, Context(cfg))]


def run_suites(cfg: RunConfig, parallel: int = 1) -> SuiteReport:
    report = SuiteReport(cfg.echo(), cfg.seed, list(cfg.suites))
    if parallel > 1 and len(cfg.suites) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            for part in pool.map(_run_one, [cfg] * len(cfg.suites), cfg.suites):
                report.checks += part
    else:
        ctx = Context(cfg)
        for suite in cfg.suites:
            report.checks += [(suite, c) for c in run_suite(suite, ctx)]
    report.checks.sort(key=lambda sc: sc[1].name)
    return report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.parallel < 1:
            raise ConfigError("parallel", "must be at least 1")
        cfg = load_config(args.config, overrides_from(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TypeError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_suites(cfg, args.parallel)
    except (StabilizationError, PrecisionError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = emit(report, args.format, args.timings)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
