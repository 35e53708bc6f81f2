"""Regenerate the golden report example in docs/ (gauss suite, seed 0)."""
import pathlib
import sys

from paratwist.cli import main

target = pathlib.Path(__file__).resolve().parent.parent / "docs" / "golden_gauss_report.json"
sys.exit(main(["--suite", "gauss", "--seed", "0", "--output", str(target)]))
