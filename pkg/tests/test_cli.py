import json

import pytest

from paratwist.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_NUMERIC, EXIT_OK, main
from paratwist.config import ConfigError, RunConfig, load_config
from paratwist.report import SCHEMA, SuiteReport, emit
from paratwist.suites import Check

SMALL = ["--coset_samples", "20", "--identity_tuples", "5", "--oracle_max_exponent", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, text):
    path = tmp_path / "run.yaml"
    path.write_text(text)
    return str(path)


def test_config_file_and_flag_precedence(tmp_path):
    path = write(tmp_path, "p: 5\nsign: -1\nc2: [1, 3]\nsuites: [gauss]\n")
    cfg = load_config(path, {"sign": 1})
    assert (cfg.p, cfg.sign, cfg.c2_values, cfg.suites) == (5, 1, [1, 3], ["gauss"])
    assert cfg.N_gsp4 == 4 and cfg.echo()["derived_N_gsp4"] == 4


@pytest.mark.parametrize("text,field", [
    ("p: 2\n", "p"),
    ("p: 9\n", "p"),
    ("conductor: 2\n", "conductor"),
    ("c2: [3]\n", "c2"),
    ("frobnicate: 1\n", "frobnicate"),
    ("p: {a: 1}\n", "p"),
    ("satake_gsp4: ['1', '1', '1']\n", "satake_gsp4"),
    ("suites: [gauss, nope]\n", "suites"),
    ("- 1\n- 2\n", "config"),
])
def test_config_errors_name_the_field(tmp_path, text, field):
    with pytest.raises(ConfigError) as info:
        load_config(write(tmp_path, text))
    assert info.value.field == field


def test_cli_config_error_exit_code(tmp_path, capsys):
    code, _, err = run(capsys, "--config", write(tmp_path, "p: 4\n"))
    assert code == EXIT_CONFIG and "p:" in err


def test_gauss_only_at_p5(capsys):
    code, out, _ = run(capsys, "--suite", "gauss", "--p", "5")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["schema"] == SCHEMA and doc["config"]["p"] == 5
    assert doc["checks"] and all(c["suite"] == "gauss" for c in doc["checks"])


def test_gauss_report_contains_exact_gauss_sum(capsys):
    _, out, _ = run(capsys, "--suite", "gauss")
    doc = json.loads(out)
    entry = next(c for c in doc["checks"] if c["name"] == "gauss.sign+1.k=-1.nonzero")
    # (1 + 2 zeta_3) / 3
    assert entry["computed"] == {"M": 1, "den": 3, "p": 3, "zeta": "1 2"}


def test_self_test_fails(capsys):
    code, out, _ = run(capsys, "--suite", "gauss", "--self_test", "true", "--format", "text")
    assert code == EXIT_FAIL
    assert any(line.startswith("FAIL ") for line in out.splitlines())


def test_text_format_one_line_per_check(capsys):
    code, out, _ = run(capsys, "--suite", "gauss", "cosets", "--format", "text", *SMALL)
    lines = out.splitlines()
    assert code == EXIT_OK
    assert all(line.split()[0] in ("PASS", "FAIL") for line in lines[:-1])
    assert lines[-1].startswith("PASS:")


def _no_floats(obj):
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(_no_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return all(_no_floats(v) for v in obj)
    return True


def test_reproducible_and_float_free(capsys):
    argv = ["--suite", "gauss", "cosets", "oracles", "--seed", "17", *SMALL]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert _no_floats(json.loads(first))
    _, other, _ = run(capsys, *argv[:-6], "--seed", "18", *SMALL)
    assert json.loads(other)["seed"] == 18


def test_parallel_matches_sequential(capsys):
    argv = ["--suite", "gauss", "cosets", "oracles", *SMALL]
    _, seq, _ = run(capsys, *argv)
    _, par, _ = run(capsys, *argv, "--parallel", "3")
    assert seq == par


def test_timings_are_integer_milliseconds(capsys):
    _, out, _ = run(capsys, "--suite", "gauss", "--timings")
    doc = json.loads(out)
    assert all(isinstance(c["elapsed_ms"], int) for c in doc["checks"])


def test_precision_failure_exit_code(capsys):
    code, _, err = run(capsys, "--suite", "gl2", "--depth", "1")
    assert code == EXIT_NUMERIC and "PrecisionError" in err


def test_empty_report_is_valid():
    rep = SuiteReport(RunConfig().echo(), 0, [])
    doc = json.loads(emit(rep))
    assert doc["checks"] == [] and doc["summary"]["total"] == 0 and doc["summary"]["status"] == "PASS"
    assert emit(rep, "text").strip().startswith("PASS: 0/0")


def test_report_rejects_floats():
    rep = SuiteReport({}, 0, ["x"], [("x", Check("x.bad", True, 0.5))])
    with pytest.raises(TypeError):
        emit(rep)


def test_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "--suite", "gauss", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text())["summary"]["failed"] == 0


def test_golden_example_is_current(capsys):
    import pathlib
    golden = pathlib.Path(__file__).resolve().parent.parent / "docs" / "golden_gauss_report.json"
    _, out, _ = run(capsys, "--suite", "gauss", "--seed", "0")
    assert out == golden.read_text()
