import shutil
import subprocess

import pytest

from sandalc.cli import run
from sandalc.corpus import corpus


@pytest.fixture(scope="module")
def paths():
    return {name: str(path) for name, path in corpus().items()}


EXPECTED_EXITS = {
    "pingpong": 0,  # no ltl blocks: nothing to refute
    "2pc_nofault": 0,
    "2pc_timeout": 0,
    "2pc_drop": 1,
    "2pc_shutdown": 1,
    "2pc_allfaults": 1,
}


@pytest.mark.parametrize("name, expected", sorted(EXPECTED_EXITS.items()))
def test_check_exit_code_contract(paths, name, expected, capsys):
    code = run(["check", paths[name]])
    out = capsys.readouterr().out
    assert code == expected
    if name == "pingpong":
        assert "no ltl properties" in out
    elif expected == 0:
        assert "PASS" in out
    else:
        assert "FAIL" in out
        assert "LOOP back to step #" in out  # a lasso trace was printed


def test_check_prints_pass_line(paths, capsys):
    assert run(["check", paths["2pc_nofault"]]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "PASS" in out  # a bare PASS line per property


def test_compile_writes_smv_file(paths, tmp_path, capsys):
    out_file = tmp_path / "out.smv"
    assert run(["compile", paths["pingpong"], "-o", str(out_file)]) == 0
    text = out_file.read_text()
    assert text.startswith("MODULE")
    assert "MODULE main" in text


def test_dump_ir_lists_transitions(paths, capsys):
    assert run(["dump-ir", paths["pingpong"]]) == 0
    out = capsys.readouterr().out
    assert "process P0" in out and "process P1" in out
    assert "->" in out


def test_dump_ir_report_weave(paths, capsys):
    assert run(["dump-ir", paths["2pc_allfaults"], "--report-weave"]) == 0
    out = capsys.readouterr().out
    assert "weave report:" in out
    assert "arbiter" in out


def test_parse_error_diagnostic_format(tmp_path, capsys):
    bad = tmp_path / "bad.sandal"
    bad.write_text("proc P( {\n}\ninit {}\n")
    code = run(["check", str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert err.startswith(f"{bad}:1:")  # file:line:col: message


def test_type_error_diagnostic_format(tmp_path, capsys):
    bad = tmp_path / "bad.sandal"
    bad.write_text(
        "proc P(c channel { bool }) { var x bool\n  peek(c, x) }\n"
        "init { c: channel { bool }, p: P(c) }\n"
    )
    code = run(["check", str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert ":2:" in err.split(" ")[0]


def test_missing_file_is_usage_error(capsys):
    assert run(["check", "/nonexistent/model.sandal"]) == 2


def test_state_limit_exit_code(paths, capsys):
    code = run(["check", paths["2pc_allfaults"], "--max-states", "50"])
    assert code == 3
    assert "bound" in capsys.readouterr().err


def test_property_selector(paths, capsys):
    assert run(["check", paths["2pc_nofault"], "--property", "1"]) == 0
    assert run(["check", paths["2pc_nofault"], "--property", "2"]) == 2


def test_fairness_flag_accepted(paths, capsys):
    assert run(["check", paths["2pc_nofault"], "--fairness", "off"]) == 0
    assert run(["check", paths["2pc_drop"], "--fairness", "off"]) == 1


def test_unsupported_formula_is_an_error(tmp_path, capsys):
    model = tmp_path / "unsupported.sandal"
    model.write_text(
        "proc P() { var x bool }\n"
        "init { p: P() }\n"
        "ltl { G (F (G (p.x))) }\n"
    )
    code = run(["check", str(model)])
    assert code == 2
    assert "fragment" in capsys.readouterr().err


def test_check_reports_each_property(tmp_path, capsys):
    model = tmp_path / "two_specs.sandal"
    model.write_text(
        "proc P() { var x bool\n  x = true }\n"
        "init { p: P() }\n"
        "ltl { F (p.x) }\n"
        "ltl { G (p.x) }\n"
    )
    code = run(["check", str(model)])
    out = capsys.readouterr().out
    assert code == 1  # second property fails at the initial state
    assert "property 1:" in out and "property 2:" in out
    assert "PASS" in out and "FAIL" in out


@pytest.mark.skipif(shutil.which("sandalc") is None, reason="entry point not on PATH")
def test_console_script_smoke(paths):
    proc = subprocess.run(
        ["sandalc", "check", paths["2pc_nofault"]], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
