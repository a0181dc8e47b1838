import json
import subprocess
import sys

import pytest

from conftest import CORPUS
from typepycker.cli import main
from typepycker.parser import parse

LISTING1 = str(CORPUS / "listing1.spy")


def run_cli(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_select_json(capsys):
    rc, out, _ = run_cli(capsys, "select", LISTING1, "--json")
    assert rc == 0
    assert out.strip() == '{"selected":[{"site":"param y","type":"Bool"}]}'


def test_run_report(capsys, tmp_path):
    report = tmp_path / "r.json"
    rc, _, _ = run_cli(capsys, "run", LISTING1, "--report", str(report))
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["dynamic"]["total"] == 3
    assert doc["outcome"] == {"kind": "value", "value": 3}
    assert len(doc["static_sites"]) == 3


def test_missing_file_is_a_tool_error(capsys):
    rc, out, err = run_cli(capsys, "parse", "nosuchfile.spy")
    assert rc == 2 and out == "" and "nosuchfile.spy" in err


def test_unknown_flag(capsys):
    rc, _, err = run_cli(capsys, "select", LISTING1, "--bogus")
    assert rc == 2 and "usage" in err


def test_program_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.spy"
    bad.write_text("x: Int = true\n")
    rc, _, err = run_cli(capsys, "run", str(bad))
    assert rc == 1 and "expected Int" in err
    bad.write_text("x = (\n")
    assert run_cli(capsys, "parse", str(bad))[0] == 1


def test_failed_run_exits_1(capsys, tmp_path):
    f = tmp_path / "fail.spy"
    f.write_text("x: * = true\ny: Int = x\n")
    rc, out, _ = run_cli(capsys, "run", str(f))
    assert rc == 1 and out.startswith("cast-failure")


def test_callees_json(capsys):
    rc, out, _ = run_cli(capsys, "callees", str(CORPUS / "higher_order.spy"))
    calls = json.loads(out)["calls"]
    dyn = [c["targets"] for c in calls if len(c["targets"]) > 1]
    assert dyn == [["f", "g", "h"], ["f", "g", "h"]]


def test_explain(capsys):
    rc, out, _ = run_cli(capsys, "select", LISTING1, "--explain", "return f", "--json")
    doc = json.loads(out)
    assert sorted(s["vertex"] for s in doc["closest_sources"]) == ["succ(u)", "succ(x)"]
    assert run_cli(capsys, "select", LISTING1, "--explain", "nothing")[0] == 2


def test_variant_fast_slow_output(capsys):
    rc, out, _ = run_cli(capsys, "variant", LISTING1, "--kind", "chosen", "--fast-slow")
    assert parse(out) == parse((CORPUS / "listing4.spy").read_text())
    assert "def f_fast(x: *, y: Bool) -> *:" in out


def test_prelude_from_environment(capsys, tmp_path, monkeypatch):
    (tmp_path / "std.pre").write_text("extern succ: Function([*], *)\n")
    prog = tmp_path / "p.spy"
    prog.write_text("succ(41)\n")
    monkeypatch.setenv("TYPEPYCKER_PRELUDE", str(tmp_path / "std.pre"))
    rc, out, _ = run_cli(capsys, "run", str(prog))
    assert rc == 0 and out.startswith("value 42")


@pytest.mark.parametrize("argv", [
    ["select", LISTING1, "--json"], ["infer", LISTING1, "--json"], ["graph", LISTING1, "--json"],
    ["callees", LISTING1], ["run", LISTING1, "--json"], ["graph", LISTING1, "--dot"],
])
def test_json_output_is_stable(capsys, argv):
    first = run_cli(capsys, *argv)[1]
    assert run_cli(capsys, *argv)[1] == first


def test_bench_outputs(capsys, tmp_path):
    j, c = tmp_path / "b.json", tmp_path / "b.csv"
    rc, out, _ = run_cli(capsys, "bench", str(CORPUS), "--json", str(j), "--csv", str(c))
    assert rc == 0 and "win" in out.splitlines()[-1]
    assert json.loads(j.read_text())["summary"]["error"] == 0
    assert c.read_text().startswith("program,variant,static_sites")
    assert run_cli(capsys, "bench", str(tmp_path / "none"))[0] == 2


def test_oracle_limit_exit_code(capsys):
    assert run_cli(capsys, "oracle", LISTING1, "--max-sites", "0")[0] == 2


def test_pipeline_alias(capsys):
    rc, out, _ = run_cli(capsys, "--pipeline", LISTING1)
    assert rc == 0 and "selected: param y: Bool" in out and "chosen vs infer: tie" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "typepycker.cli", "select", LISTING1],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "param y: Bool\n"
