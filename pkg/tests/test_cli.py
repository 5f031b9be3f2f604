import io
import json
import subprocess
import sys

import pytest

from foliate.cli import main
from foliate.runner import bundled_scenarios, render_suite, run_suite, select_scenarios


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def scn(name):
    return str(bundled_scenarios()[name])


def test_run_scenario_file():
    code, out = run(["run", scn("frame_reduction")])
    assert code == 0
    assert "run reduce w Fr\n  status: ok\n  reduced: dz\n" in out


def test_single_operation_subcommand():
    code, out = run(["solve-basic", scn("suspension_t3"), "P", "F", "cutoff=1"])
    assert code == 0 and "status: infeasible" in out and "verified: true" in out


def test_cutoff_flag_overrides_header():
    code, out = run(["solve-basic", "--cutoff", "1", scn("suspension_t3"), "P", "F"])
    assert code == 0 and "cutoff: 1" in out


def test_json_format():
    code, out = run(["check-basic", "--format", "json", scn("connections"), "wc", "Fc"])
    doc = json.loads(out)
    assert code == 0
    assert doc["results"][0]["status"] == "basic"


def test_json_mirrors_text_fields():
    _, text = run(["run", scn("cartan_model")])
    _, js = run(["run", "--format", "json", scn("cartan_model")])
    results = json.loads(js)["results"]
    blocks = text.split("run ")[1:]
    assert len(blocks) == len(results)
    for block, rec in zip(blocks, results):
        lines = block.splitlines()[1:]
        keys = [ln.strip().split(":")[0] for ln in lines if ln.startswith("  ") and not ln.startswith("    ")]
        assert keys == ["status", *rec["fields"]]


def test_kronecker_subcommands():
    code, out = run(["kronecker", "orbit", "--slope", "1/2", "--steps", "3"])
    assert code == 0 and "angles: 0, pi, 0, pi" in out
    code, out = run(["kronecker", "closure", "--slope", "irr:alpha"])
    assert "pair groupoid, closure rank 2" in out
    code, out = run(["kronecker", "average", scn("kronecker"), "w", "s"])
    assert code == 0 and "averaged: dtheta + dz" in out


def test_exit_code_for_operation_error():
    code, out = run(["run", scn("transverse_metric")])
    assert code == 1 and "status: error" in out


def test_exit_code_for_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text("coords x\nform a = dq\n")
    assert run(["run", str(bad)])[0] == 2
    assert "bad.scn:2:" in capsys.readouterr().err
    assert run(["run", str(tmp_path / "missing.scn")])[0] == 2
    assert run(["suite", "no-such-suite"])[0] == 2
    assert run([])[0] == 2


def test_suite_flag_and_subcommand():
    code, out = run(["--suite", "groupoid"])
    assert code == 0 and out.strip().endswith("1/1 scenarios passed")
    code, out = run(["suite", "frame_reduction"])
    assert code == 0 and "PASS frame_reduction" in out


def test_module_selection_runs_a_subset():
    picked = select_scenarios("cartan")
    assert set(picked) == {"cartan_model", "transgression_t3"}
    assert len(select_scenarios("all")) == len(bundled_scenarios())
    assert select_scenarios("paper-all") == select_scenarios("all")
    with pytest.raises(KeyError):
        select_scenarios("nope")


def test_suite_detects_mismatch(tmp_path, monkeypatch):
    import foliate.runner as runner

    for name in ("frame_reduction",):
        src = bundled_scenarios()[name]
        (tmp_path / src.name).write_text(src.read_text())
        (tmp_path / f"{name}.out").write_text("run reduce w Fr\n  status: wrong\n")
    monkeypatch.setattr(runner, "scenario_dir", lambda: tmp_path)
    entries = runner.run_suite("all")
    assert [e.passed for e in entries] == [False]
    assert "FAIL frame_reduction" in render_suite(entries)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "foliate", "suite", "groupoid"], capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS kronecker" in proc.stdout
