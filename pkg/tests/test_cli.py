import json
import subprocess
import sys

import pytest

from nestedsc.abmatrix import build_ab
from nestedsc.cli import PipelineConfig, main, read_family, read_spec


def run(*args):
    return main([str(a) for a in args])


def test_no_arguments_is_a_usage_error(capsys):
    assert run() == 2
    assert "usage" in capsys.readouterr().err


def test_module_entry_point_exit_code():
    out = subprocess.run([sys.executable, "-m", "nestedsc"], capture_output=True, text=True)
    assert out.returncode == 2


def test_unknown_flag_is_a_usage_error():
    assert run("count", "--bogus") == 2


def test_construct_weight4_block_code(tmp_path):
    f = tmp_path / "h1.json"
    assert run("construct", "--gamma", 5, "--p", 5, "--rows", "0,1,2,3", "--out", f) == 0
    spec = read_spec(f)
    assert spec.grid().cells.tolist() == build_ab(5, 5).cells[:4].tolist()


def test_count_both_agrees(tmp_path, capsys):
    f = tmp_path / "s.json"
    run("construct", "--gamma", 3, "--p", 5, "--m", 1, "--spreading", "1,0,0,0,1;1,1,1,0,0;0,0,1,1,0", "--L", 2, "--out", f)
    capsys.readouterr()
    assert run("count", "--spec", f, "--method", "both", "--check") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["agree"] is True
    assert out["alc"]["total_cycles"] == out["oracle"]["total_cycles"]


def test_check_requires_both(tmp_path):
    f = tmp_path / "s.json"
    run("construct", "--gamma", 3, "--p", 5, "--out", f)
    assert run("count", "--spec", f, "--check") == 2


def test_missing_input_is_a_usage_error(tmp_path):
    assert run("count", "--spec", tmp_path / "nope.json") == 2
    assert run("lift", "--manifest", tmp_path / "nope.json", "--J", 5, "--out", tmp_path / "x") == 2


def test_invalid_parameters_are_usage_errors(tmp_path):
    assert run("construct", "--gamma", 3, "--p", 6, "--out", tmp_path / "x.json") == 2
    cfg = tmp_path / "c.json"
    cfg.write_text("{}")
    assert run("pipeline", "--config", cfg) == 2
    cfg.write_text(json.dumps({"gamma": 3, "p": 5, "m": 2, "L": 3}))
    assert run("pipeline", "--config", cfg) == 2


def test_optimize_and_lift_are_replayable(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert run("optimize", "--gamma", 5, "--p", 5, "--m", 1, "--subcodes", "0,1,2,3;0,1,2,4", "--seed", 2, "--lmax", 2000, "--out", d) == 0
        assert run("lift", "--manifest", d / "manifest.json", "--J", 3, "--budget", 2000, "--out", d / "lifted") == 0
        files = sorted(p for p in d.rglob("*") if p.is_file())
        outs.append({p.relative_to(d): p.read_bytes() for p in files})
    assert outs[0] == outs[1]
    assert {str(k) for k in outs[0]} >= {"global.json", "sub1.json", "sub2.json", "manifest.json", "rho_trace.csv", "lifted/manifest.json"}
    fam = read_family(tmp_path / "run0" / "lifted" / "manifest.json")
    assert [s.base.row_groups for s in fam] == [(0, 1, 2), (0, 1, 2, 3), (0, 1, 2, 4)]
    assert all(s.lift is not None and s.lift.J == 3 for s in fam)


def test_tampered_family_is_rejected(tmp_path):
    run("optimize", "--p", 5, "--m", 1, "--lmax", 500, "--out", tmp_path)
    f = tmp_path / "global.json"
    f.write_text(f.read_text().replace('"L": 2', '"L": 3'))
    assert run("lift", "--manifest", tmp_path / "manifest.json", "--J", 3, "--out", tmp_path / "l") == 2


def test_simulate_writes_csv(tmp_path, capsys):
    f = tmp_path / "bc.json"
    run("construct", "--gamma", 3, "--p", 7, "--out", f)
    run("lift", "--spec", f, "--J", 3, "--out", tmp_path / "bcl.json")
    csv_path = tmp_path / "r.csv"
    assert run("simulate", "--spec", tmp_path / "bcl.json", "--snr", "1,3", "--min-errors", 5, "--max-frames", 200, "--out", csv_path) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "snr_db,frames,bit_errors,frame_errors,ber,fer,ci95"
    assert len(lines) == 3


def test_simulate_sc_with_window(tmp_path):
    f = tmp_path / "sc.json"
    run("construct", "--gamma", 3, "--p", 5, "--m", 1, "--L", 6, "--seed", 1, "--out", f)
    assert run("simulate", "--spec", f, "--snr", "4", "--max-frames", 20, "--window", 75, "--out", tmp_path / "r.csv") == 0
    assert run("simulate", "--spec", f, "--snr", "4", "--max-frames", 20, "--window", 25) == 2


def test_pipeline_config_validation():
    with pytest.raises(ValueError, match="prime"):
        PipelineConfig(3, 9, 2, 10)
    with pytest.raises(ValueError, match="exceed"):
        PipelineConfig(3, 5, 2, 3)
    with pytest.raises(ValueError, match="row groups"):
        PipelineConfig(4, 5, 1, 4, subcodes=((0, 1, 2, 4),))
    cfg = PipelineConfig.from_json(json.dumps({"gamma": 4, "p": 5, "m": 1, "L": 4, "subcodes": [[0, 1, 2, 3]]}))
    assert cfg.subcodes == ((0, 1, 2, 3),)


def test_pipeline_runs_end_to_end(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"gamma": 4, "p": 5, "m": 1, "L": 4, "subcodes": [[0, 1, 2, 3]], "J": 3,
                               "lmax": 1000, "lift_budget": 2000, "snr": [4.0], "max_frames": 5, "out": str(tmp_path / "o")}))
    assert run("pipeline", "--config", cfg) == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert len(rep["codes"]) == 2 and len(rep["lift_residuals"]) == 2
    assert (tmp_path / "o" / "sub1_ber.csv").is_file()
