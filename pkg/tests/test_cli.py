import json
import subprocess
import sys

import pytest

from surgelens.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_lens(capsys):
    code, out, _ = run(capsys, "classify", "--family", "milnor3", "--slopes", "1/1,1/1,7/1")
    assert code == 0
    js = json.loads(out)
    assert js["outcome"] == "lens" and js["lens"] == [7, 2]


def test_classify_whitehead(capsys):
    code, out, _ = run(capsys, "classify", "--family", "whitehead", "--twists", "2", "--slopes", "3/1,5/1")
    assert code == 0 and json.loads(out)["outcome"] == "not_lens"


def test_classify_zero_slope_and_negative(capsys):
    code, out, _ = run(capsys, "classify", "--family", "milnor3", "--slopes=0/1,1/1,1/1")
    assert code == 0 and json.loads(out)["outcome"] == "not_lens"
    code, out, _ = run(capsys, "classify", "--family", "milnor3", "--slopes=-1/1,-1/1,-5/1")
    assert json.loads(out)["lens"] == [5, 1]


def test_classify_exit_codes(capsys):
    assert run(capsys, "classify", "--family", "milnor3", "--slopes", "2/1,4/1,1/1")[0] == 2
    code, _out, err = run(capsys, "classify", "--family", "milnor3", "--slopes", "2/x,1/1,1/1")
    assert code == 1 and "cannot parse" in err
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--family", "nope", "--slopes", "1/1"])
    assert exc.value.code == 1


def test_obstruct_spec_file(tmp_path, capsys):
    path = tmp_path / "m4.json"
    path.write_text(json.dumps({"link": {"family": "milnor", "components": 4}, "slopes": ["1/1", "1/1", "2/1", "3/1"]}))
    code, out, _ = run(capsys, "obstruct", "--spec", str(path), "-k", "4")
    assert code == 0
    assert json.loads(out)["components"][0]["excluded_by"] == "norm"


def test_obstruct_candidate_with_certificate(capsys):
    code, out, _ = run(capsys, "obstruct", "--family", "milnor3", "--slopes", "1/1,1/1,7/1", "-k", "3", "--target", "7,4")
    comp = json.loads(out)["components"][0]
    assert comp["verdict"] == "candidate"
    assert comp["torsion"]["certificates"][0]["d"] == 7
    assert comp["targeted"]["aggregate"]


def test_obstruct_brunnian(capsys):
    code, out, _ = run(
        capsys, "obstruct", "--family", "brunnian_type", "--components", "3", "--f", "t1+t1^-1-1", "--slopes", "5/1,1/1,1/1", "-k", "1"
    )
    assert json.loads(out)["components"][0]["excluded_by"] == "forms"


def test_obstruct_invalid_spec(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(capsys, "obstruct", "--spec", str(path))[0] == 1
    path.write_text(json.dumps({"link": {"family": "milnor", "components": 3}, "slopes": ["1/1"]}))
    assert run(capsys, "obstruct", "--spec", str(path))[0] == 1


def test_norm(capsys):
    code, out, _ = run(capsys, "norm", "-d", "9", "--coeffs", "1,-1")
    assert json.loads(out)["norm"] == "3"
    code, out, _ = run(capsys, "norm", "-d", "5", "--coeffs", "[1]", "--den", "[2]")
    assert json.loads(out)["norm"] == "1/16"


def test_alex(capsys):
    code, out, _ = run(capsys, "alex", "--family", "milnor", "--components", "4")
    assert json.loads(out)["alexander"] == "0"
    code, out, _ = run(capsys, "alex", "--family", "milnor3", "--hatk")
    assert json.loads(out)["hatK"] == "t^2 - t + 1"


def test_scan_empty_grid(tmp_path, capsys):
    out_path = tmp_path / "r.json"
    code, _out, _ = run(capsys, "scan", "--max-abs-p", "0", "--max-abs-q", "2", "--output", str(out_path))
    assert code == 0
    assert json.loads(out_path.read_text())["records"] == []


def test_scan_config_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("family=milnor\ncomponents=4\nmax_abs_p=3\nmax_abs_q=1\nformat=csv\n")
    out_path = tmp_path / "r.csv"
    code, _out, err = run(capsys, "scan", "--config", str(cfg), "--max-abs-p", "2", "--output", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("p1,q1,p2,q2,p3,q3,p4,q4,verdict")
    assert "records" in err


def test_scan_bad_config_value(capsys):
    assert run(capsys, "scan", "--max-abs-p", "-1")[0] == 1


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "2,3,4")
    assert code == 0
    assert out.count("[PASS]") == 3


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "surgelens", "classify", "--family", "milnor3", "--slopes", "1/1,2/1,9/2"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["lens"] == [18, 5]
