import json
import subprocess
import sys
from pathlib import Path

import pytest

from genformal.cli import Report, main, parse_point
from genformal.errors import InputError
from genformal.spinor import Chart

SCENES = Path(__file__).resolve().parent.parent / "scenes"
CP3 = str(SCENES / "cp3.json")
BLOWUP = str(SCENES / "blowup.json")
BROKEN = str(SCENES / "broken_moment.json")


def test_verify_core_passes(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", CP3, "--suite", "core", "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert "checks passed" in text
    data = json.loads(out.read_text())
    assert data["passed"] and data["scene"] == "cp3"
    names = [c["name"] for c in data["checks"]]
    assert names == sorted(names)
    assert all(c["anchor"] for c in data["checks"])


def test_report_round_trip(tmp_path):
    out = tmp_path / "r.json"
    main(["verify", BROKEN, "--json", str(out)])
    data = json.loads(out.read_text())
    rep = Report.from_json(data)
    assert rep.to_json() == data
    assert json.loads(rep.dumps()) == data


def test_broken_moment_fails_with_witness(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", BROKEN, "--json", str(out)]) == 1
    data = json.loads(out.read_text())
    member = next(c for c in data["checks"] if c["name"] == "moment.membership")
    assert member["status"] == "fail" and "pairing" in member["witness"]


def test_malformed_json_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json", encoding="utf-8")
    assert main(["verify", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_unknown_suite_exit_2(capsys):
    assert main(["verify", CP3, "--suite", "nope"]) == 2


def test_type_examples(capsys):
    assert main(["type", CP3, "--at", '["1","0","1","0"]']) == 0
    assert "upstairs 4, quotient 3" in capsys.readouterr().out
    assert main(["type", CP3, "--at", '{"z0": "1", "z1": "1"}']) == 0
    assert "upstairs 2, quotient 1" in capsys.readouterr().out


def test_type_off_level_set_exit_2(capsys):
    assert main(["type", CP3, "--at", '["1","1","1","0"]']) == 2
    assert "level" in capsys.readouterr().err


def test_type_all_points(capsys, tmp_path):
    out = tmp_path / "t.json"
    assert main(["type", CP3, "--json", str(out)]) == 0
    rows = json.loads(out.read_text())["extra"]["types"]
    assert {tuple(r["quotient"]) for r in rows} == {(0, 3), (0, 1)}


def test_hodge_cp3(capsys, tmp_path):
    out = tmp_path / "h.json"
    assert main(["hodge", CP3, "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert "q=  0 |   1   0   1   0   1   0   1" in text
    table = json.loads(out.read_text())["extra"]["hodge"]["table"]
    nonzero = {k: v for k, v in table.items() if v}
    assert nonzero == {"-3,0": 1, "-1,0": 1, "1,0": 1, "3,0": 1}


def test_hodge_blowup(capsys):
    assert main(["hodge", BLOWUP]) == 0
    assert "q=  0 |   1   0   2   0   2   0   1" in capsys.readouterr().out


def test_hodge_hypothesis_failure(tmp_path, capsys):
    data = json.loads(Path(CP3).read_text())
    data["aux_weights"] = ["1", "1", "1", "1"]
    p = tmp_path / "s.json"
    p.write_text(json.dumps(data), encoding="utf-8")
    assert main(["hodge", str(p)]) == 1
    assert "hypothesis not verified" in capsys.readouterr().out


def test_parse_point():
    ch = Chart.complex_(2)
    assert set(parse_point('["1", "i"]', ch)) == {"z0", "z1"}
    with pytest.raises(InputError):
        parse_point('["1"]', ch)
    with pytest.raises(InputError):
        parse_point('{"w": 1}', ch)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "genformal", "type", CP3, "--at", '["1","0","1","0"]'],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "upstairs 4, quotient 3" in proc.stdout


def test_seed_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", CP3, "--suite", "equivariant", "--seed", "7", "--max-degree", "2", "--json", str(a)])
    main(["verify", CP3, "--suite", "equivariant", "--seed", "7", "--max-degree", "2", "--json", str(b)])
    assert a.read_text() == b.read_text()
    assert json.loads(a.read_text())["passed"]
