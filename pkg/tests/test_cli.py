import json

import pytest
from click.testing import CliRunner

from neargroup.cli import main, parse_form


@pytest.fixture
def runner():
    return CliRunner()


def test_parse_form():
    assert parse_form("Z7:1").group.order == 7
    assert parse_form("Z3xZ3:1,1").group.factors == (3, 3)
    assert parse_form("Z7").values == parse_form("Z7:1").values
    with pytest.raises(Exception):
        parse_form("Z3xZ3:1")


def test_classify_and_verify(runner, tmp_path):
    out = tmp_path / "z3.json"
    res = runner.invoke(main, ["classify", "--group", "Z3", "--starts", "200", "--out", str(out)])
    assert res.exit_code == 0, res.output
    data = json.loads(out.read_text())
    assert len(data["solutions"]) == 2
    res = runner.invoke(main, ["verify", str(out)])
    assert res.exit_code == 0, res.output


def test_verify_flags_tampering(runner, tmp_path):
    out = tmp_path / "z3.json"
    runner.invoke(main, ["classify", "--group", "Z3", "--starts", "200", "--out", str(out)])
    data = json.loads(out.read_text())
    data["solutions"][0]["b"][1]["im"] += 0.01
    out.write_text(json.dumps(data))
    assert runner.invoke(main, ["verify", str(out)]).exit_code == 2


def test_mdata_qq_and_verify(runner, tmp_path):
    out = tmp_path / "md.json"
    res = runner.invoke(main, ["mdata", "--qq", "Z3:1", "Z7:1", "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert runner.invoke(main, ["verify", str(out)]).exit_code == 0
    data = json.loads(out.read_text())
    data["S"][1][2]["re"] += 0.05
    out.write_text(json.dumps(data))
    assert runner.invoke(main, ["verify", str(out)]).exit_code == 2


def test_mdata_first_class(runner):
    res = runner.invoke(main, ["mdata", "--first-class", "4"])
    assert res.exit_code == 0, res.output


def test_mdata_compare(runner, tmp_path):
    out = tmp_path / "z3.json"
    runner.invoke(main, ["classify", "--group", "Z3", "--starts", "200", "--out", str(out)])
    res = runner.invoke(main, ["mdata", "--catalog", str(out), "--index", "1", "--compare-qq", "Z7:1"])
    assert res.exit_code == 0 and "MATCH" in res.output
    res = runner.invoke(main, ["mdata", "--catalog", str(out), "--index", "0", "--compare-qq", "Z7:1"])
    assert res.exit_code == 2


def test_tube(runner):
    res = runner.invoke(main, ["tube", "--first-class", "7", "--s", "-1"])
    assert res.exit_code == 0 and "52" in res.output
    res = runner.invoke(main, ["tube", "--second-class", "3"])
    assert res.exit_code == 0 and "18" in res.output


def test_compare_and_report(runner, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    runner.invoke(main, ["mdata", "--qq", "Z3:1", "Z7:1", "--out", str(a)])
    runner.invoke(main, ["mdata", "--qq", "Z3:1", "Z7:-1", "--out", str(b)])
    assert runner.invoke(main, ["compare", str(a), str(a)]).exit_code == 0
    assert runner.invoke(main, ["compare", str(a), str(b)]).exit_code != 0
    res = runner.invoke(main, ["report", str(a)])
    assert res.exit_code == 0, res.output


def test_invariants_command(runner, tmp_path):
    a = tmp_path / "a.json"
    runner.invoke(main, ["mdata", "--qq", "Z3:1", "Z7:1", "--out", str(a)])
    res = runner.invoke(main, ["invariants", str(a)])
    assert res.exit_code == 0, res.output


def test_empty_catalog(runner, tmp_path):
    p = tmp_path / "empty.json"
    p.write_text(json.dumps({"solutions": []}))
    res = runner.invoke(main, ["verify", str(p)])
    assert res.exit_code == 0 and "0 solutions" in res.output
    res = runner.invoke(main, ["report", str(p)])
    assert res.exit_code == 0 and "empty catalog" in res.output
