import csv
import io
import json

import jsonschema
import pytest

from geokow import cli
from geokow.report import load_schema


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_time(text):
    rep = json.loads(text)
    rep.pop("wall_time")
    return json.dumps(rep, sort_keys=True)


@pytest.fixture(scope="module")
def schema():
    return load_schema()


@pytest.mark.parametrize("argv", [
    ("pencil", "--spec=-2,0,3,-2,2,0", "--samples", "5"),
    ("sep", "--samples", "5"),
    ("dyn", "--samples", "3", "--T", "0.3"),
    ("kotter", "--samples", "5"),
    ("group", "--samples", "20", "--triples", "10", "--assoc"),
    ("poncelet", "--samples", "5", "--pencils", "2"),
], ids=lambda a: a[0])
def test_commands_pass_and_validate(argv, capsys, schema):
    code, out, _ = run(capsys, *argv, "--seed", "1")
    assert code == 0, out
    rep = json.loads(out)
    jsonschema.validate(rep, schema)
    assert rep["command"] == argv[0] and rep["summary"]["ok"]


def test_verify_all(capsys, schema):
    code, out, _ = run(capsys, "verify-all", "--seed", "42", "--samples", "10")
    rep = json.loads(out)
    jsonschema.validate(rep, schema)
    assert code == 0, [c["name"] for c in rep["checks"] if c["verdict"] == "fail"]
    assert rep["notes"]


def test_deterministic_apart_from_wall_time(capsys):
    argv = ("group", "--seed", "3", "--samples", "20", "--triples", "10")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert strip_time(a) == strip_time(b)


def test_unbalanced_choice_exits_one(capsys):
    code, out, _ = run(capsys, "dyn", "--ab", "B", "--samples", "3", "--T", "0.5", "--seed", "2")
    assert code == 1
    assert any(c["verdict"] == "fail" for c in json.loads(out)["checks"])


@pytest.mark.parametrize("argv", [
    ("pencil",),
    ("pencil", "--spec", "1,2,3"),
    ("kotter", "--spec", "1,0,3,-2,2,0"),
    ("dyn", "--T", "-1"),
    ("dyn", "--ab", "Z"),
    ("sep", "--spec=-2,0,3,-2,2,0", "--kowalevski", "1,1,1,0"),
    ("nonsense",),
])
def test_usage_errors_exit_two(argv, capsys):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_kowalevski_flag(capsys):
    code, out, _ = run(capsys, "pencil", "--kowalevski", "1,1,1,0", "--samples", "3")
    rep = json.loads(out)
    assert code == 0
    assert rep["data"]["spec"] == ["-2/1", "0/1", "3/1", "-2/1", "2/1", "0/1"]
    assert rep["data"]["P"] == "-2*x^4 + 12*x^2 + 8*x + 2"


def test_csv_trajectory(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "dyn", "--samples", "1", "--T", "0.2", "--format", "csv", "--out", str(path))
    assert code == 0
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert rows[0][:3] == ["t", "e1_re", "e1_im"] and rows[0][-1] == "drift_4"
    assert len(rows) > 2


def test_csv_checks(capsys):
    code, out, _ = run(capsys, "group", "--samples", "10", "--triples", "5", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][0] == "name" and len(rows) > 3
