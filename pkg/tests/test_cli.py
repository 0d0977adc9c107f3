import csv
import io
import json

from rankscope.cli import EXIT_BUDGET, EXIT_USAGE, main


def test_ft_stdout(capsys):
    assert main(["ft", "--m", "2", "--n", "2", "--k", "2", "--q", "2", "--brute"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["closed_form"] == out["brute_force"] == -2 and out["sign"] == -1


def test_ft_bad_rank(capsys):
    assert main(["ft", "--m", "2", "--n", "2", "--k", "3", "--q", "2"]) == EXIT_USAGE


def test_table_csv(capsys):
    assert main(["table", "--group", "SL(3,2)", "--format", "csv"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 7


def test_ranks_partition(capsys):
    assert main(["ranks", "--group", "GL(3,2)", "--partition", "[1,1,1]"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and lines[1].split(",")[1] == "8"
    assert main(["ranks", "--group", "GL(3,2)", "--partition", "[2,2]"]) == EXIT_USAGE


def test_ranks_json_to_dir(tmp_path):
    assert main(["ranks", "--group", "GL(2,3)", "--format", "json", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "ranks.json").read_text())
    assert data["group"] == "GL(2,3)" and len(data["profiles"]) == 8


def test_count(capsys):
    assert main(["count", "--group", "SL(3,2)", "--ell", "4", "--oracle"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert all(r["oracle"] == r["frobenius"] for r in data["rows"])
    assert main(["count", "--group", "SL(3,2)", "--g-class", "1"]) != 0
    assert main(["count", "--group", "SL(3,2)", "--g-class", "99"]) == EXIT_USAGE


def test_figures(tmp_path):
    assert main(["figures", "--group", "GL(3,2)", "--ell", "4", "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.csv"))) == 7
    assert main(["figures", "--group", "GL(3,2)"]) == EXIT_USAGE


def test_verify(capsys, tmp_path):
    assert main(["verify", "--group", "GL(3,2)", "--ell", "4", "--out", str(tmp_path)]) == 0
    assert "ok" in capsys.readouterr().out
    assert json.loads((tmp_path / "verify.json").read_text())["group"] == "GL(3,2)"


def test_usage_and_budget_codes():
    assert main([]) == EXIT_USAGE
    assert main(["table", "--group", "GL(3,6)"]) == EXIT_USAGE
    assert main(["table", "--group", "PGL(2,3)"]) == EXIT_USAGE
    assert main(["table", "--group", "GL(9,9)"]) == EXIT_BUDGET
