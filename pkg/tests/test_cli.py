from pathlib import Path

from trigger_lab.cli import main


def test_triggers_search(tmp_path, capsys):
    out = tmp_path / "four.trg"
    assert main(["triggers", "search", "--vars", "4", "--out", str(out)]) == 0
    assert capsys.readouterr().out.split() == ["31", "24", "2"]
    assert out.read_text().count("\ntrigger ") == 2
    assert out.with_suffix(".connected").read_text().count("n=4") == 24


def test_triggers_search_rejects_sizes(capsys):
    assert main(["triggers", "search", "--vars", "7"]) == 2
    assert "between 3 and 5" in capsys.readouterr().err


def _write(path: Path, text: str) -> str:
    path.write_text(text)
    return str(path)


def test_score_file(tmp_path, capsys):
    truth = _write(tmp_path / "t.txt", "nodes: A B C\nA -> B\nC -> B\n")
    learned = _write(tmp_path / "l.txt", "A -- B\nB <> C\n")
    assert main(["eval", "score-file", learned, truth]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "4"
    assert "A B 2" in lines[1]


def test_score_file_fci_autodetect(tmp_path, capsys):
    truth = _write(tmp_path / "t.txt", "nodes: A B\nA -> B\n")
    learned = _write(tmp_path / "l.txt", "A o> B\n")
    assert main(["eval", "score-file", learned, truth]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "1"


def test_score_file_errors(tmp_path, capsys):
    truth = _write(tmp_path / "t.txt", "nodes: A B\nA -> B\n")
    bad = _write(tmp_path / "l.txt", "A => B\n")
    assert main(["eval", "score-file", bad, truth]) == 1
    assert "line 1" in capsys.readouterr().err
    unknown = _write(tmp_path / "u.txt", "A -> Q\n")
    assert main(["eval", "score-file", unknown, truth]) == 1


def test_pipeline_count_only(capsys):
    assert main(["pipeline", "--vars", "4", "--families", "trigger,dag", "--count-only", "--full"]) == 0
    assert capsys.readouterr().out.splitlines() == ["4 trigger 36", "4 dag 432"]


def test_eval_run(tmp_path, capsys):
    from trigger_lab.bayesnet import Dataset, make_rng

    vals = make_rng(0).integers(0, 2, size=(300, 3))
    vals[:, 1] = vals[:, 0]
    path = tmp_path / "d.csv"
    Dataset(vals, 2).to_csv(path)
    assert main(["eval", "run", "--data", str(path), "--alpha", "0.01"]) == 0
    assert capsys.readouterr().out.strip() == "A -- B"
    assert main(["eval", "run", "--data", str(path), "--learner", "trigger_pc"]) == 2
