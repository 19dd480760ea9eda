import json

import pytest

from walkbench.cli import main


def test_generate_graph_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["generate-graph", "--preset", "paper-100", "--seed", "3", "--out", str(out)]) == 0
    assert "100 nodes" in capsys.readouterr().out
    assert len(json.loads(out.read_text())["nodes"]) == 100
    assert (tmp_path / "g.schema.txt").read_text().startswith("# | Entity Type")
    assert len(json.loads((tmp_path / "g.questions.json").read_text())) == 12
    assert json.loads((tmp_path / "g.blueprint.json").read_text())


def test_generate_graph_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["generate-graph", "--seed", "5", "--out", str(a)])
    main(["generate-graph", "--seed", "5", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.questions.json").read_bytes() == (tmp_path / "b.questions.json").read_bytes()


def test_oracle_check(capsys):
    assert main(["oracle-check", "--graphs", "5", "--nodes", "15"]) == 0
    assert "0 mismatches" in capsys.readouterr().out


def test_run_bench_scripted_and_report(tmp_path, capsys):
    out = tmp_path / "bench"
    assert main(["run-bench", "--runs", "1", "--out", str(out), "--workers", "2"]) == 0
    line = capsys.readouterr().out.splitlines()[1]
    assert line.startswith("scripted,tools,12,100.00,1.00,1.00,1.00,0,")
    assert len(list((out / "transcripts").glob("*.jsonl"))) == 12
    assert (out / "report-table1.json").exists()

    assert main(["report", "--in", str(out / "transcripts"), "--layout", "table2", "--out", str(tmp_path / "t2")]) == 0
    rows = (tmp_path / "t2.csv").read_text().splitlines()
    assert rows[-1] == ",Total,12,12"
    assert len(rows) == 14


def test_scripted_without_tools_is_rejected(tmp_path):
    assert main(["run-bench", "--runs", "1", "--no-tools", "--out", str(tmp_path)]) == 2


def test_generate_and_run_maze(tmp_path, capsys):
    assert main(["generate-maze", "--seed", "2", "--out", str(tmp_path / "m.json")]) == 0
    text = capsys.readouterr().out
    assert "start" in text and "#" in text
    assert json.loads((tmp_path / "m.json").read_text())["width"] == 10

    assert main(["run-maze", "--mazes", "3", "--out", str(tmp_path / "maze")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split(",")[8] == "Avg TC"
    assert lines[1].startswith("scripted,tools,3,100.00")


def test_report_on_empty_directory(tmp_path):
    assert main(["report", "--in", str(tmp_path)]) == 1


def test_config_file_defaults_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "w.toml"
    cfg.write_text('[generate-maze]\nsize = 6\nmin-path = 8\nseed = 4\n')
    main(["--config", str(cfg), "generate-maze", "--out", str(tmp_path / "a.json")])
    a = json.loads((tmp_path / "a.json").read_text())
    assert (a["width"], a["seed"], len(a["carved_path"]) >= 8) == (6, 4, True)
    main(["--config", str(cfg), "generate-maze", "--size", "7", "--out", str(tmp_path / "b.json")])
    assert json.loads((tmp_path / "b.json").read_text())["width"] == 7


def test_config_unknown_section(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[nope]\nx = 1\n")
    with pytest.raises(SystemExit):
        main(["--config", str(cfg), "report", "--in", str(tmp_path)])
