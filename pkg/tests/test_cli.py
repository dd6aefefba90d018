import json

import pytest

from emopattern import cli


def main(*argv):
    return cli.main([str(a) for a in argv])


def test_run_exit_codes(toy_dir, tmp_path, capsys):
    cfg = toy_dir / "toy.cfg"
    assert main("run", "--config", cfg) == 0
    assert main("run", "--config", cfg) == 0
    out = capsys.readouterr().out.splitlines()
    assert all(line.endswith("cached") for line in out[-8:])
    assert main("run", "--config", cfg, "--stages", "nope") == 2
    assert main("run", "--config", cfg, "--set", "phi_eig=bad") == 2
    assert main("run", "--config", cfg, "--set", f"workdir={tmp_path / 'x'}", "--stages", "weigh") == 3
    err = capsys.readouterr().err
    assert "run extract first" in err


def test_step_by_step_commands(toy_dir, tmp_path, capsys):
    d, w = toy_dir, tmp_path
    assert main("ingest", "--input", d / "labeled.jsonl", "--hashtags", d / "hashtags.tsv",
                "--emotions", "anger,fear,joy,sadness", "--out", w / "lab.jsonl") == 0
    assert json.loads(capsys.readouterr().out)["documents"] == 200
    assert main("ingest", "--input", d / "objective.jsonl", "--out", w / "obj.jsonl") == 0
    assert main("split", "--corpus", w / "lab.jsonl", "--train", w / "train.jsonl", "--test", w / "test.jsonl") == 0
    assert main("build-graph", "--in", w / "train.jsonl", "--out", w / "s.tsv") == 0
    assert main("build-graph", "--in", w / "obj.jsonl", "--out", w / "o.tsv") == 0
    assert main("aggregate", "--subjective", w / "s.tsv", "--objective", w / "o.tsv", "--out", w / "e.tsv") == 0
    assert main("categorize", "--graph", w / "e.tsv", "--phi-cl", "0", "--out", w / "tok.tsv") == 0
    assert main("cluster", "--embeddings", d / "embeddings.txt", "--corpus", w / "train.jsonl",
                "--ref", d / "synsets.tsv", "--out", w / "cl.tsv") == 0
    info = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert 0 <= info["homogeneity"] <= 1
    assert main("extract", "--corpus", w / "train.jsonl", "--tokens", w / "tok.tsv", "--clusters", w / "cl.tsv",
                "--min-freq", "3", "--out", w / "lex.tsv") == 0
    assert main("weigh", "--lexicon", w / "lex.tsv", "--corpus", w / "train.jsonl", "--out", w / "m.tsv") == 0
    assert main("classify", "--model", w / "m.tsv", "--in", w / "test.jsonl", "--out", w / "pred.tsv") == 0
    assert len((w / "pred.tsv").read_text().splitlines()) == 20
    assert main("evaluate", "--model", w / "m.tsv", "--test", w / "test.jsonl", "--report", w / "r.jsonl") == 0
    assert "macro_f1" in json.loads(capsys.readouterr().out)
    assert main("coverage", "--lexicon", w / "lex.tsv", "--corpus", w / "test.jsonl") == 0
    assert 0 <= float(capsys.readouterr().out) <= 1


def test_validation_errors_exit_2(tmp_path):
    assert main("ingest", "--input", tmp_path / "nope.jsonl", "--out", tmp_path / "x.jsonl") == 2
    (tmp_path / "bad.tsv").write_text("nonsense\n", encoding="utf-8")
    assert main("classify", "--model", tmp_path / "bad.tsv", "--in", tmp_path / "x", "--out", tmp_path / "y") == 2


def test_toy_command(tmp_path, capsys):
    assert main("toy", "--out", tmp_path / "t") == 0
    assert (tmp_path / "t" / "toy.cfg").exists() and (tmp_path / "t" / "labeled.jsonl").exists()


def test_backend_flag(toy_dir, monkeypatch):
    monkeypatch.setenv("EMOPATTERN_BACKEND", "numba")  # restored after the test
    assert main("--backend", "numpy", "run", "--config", toy_dir / "toy.cfg", "--stages",
                "ingest,graphs,categorize") == 0


def test_usage_error_exits_nonzero():
    with pytest.raises(SystemExit) as err:
        main("frobnicate")
    assert err.value.code == 2
