import json

from fractalizer.cli import EXIT_EMPTY, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from fractalizer.pipeline import read_manifest

from conftest import synthetic_corpus, tree_hash


def run_cli(*argv):
    try:
        return main(list(argv))
    except SystemExit as exit_:  # argparse usage failures
        return exit_.code


def test_usage_error_is_exit_1():
    assert run_cli("batch", "--input", "x.jsonl") == EXIT_USAGE  # missing --out
    assert run_cli("no-such-command") == EXIT_USAGE


def test_missing_file_is_exit_2(tmp_path):
    out = tmp_path / "out"
    assert run_cli("batch", "--input", str(tmp_path / "nope.jsonl"), "--out", str(out)) == EXIT_IO


def test_malformed_file_is_exit_2(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n")
    assert run_cli("batch", "--input", str(bad), "--out", str(tmp_path / "out")) == EXIT_IO


def test_blank_file_is_exit_3(tmp_path):
    # a present file with zero valid records is an empty result
    blank = tmp_path / "blank.jsonl"
    blank.write_text("\n\n")
    assert run_cli("batch", "--input", str(blank), "--out", str(tmp_path / "out")) == EXIT_EMPTY


def test_ingest_reports_and_exit_codes(tmp_path, capsys):
    mixed = tmp_path / "m.jsonl"
    mixed.write_text('{"id":"a","calls":["L1","L2"]}\ngarbage\n')
    assert run_cli("ingest", "--input", str(mixed)) == EXIT_OK
    out = capsys.readouterr().out
    assert "1 valid, 1 malformed" in out
    assert "line 2" in out
    assert "kept=1" in out

    blank = tmp_path / "b.jsonl"
    blank.write_text("\n")
    assert run_cli("ingest", "--input", str(blank)) == EXIT_EMPTY


def test_batch_end_to_end(tmp_path, capsys):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 4, seed=21)
    out = tmp_path / "out"
    code = run_cli("batch", "--input", str(corpus), "--out", str(out), "--size", "8")
    assert code == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["counts"]["kept"] == 4
    assert (out / "manifest.jsonl").is_file()


def test_render_prints_formulas(tmp_path, capsys):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 2, seed=22)
    out = tmp_path / "img"
    code = run_cli(
        "render", "--input", str(corpus), "--id", "s0001", "--size", "8", "--out", str(out)
    )
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    formula_lines = [l for l in lines if l.startswith("s0001\t")]
    assert len(formula_lines) == 4
    assert any("*z^" in l for l in formula_lines)
    assert list(out.glob("s0001_16x16.png"))


def test_render_unknown_id_is_exit_3(tmp_path):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 1, seed=23)
    assert run_cli("render", "--input", str(corpus), "--id", "missing") == EXIT_EMPTY


def test_graph_dot_stdout(tmp_path, capsys):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 1, seed=24)
    assert run_cli("graph-dot", "--input", str(corpus)) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith('digraph "s0000"')
    assert "->" in out


def test_export_formulas_matches_batch_output(tmp_path, capsys):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 3, seed=25)
    out = tmp_path / "out"
    run_cli("batch", "--input", str(corpus), "--out", str(out), "--size", "8")
    capsys.readouterr()
    assert run_cli("export-formulas", "--input", str(out / "manifest.jsonl")) == EXIT_OK
    assert capsys.readouterr().out == (out / "formulas.tsv").read_text()


def test_dedupe_cli(tmp_path, capsys):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 3, seed=26)
    out = tmp_path / "out"
    run_cli("batch", "--input", str(corpus), "--out", str(out), "--size", "8")
    capsys.readouterr()
    report_path = tmp_path / "dupes.json"
    code = run_cli("dedupe", "--input", str(out / "manifest.jsonl"), "--out", str(report_path))
    assert code == EXIT_OK
    assert "groups" in json.loads(report_path.read_text())


def test_sweep_empty_sizes_is_usage_error(tmp_path):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 1, seed=27)
    code = run_cli(
        "sweep", "--input", str(corpus), "--out", str(tmp_path / "s"), "--sizes", ""
    )
    assert code == EXIT_USAGE


def test_config_file_and_cli_precedence(tmp_path, capsys):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 1, seed=28)
    config = tmp_path / "settings.cfg"
    config.write_text("size=8\niters=16\n# comment\nmin_len=2\n")

    out_file = tmp_path / "from_file"
    run_cli("batch", "--input", str(corpus), "--out", str(out_file), "--config", str(config))
    (entry,) = read_manifest(out_file / "manifest.jsonl")
    assert entry["quadrants"]["Q2_all"]["effective_max_iter"] == 16
    assert entry["image"].endswith("_16x16.png")

    out_cli = tmp_path / "from_cli"
    run_cli(
        "batch", "--input", str(corpus), "--out", str(out_cli),
        "--config", str(config), "--size", "4",
    )
    (entry,) = read_manifest(out_cli / "manifest.jsonl")
    assert entry["image"].endswith("_8x8.png")  # CLI --size 4 beats file size=8
    assert entry["quadrants"]["Q2_all"]["effective_max_iter"] == 16  # file still applies


def test_unknown_config_key_is_usage_error(tmp_path):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 1, seed=29)
    config = tmp_path / "settings.cfg"
    config.write_text("colour=blue\n")
    code = run_cli(
        "batch", "--input", str(corpus), "--out", str(tmp_path / "o"), "--config", str(config)
    )
    assert code == EXIT_USAGE


def test_iter_mode_set2_scales_budget_per_quadrant(tmp_path):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 2, seed=31)
    out = tmp_path / "out"
    run_cli(
        "batch", "--input", str(corpus), "--out", str(out),
        "--size", "8", "--iter-mode", "set2",
    )
    for entry in read_manifest(out / "manifest.jsonl"):
        for record in entry["quadrants"].values():
            if record["degenerate"]:
                continue
            top_exponent = int(record["formula"].rsplit("^", 1)[1])
            expected = max(16, min(256, 8 * top_exponent))
            assert record["effective_max_iter"] == expected


def test_seed_flag_accepted_and_inert(tmp_path):
    corpus = synthetic_corpus(tmp_path / "c.jsonl", 2, seed=30)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_cli("batch", "--input", str(corpus), "--out", str(out_a), "--size", "8")
    run_cli("batch", "--input", str(corpus), "--out", str(out_b), "--size", "8", "--seed", "99")
    assert tree_hash(out_a) == tree_hash(out_b)
