import json

import pytest

from narrnet.cli import main
from narrnet.experiment import read_manifest
from narrnet.graph import read_edges, total_edge_weight

HEADER = "season,episode,scene,char_a,char_b\n"


def read_graph(path):
    with open(path, encoding="utf-8") as fh:
        return read_edges(fh)


@pytest.fixture
def log_file(tmp_path):
    rows = ["1,1,1,Ross,Rachel", "1,1,1,Rachel,Ross", "1,1,2,Ross,Monica", "1,1,2,Joey,Gunther",
            "1,2,1,Ross,Rachel", "1,2,1,Monica,Joey", "1,2,2,Gunther,Joey"]
    p = tmp_path / "log.csv"
    p.write_text(HEADER + "\n".join(rows) + "\n")
    return p


@pytest.fixture(scope="module")
def model_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("model") / "s6.model"
    assert main(["synth-model", "--out", str(p)]) == 0
    return p


def test_fit_prints_rates(log_file, tmp_path, capsys):
    out = tmp_path / "m.model"
    assert main(["fit", str(log_file), "--core", "Ross,Rachel,Monica", "--out", str(out)]) == 0
    line = capsys.readouterr().out
    # core pairs: Ross-Rachel 3, Ross-Monica 1, Rachel-Monica 0
    assert "lambda_cc=1.33333" in line
    assert "core: Monica,Rachel,Ross" in out.read_text()


def test_fit_usage_and_data_errors(log_file, tmp_path, capsys):
    assert main(["fit", str(log_file)]) == 1
    assert main(["fit", str(tmp_path / "missing.csv"), "--core", "A,B"]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text(HEADER + "1,1,1,Ross,Ross\n")
    assert main(["fit", str(bad), "--core", "Ross,Rachel"]) == 2
    assert "line 2" in capsys.readouterr().err


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--bogus"])
    assert info.value.code == 1


def tree_files(root):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file() and p.name != "manifest.json"}


def test_simulate_is_reproducible(model_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for root in (a, b):
        assert main(["simulate", str(model_file), "--n-sims", "2", "--seed", "7", "--out", str(root)]) == 0
    fa = tree_files(a)
    assert sorted(fa) == [f"rep_{k}/{n}" for k in (0, 1) for n in ("cooc.edges", "episode.txt", "manual.edges",
                                                                     "nlp.edges")]
    assert fa == tree_files(b)
    c = tmp_path / "c"
    main(["simulate", str(model_file), "--n-sims", "2", "--seed", "8", "--out", str(c)])
    assert tree_files(c) != fa


def test_simulate_shape_flags(model_file, tmp_path):
    root = tmp_path / "t"
    assert main(["simulate", str(model_file), "--n-sims", "3", "--scenes", "15", "--ints-per-scene", "4",
                 "--rewire-prob", "0", "--out", str(root)]) == 0
    for k in range(3):
        manual = (root / f"rep_{k}" / "manual.edges").read_bytes()
        assert total_edge_weight(read_graph(root / f"rep_{k}" / "manual.edges")) == 60
        assert (root / f"rep_{k}" / "nlp.edges").read_bytes() == manual
    m = read_manifest(root)
    assert m["config"]["n_replicates"] == 3 and m["config"]["rewire_prob"] == 0.0


def test_config_file_and_flag_precedence(model_file, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_sims": 4, "seed": 9, "scenes": 2}))
    root = tmp_path / "t"
    assert main(["simulate", str(model_file), "--config", str(cfg), "--n-sims", "1", "--out", str(root)]) == 0
    m = read_manifest(root)["config"]
    assert (m["n_replicates"], m["seed"], m["n_scenes"]) == (1, 9, 2)
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["simulate", str(model_file), "--config", str(bad), "--out", str(root)]) == 1


def test_simulate_rejects_bad_values(model_file, tmp_path):
    assert main(["simulate", str(model_file), "--rewire-prob", "1.5", "--out", str(tmp_path / "t")]) == 1
    assert main(["simulate", str(tmp_path / "nope.model"), "--out", str(tmp_path / "t")]) == 2


def test_compare_writes_outputs(model_file, tmp_path, capsys):
    root = tmp_path / "t"
    main(["simulate", str(model_file), "--n-sims", "5", "--seed", "1", "--out", str(root)])
    capsys.readouterr()
    assert main(["compare", str(root)]) == 0
    out = capsys.readouterr().out
    assert "manual_vs_cooc" in out and "density pearson" in out
    head = (root / "correlations.csv").read_text().splitlines()
    assert head[0] == "replicate,comparison,metric,family,coefficient,defined"
    summary = json.loads((root / "summary.json").read_text())
    assert summary["replicates"] == 5
    assert set(summary["correlations"]) == {"manual_vs_cooc", "manual_vs_nlp"}
    assert (root / "global.csv").exists()


def test_compare_output_elsewhere_and_reproducible(model_file, tmp_path):
    root = tmp_path / "t"
    main(["simulate", str(model_file), "--n-sims", "3", "--seed", "2", "--out", str(root)])
    for out in ("x", "y"):
        assert main(["compare", str(root), "--out", str(tmp_path / out)]) == 0
    for name in ("correlations.csv", "summary.json", "global.csv"):
        assert (tmp_path / "x" / name).read_bytes() == (tmp_path / "y" / name).read_bytes()


def test_compare_rejects_bad_trees(model_file, tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["compare", str(empty)]) == 2
    root = tmp_path / "t"
    main(["simulate", str(model_file), "--n-sims", "3", "--out", str(root)])
    for p in (root / "rep_1").iterdir():
        p.unlink()
    (root / "rep_1").rmdir()
    capsys.readouterr()
    assert main(["compare", str(root)]) == 2
    assert "rep_1" in capsys.readouterr().err


def test_parse_script(tmp_path):
    scripts = tmp_path / "scripts"
    scripts.mkdir()
    (scripts / "0101.txt").write_text("[Scene: Central Perk]\nRoss: hi\nRachel: hey\n")
    (scripts / "0102.txt").write_text("[Scene: a]\nMr. Geller: hello\nRoss: me again\nJoey: hi\n")
    (scripts / "0103.txt").write_text("no markers at all\n")
    aliases = tmp_path / "aliases.tsv"
    aliases.write_text("Mr. Geller\tRoss\n")
    out = tmp_path / "edges"
    assert main(["parse-script", str(scripts), "--aliases", str(aliases), "--out", str(out)]) == 0
    assert dict(read_graph(out / "0101.edges").weights) == {("RACHEL", "ROSS"): 1}
    assert dict(read_graph(out / "0102.edges").weights) == {("JOEY", "ROSS"): 1}
    assert not (out / "0103.edges").exists()
    assert "0103.txt" in (out / "parse_warnings.log").read_text()


def test_parse_script_custom_marker_from_config(tmp_path):
    scripts = tmp_path / "scripts"
    scripts.mkdir()
    (scripts / "e1.txt").write_text("INT. CAFE\nA: x\nB: y\nINT. STREET\nA: z\nB: w\n")
    cfg = tmp_path / "c.json"
    cfg.write_text('{"scene_marker": "INT."}')
    assert main(["parse-script", str(scripts), "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert read_graph(tmp_path / "o" / "e1.edges").weight("A", "B") == 2


def write_seasons(directory, weights):
    directory.mkdir()
    for season, w in weights.items():
        lines = [f"A\tB\t{w}", f"A\tC\t{w}", f"B\tC\t{w}", "A\tx\t1"]
        (directory / f"s{season:02d}.edges").write_text("\n".join(lines) + "\n")


def test_trend(tmp_path, capsys):
    write_seasons(tmp_path / "down", {1: 10, 2: 8, 3: 6})
    write_seasons(tmp_path / "flat", {1: 4, 2: 4, 3: 4})
    out = tmp_path / "trend.csv"
    assert main(["trend", "--dataset", f"manual={tmp_path / 'down'}", "--dataset", f"cooc={tmp_path / 'flat'}",
                 "--core", "A,B,C", "--out", str(out)]) == 0
    rows = [r.split(",") for r in out.read_text().splitlines()]
    assert rows[0] == ["season", "avg_core_interactions", "dataset"]
    slope = {r[2]: float(r[1]) for r in rows if r[0] == "slope"}
    assert slope["manual"] == pytest.approx(-2.0) and slope["cooc"] == 0.0
    assert "warning" not in capsys.readouterr().err


def test_trend_warns_on_coverage_mismatch(tmp_path, capsys):
    write_seasons(tmp_path / "a", {1: 3, 2: 3})
    write_seasons(tmp_path / "b", {1: 3, 2: 3, 3: 3})
    assert main(["trend", "--dataset", f"a={tmp_path / 'a'}", "--dataset", f"b={tmp_path / 'b'}",
                 "--core", "A,B,C"]) == 0
    assert "different seasons" in capsys.readouterr().err
    assert main(["trend", "--dataset", f"a={tmp_path / 'a'}", "--core", "A"]) == 1


def test_graphs_summarize_rank(log_file, tmp_path, capsys):
    out = tmp_path / "g"
    assert main(["graphs", str(log_file), "--granularity", "episode", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["s01e01.edges", "s01e02.edges"]
    assert read_graph(out / "s01e01.edges").weight("Ross", "Rachel") == 2
    capsys.readouterr()
    assert main(["summarize", str(log_file)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "1,2,5,7,4,3.50,2.00,1.75"
    seasons = tmp_path / "s"
    main(["graphs", str(log_file), "--out", str(seasons)])
    capsys.readouterr()
    # the season is the path Rachel-Ross-Monica-Joey-Gunther
    assert main(["rank", "--graphs", str(seasons), "--character", "Monica"]) == 0
    assert capsys.readouterr().out.splitlines() == ["season,betweenness_rank", "1,1"]
    main(["rank", "--graphs", str(seasons), "--character", "Ross"])
    assert capsys.readouterr().out.splitlines()[1] == "1,2"
    assert main(["rank", "--graphs", str(seasons), "--character", "Nobody"]) == 2
