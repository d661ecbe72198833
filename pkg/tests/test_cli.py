import csv
import json
import shutil
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from emoarc.arcs import build_arc, score_document
from emoarc.cli import main
from emoarc.config import RunConfig, format_config, load_config
from emoarc.errors import ConfigError
from emoarc.lexicon import load_lexicon
from emoarc.pipeline import load_sequence, run_pipeline

DATA = Path(__file__).parent / "data"


def read_tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_run_desk(desk):
    assert main(["run", "-c", str(desk / "run.ini")]) == 0
    out = desk / "out"
    rows = list(csv.reader((out / "totals.csv").open(encoding="utf-8")))
    assert rows[0] == ["doc_id", "title", "word_count", "anger", "anticipation", "disgust", "fear", "joy", "sadness", "trust"]
    assert len(rows) == 6
    assert {r[1] for r in rows[1:]} >= {"Rautatie", "Kauppa-Lopo", "Arkielämä"}
    for stem in ("aho_rautatie", "canth_kauppa_lopo"):
        assert (out / "arcs" / f"{stem}.csv").exists()
        meta = json.loads((out / "arcs" / f"{stem}.json").read_text())["metadata"]
        assert meta["config"]["n_chunks"] == 100 and meta["config"]["smoothing_window"] == 5
        assert meta["version"]
        ET.parse(out / "plots" / f"{stem}.svg")


def test_run_totals_match_direct_scoring(desk):
    assert main(["run", "-c", str(desk / "run.ini")]) == 0
    lex = load_lexicon(desk / "lexicon.tsv")
    summary = json.loads((desk / "out" / "summary.json").read_text())
    for book in summary["books"]:
        seq, _ = load_sequence(desk / "corpus" / f"{book['id']}.txt")
        score = score_document(seq, lex)
        assert book["normalized"] == score.normalized.as_dict()
        assert book["word_count"] == score.word_count
        arc = json.loads((desk / "out" / "arcs" / f"{book['id']}.json").read_text())
        direct = build_arc(seq, lex, n_chunks=100)
        assert [c["per10k"] for c in arc["chunks"]] == [list(v.values) for v in direct.raw]


def test_rerun_byte_identical(desk):
    assert main(["run", "-c", str(desk / "run.ini"), "--expand", "true", "--embedding-epochs", "1"]) == 0
    first = read_tree(desk / "out")
    shutil.rmtree(desk / "out")
    assert main(["run", "-c", str(desk / "run.ini"), "--expand", "true", "--embedding-epochs", "1"]) == 0
    assert read_tree(desk / "out") == first
    assert "embedding/proposals.jsonl" in first


def test_missing_lexicon_exit_2(desk):
    (desk / "lexicon.tsv").unlink()
    assert main(["run", "-c", str(desk / "run.ini")]) == 2
    assert not (desk / "out").exists()


def test_bad_lexicon_exit_2(desk):
    (desk / "lexicon.tsv").write_text("ilo\tjoy\t1.5\n")
    assert main(["run", "-c", str(desk / "run.ini")]) == 2
    assert not (desk / "out").exists()


def test_empty_corpus_exit_3(desk):
    shutil.rmtree(desk / "corpus")
    (desk / "corpus").mkdir()
    assert main(["run", "-c", str(desk / "run.ini")]) == 3


def test_partial_failure_exit_1(desk):
    (desk / "corpus" / "broken.txt").write_bytes(b"\xff\xfe\x00 bad")
    (desk / "corpus" / "tiny.txt").write_text("Vain kolme sanaa.")
    assert main(["run", "-c", str(desk / "run.ini")]) == 1
    summary = json.loads((desk / "out" / "summary.json").read_text())
    reasons = {Path(s["file"]).name: s["reason"] for s in summary["skipped"]}
    assert "encoding" in reasons["broken.txt"]
    assert "ChunkingError" in reasons["tiny.txt"]
    assert len(summary["books"]) == 5


def test_flag_overrides_config(desk):
    assert main(["run", "-c", str(desk / "run.ini"), "--n-chunks", "10", "--smoothing_window", "3", "--seed", "7"]) == 0
    meta = json.loads((desk / "out" / "run_config.json").read_text())
    assert meta["config"]["n_chunks"] == 10
    assert meta["config"]["smoothing_window"] == 3
    assert meta["config"]["seed"] == 7
    lines = (desk / "out" / "arcs" / "aho_rautatie.csv").read_text().splitlines()
    assert len(lines) == 11


def test_window_tokens_override(desk):
    assert main(["run", "-c", str(desk / "run.ini"), "--window-tokens", "500"]) == 0
    meta = json.loads((desk / "out" / "run_config.json").read_text())
    assert meta["config"]["n_chunks"] is None and meta["config"]["window_tokens"] == 500


def test_even_smoothing_is_config_error(desk):
    assert main(["run", "-c", str(desk / "run.ini"), "--smoothing-window", "4"]) == 2


def test_unknown_svg_emotion_is_config_error(desk):
    assert main(["run", "-c", str(desk / "run.ini"), "--svg-emotions", "hope"]) == 2


def test_conllu_preferred_over_txt(desk):
    shutil.copy(DATA / "two_sentences.conllu", desk / "corpus" / "aho_rautatie.conllu")
    assert main(["run", "-c", str(desk / "run.ini"), "--n-chunks", "5"]) == 0
    summary = json.loads((desk / "out" / "summary.json").read_text())
    book = next(b for b in summary["books"] if b["id"] == "aho_rautatie")
    assert book["word_count"] == 7
    assert book["title"] == "Rautatie"


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(corpus=[str(tmp_path)], lexicon=str(tmp_path / "l.tsv"), output=str(tmp_path / "o"), svg_emotions=["joy"], seed=3)
    path = tmp_path / "c.ini"
    path.write_text(format_config(cfg))
    assert load_config(path) == cfg


def test_config_unknown_key(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[run]\nbogus = 1\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_run_pipeline_api(desk):
    cfg = load_config(desk / "run.ini", {"svg": False})
    assert run_pipeline(cfg) == 0
    assert not (desk / "out" / "plots").exists()


# --- subcommands ------------------------------------------------------------


def test_ingest_command(tmp_path):
    src = tmp_path / "raw"
    shutil.copytree(DATA / "desk_corpus", src)
    (src / "bad.txt").write_bytes(b"\xe4\xe4\xff")
    assert main(["ingest", "--in", str(src), "--out", str(tmp_path / "clean")]) == 0
    report = json.loads((tmp_path / "clean" / "ingest_report.json").read_text())
    assert len(report["retained"]) == 5 and report["discarded"][0]["file"] == "bad.txt"
    doc = json.loads((tmp_path / "clean" / "aho_rautatie.json").read_text())
    assert doc["metadata"]["author"] == "Juhani Aho" and len(doc["chapters"]) == 8


def test_stats_command(tmp_path, capsys):
    freq = tmp_path / "f.tsv"
    assert main(["stats", str(DATA / "two_sentences.conllu"), "--top-k", "3", "--freq-out", str(freq)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["word_count"] == 7 and out["token_count"] == 9
    assert len(freq.read_text().splitlines()) == 3


def test_lex_commands(tmp_path, capsys):
    lex = str(DATA / "toy_lexicon.tsv")
    assert main(["lex", "validate", lex]) == 0
    assert main(["lex", "stats", lex, "--json"]) == 0
    stats = json.loads(capsys.readouterr().out.split("\n", 1)[1])
    assert stats["co_annotation"]["sadness"]["sadness"] == 1.0
    out, log = tmp_path / "e.tsv", tmp_path / "log.jsonl"
    rc = main(["lex", "edit", lex, "--copy", "rakkaus", "rakastaa", "--remove", "ilo", "--add", "kylmä", "fear", "0.4",
               "--out", str(out), "--log", str(log)])
    assert rc == 0
    edited = load_lexicon(out)
    assert edited.entries_for("rakastaa") == edited.entries_for("rakkaus")
    assert "ilo" not in edited and edited.intensity("kylmä", "fear") == 0.4
    ops = [json.loads(l)["op"] for l in log.read_text().splitlines()]
    assert ops == ["copy_entries", "remove_lemma", "add"]


def test_lex_validate_duplicate(tmp_path):
    f = tmp_path / "d.tsv"
    f.write_text("ilo\tjoy\t0.5\nilo\tjoy\t0.6\n")
    assert main(["lex", "validate", str(f)]) == 2
    assert main(["lex", "validate", str(f), "--dedupe", "keep-max"]) == 0


def test_embed_cycle(tmp_path):
    corpus = [str(p) for p in sorted((DATA / "desk_corpus").glob("*.txt"))]
    model = tmp_path / "m.txt"
    assert main(["embed", "train", *corpus, "--out", str(model), "--dimension", "16", "--epochs", "1", "--min-count", "3"]) == 0
    props = tmp_path / "p.jsonl"
    assert main(["embed", "propose", "--model", str(model), "--lexicon", str(DATA / "toy_lexicon.tsv"),
                 "--corpus", *corpus, "--top-k", "50", "--threshold", "0.1", "--out", str(props)]) == 0
    proposals = [json.loads(l) for l in props.read_text().splitlines()]
    assert proposals
    accepted = tmp_path / "a.txt"
    accepted.write_text(proposals[0]["candidate"] + "\n")
    out = tmp_path / "lex.tsv"
    assert main(["embed", "apply", "--lexicon", str(DATA / "toy_lexicon.tsv"), "--proposals", str(props),
                 "--accepted", str(accepted), "--out", str(out)]) == 0
    lex = load_lexicon(out)
    assert lex.entries_for(proposals[0]["candidate"]) == lex.entries_for(proposals[0]["source"])


def test_arc_compare_plot(tmp_path, capsys):
    doc = str(DATA / "desk_corpus" / "aho_rautatie.txt")
    lex = str(DATA / "toy_lexicon.tsv")
    assert main(["arc", doc, "--lexicon", lex, "--n-chunks", "20", "--smooth", "3", "--out-dir", str(tmp_path),
                 "--svg-emotions", "joy"]) == 0
    assert len((tmp_path / "aho_rautatie.csv").read_text().splitlines()) == 21
    other = str(DATA / "desk_corpus" / "sillanpaa_hurskas_kurjuus.txt")
    assert main(["compare", doc, other, "--lexicon", lex, "--emotion", "fear", "--n-permutations", "99"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert set(res) == {"emotion", "observed_diff", "p_value", "n_permutations", "seed"}
    svg = tmp_path / "p.svg"
    assert main(["plot", str(tmp_path / "aho_rautatie.json"), "--emotions", "joy,fear", "--out", str(svg)]) == 0
    assert len(ET.parse(svg).getroot().findall(".//{http://www.w3.org/2000/svg}polyline")) == 2
    assert main(["plot", str(tmp_path / "aho_rautatie.json"), "--emotions", "hope"]) == 2
