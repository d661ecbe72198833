"""End-to-end run: books -> lexicon scores -> totals, arcs, plots, summary."""

from __future__ import annotations

import json
import logging
from collections import OrderedDict
from dataclasses import asdict, dataclass
from pathlib import Path

from .arcs import build_arc, format_arc_csv, format_arc_json, format_totals_csv, score_document, smooth_arc
from .config import RunConfig
from .embeddings import scan_expansions, save_model, train_sgns
from .errors import ConfigError, DecodeError, EmoarcError, EmptyVocabError, LexiconError, ParseError
from .ingest import Metadata, RawBook, ingest_book, load_patterns
from .io import atomic_write_text
from .lexicon import load_lexicon
from .plot import render_arc_svg
from .textproc import LemmaSequence, corpus_stats, format_frequency_tsv, read_conllu, sequence_from_text

log = logging.getLogger(__name__)

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG, EXIT_EMPTY = 0, 1, 2, 3
BOOK_SUFFIXES = (".txt", ".conllu")


@dataclass
class Book:
    doc_id: str
    metadata: Metadata
    seq: LemmaSequence
    source: str


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=1) + "\n"


def load_sequence(path, patterns=None) -> tuple[LemmaSequence, Metadata]:
    """Lemma sequence and metadata for one ``.conllu``, ``.txt`` or ingested ``.json`` file."""
    path = Path(path)
    if path.suffix == ".conllu":
        seq = read_conllu(path, path.stem)
        meta = Metadata()
        txt = path.with_suffix(".txt")
        if txt.exists():
            try:
                doc, _ = ingest_book(RawBook(str(txt), txt.read_bytes()), patterns)
                meta = doc.metadata
            except EmoarcError:
                pass
        return seq, meta
    if path.suffix == ".json":
        from .ingest import Document

        doc = Document.from_json(json.loads(path.read_text("utf-8")))
        return sequence_from_text(doc.body, doc.id), doc.metadata
    doc, _ = ingest_book(RawBook(str(path), path.read_bytes()), patterns)
    return sequence_from_text(doc.body, doc.id), doc.metadata


def collect_book_paths(paths) -> tuple["OrderedDict[str, Path]", list[dict]]:
    """One source file per document id; ``.conllu`` wins over ``.txt``."""
    found: dict[str, dict[str, Path]] = {}
    problems = []
    for p in paths:
        p = Path(p)
        files = sorted(f for f in p.iterdir() if f.is_file()) if p.is_dir() else [p]
        for f in files:
            if f.suffix not in BOOK_SUFFIXES:
                continue
            slot = found.setdefault(f.stem, {})
            if f.suffix in slot and slot[f.suffix] != f:
                problems.append({"file": str(f), "reason": f"duplicate document id {f.stem!r}"})
                continue
            slot[f.suffix] = f
    chosen = OrderedDict()
    for stem in sorted(found):
        slot = found[stem]
        chosen[stem] = slot.get(".conllu", slot.get(".txt"))
    return chosen, problems


def run_pipeline(cfg: RunConfig) -> int:
    """Run every stage for ``cfg``; returns the process exit code."""
    try:
        cfg.validate()
        lex = load_lexicon(cfg.lexicon, emotions=cfg.emotions, dedupe=cfg.dedupe)
        patterns = load_patterns(cfg.chapter_patterns) if cfg.chapter_patterns else None
    except (ConfigError, LexiconError, ParseError, OSError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    plot_emotions = cfg.plot_emotions()
    missing = [e for e in plot_emotions if e not in lex.emotions]
    if missing:
        log.error("invalid configuration: svg_emotions not in lexicon emotion set: %s", missing)
        return EXIT_CONFIG

    meta = cfg.metadata()
    meta["emotions"] = list(lex.emotions)
    sources, skipped = collect_book_paths(cfg.corpus)
    books: list[Book] = []
    for doc_id, path in sources.items():
        try:
            seq, md = load_sequence(path, patterns)
        except DecodeError:
            skipped.append({"file": str(path), "reason": "encoding: not valid UTF-8"})
            continue
        except (EmoarcError, OSError) as exc:
            skipped.append({"file": str(path), "reason": f"{type(exc).__name__}: {exc}"})
            continue
        books.append(Book(doc_id, md, seq, str(path)))

    if not books:
        log.error("empty corpus: no usable books under %s", cfg.corpus)
        return EXIT_EMPTY

    out = Path(cfg.output)
    rows, results = [], []
    for book in books:
        try:
            score = score_document(book.seq, lex, cfg.denominator)
            arc = build_arc(book.seq, lex, n_chunks=cfg.n_chunks, window_tokens=cfg.window_tokens)
            arc = smooth_arc(arc, cfg.smoothing_window)
        except EmoarcError as exc:
            skipped.append({"file": book.source, "reason": f"{type(exc).__name__}: {exc}"})
            continue
        title = book.metadata.title or book.doc_id
        book_meta = {**meta, "document": {"id": book.doc_id, "source": book.source, **asdict(book.metadata)}}
        atomic_write_text(out / "arcs" / f"{book.doc_id}.csv", format_arc_csv(arc))
        atomic_write_text(out / "arcs" / f"{book.doc_id}.json", format_arc_json(arc, book_meta))
        if cfg.svg:
            svg = render_arc_svg(arc, plot_emotions, title=title, metadata=book_meta)
            atomic_write_text(out / "plots" / f"{book.doc_id}.svg", svg)
        rows.append((book.doc_id, title, score))
        results.append(
            {
                "id": book.doc_id,
                "title": title,
                "metadata": asdict(book.metadata),
                "word_count": score.word_count,
                "token_count": len(book.seq.tokens),
                "denominator": score.denominator,
                "raw": score.raw.as_dict(),
                "normalized": score.normalized.as_dict(),
                "chunks": len(arc),
            }
        )

    if not rows:
        log.error("empty corpus: every book failed scoring")
        _write_summary(out, meta, results, skipped, None, None)
        return EXIT_EMPTY

    atomic_write_text(out / "totals.csv", format_totals_csv(rows, lex.emotions))
    seqs = [b.seq for b in books]
    cstats = corpus_stats(seqs, cfg.top_k)
    atomic_write_text(out / "frequency.tsv", format_frequency_tsv(cstats.top_frequent))

    expansion = None
    if cfg.expand:
        expansion = _expand(cfg, seqs, lex, [w for w, _ in cstats.top_frequent], out, meta)
    _write_summary(out, meta, results, skipped, cstats, expansion)
    return EXIT_PARTIAL if skipped else EXIT_OK


def _expand(cfg, seqs, lex, candidates, out: Path, meta: dict) -> dict:
    try:
        model = train_sgns(seqs, cfg.embedding_config())
    except EmptyVocabError as exc:
        log.warning("skipping lexicon expansion: %s", exc)
        return {"status": "skipped", "reason": str(exc)}
    save_model(model, out / "embedding" / "model.txt")
    scan = scan_expansions(model, lex, candidates, cfg.expansion_threshold)
    for name, items in (("proposals.jsonl", scan.proposals), ("near_misses.jsonl", scan.near_misses)):
        text = "".join(json.dumps(p.to_json(), ensure_ascii=False, sort_keys=True) + "\n" for p in items)
        atomic_write_text(out / "embedding" / name, text)
    return {
        "status": "done",
        "model": model.metadata(),
        "threshold": scan.threshold,
        "proposals": len(scan.proposals),
        "near_misses": len(scan.near_misses),
        "skipped_candidates": len(scan.skipped),
    }


def _write_summary(out: Path, meta, results, skipped, cstats, expansion) -> None:
    summary = {
        "metadata": meta,
        "books": results,
        "skipped": skipped,
        "corpus": None if cstats is None else cstats.to_json() | {"top_frequent": cstats.top_frequent[:50]},
        "expansion": expansion,
    }
    atomic_write_text(out / "summary.json", _dump(summary))
    atomic_write_text(out / "run_config.json", _dump(meta))
