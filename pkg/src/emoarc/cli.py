"""Command-line entry point: ``emoarc <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .arcs import build_arc, format_arc_csv, format_arc_json, smooth_arc, Arc
from .config import FIELD_TYPES, RunConfig, _base_type, load_config, parse_value
from .embeddings import (
    EmbeddingConfig,
    apply_proposals,
    load_vectors,
    read_accepted,
    read_proposals,
    save_model,
    scan_expansions,
    train_sgns,
)
from .errors import ConfigError, EmoarcError
from .ingest import load_corpus, load_patterns, write_corpus
from .io import atomic_write_text
from .lexicon import (
    Add,
    CopyEntries,
    RemoveLemma,
    format_lexicon,
    lexicon_stats,
    load_lexicon,
    read_edit_log,
    replay,
    write_edit_log,
)
from .pipeline import EXIT_CONFIG, EXIT_EMPTY, EXIT_OK, load_sequence, run_pipeline
from .plot import render_arc_svg
from .stats import permutation_test
from .textproc import corpus_stats, format_frequency_tsv

log = logging.getLogger("emoarc")


def _csv_list(s: str) -> list[str]:
    return [p.strip() for p in s.split(",") if p.strip()]


def _lexicon_args(p, required=True):
    p.add_argument("--lexicon", "-l", required=required, help="word<TAB>emotion<TAB>intensity file")
    p.add_argument("--emotions", type=_csv_list, default=None, help="active emotion set (comma-separated)")
    p.add_argument("--dedupe", choices=["error", "keep-max"], default="error")


def _load_lex(args):
    return load_lexicon(args.lexicon, emotions=args.emotions, dedupe=args.dedupe)


def _embedding_args(p):
    d = EmbeddingConfig()
    for name in ("dimension", "window", "negatives", "epochs", "min_count", "batch_size"):
        p.add_argument(f"--{name.replace('_', '-')}", type=int, default=getattr(d, name))
    p.add_argument("--subsample-threshold", type=float, default=d.subsample_threshold)
    p.add_argument("--learning-rate", type=float, default=d.learning_rate)


def _write_or_print(text: str, out):
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


# --- commands ---------------------------------------------------------------


def cmd_ingest(args) -> int:
    patterns = load_patterns(args.patterns) if args.patterns else None
    docs, report = load_corpus(args.input, patterns, jobs=args.jobs)
    write_corpus(docs, report, args.output)
    print(f"retained {len(report.retained)}, discarded {len(report.discarded)}", file=sys.stderr)
    return EXIT_OK if docs else EXIT_EMPTY


def cmd_stats(args) -> int:
    seqs = [load_sequence(p)[0] for p in args.files]
    st = corpus_stats(seqs, args.top_k, args.upos)
    if args.freq_out:
        atomic_write_text(args.freq_out, format_frequency_tsv(st.top_frequent))
    summary = st.to_json()
    summary["per_document"] = {
        s.doc_id: {"word_count": (d := corpus_stats([s], 0, args.upos)).word_count, "type_count": d.type_count, "ttr": d.ttr}
        for s in seqs
    }
    if args.freq_out:
        summary.pop("top_frequent")
    print(json.dumps(summary, ensure_ascii=False, indent=1))
    return EXIT_OK


def cmd_lex_validate(args) -> int:
    lex = _load_lex(args)
    print(f"{lex.name}: {len(lex.lemmas)} lemmas, {len(lex)} entries, emotions {', '.join(lex.emotions)}")
    return EXIT_OK


class _OrderedEdit(argparse.Action):
    """Collect --add/--remove/--copy in command-line order."""

    def __call__(self, parser, namespace, values, option_string=None):
        ops = getattr(namespace, "ops", None) or []
        ops.append((self.dest, values))
        namespace.ops = ops


def cmd_lex_edit(args) -> int:
    lex = _load_lex(args)
    commands = []
    if args.commands:
        with open(args.commands, encoding="utf-8") as fh:
            commands.extend(read_edit_log(fh))
    for kind, values in getattr(args, "ops", None) or []:
        if kind == "add":
            lemma, emotion, intensity = values
            try:
                commands.append(Add(lemma, emotion, float(intensity)))
            except ValueError:
                raise ConfigError(f"--add intensity {intensity!r} is not a number") from None
        elif kind == "remove":
            commands.append(RemoveLemma(values))
        else:
            commands.append(CopyEntries(values[0], values[1]))
    edited = replay(lex, commands)
    atomic_write_text(args.output, format_lexicon(edited))
    if args.log:
        with open(args.log, "a", encoding="utf-8") as fh:
            write_edit_log(edited.edit_log, fh)
    print(f"applied {len(commands)} edits: {len(lex)} -> {len(edited)} entries", file=sys.stderr)
    return EXIT_OK


def cmd_lex_stats(args) -> int:
    st = lexicon_stats(_load_lex(args))
    if args.json:
        print(json.dumps(st.to_json(), indent=1))
        return EXIT_OK
    print(f"lemmas: {st.lemma_count}")
    width = max(len(e) for e in st.emotions)
    print(" " * width + "  count  " + " ".join(f"{e[:6]:>6}" for e in st.emotions))
    for a in st.emotions:
        row = " ".join(f"{st.co_annotation[a][b]:6.2f}" for b in st.emotions)
        print(f"{a:<{width}}  {st.counts[a]:5d}  {row}")
    return EXIT_OK


def _emb_config(args) -> EmbeddingConfig:
    return EmbeddingConfig(
        dimension=args.dimension,
        window=args.window,
        negatives=args.negatives,
        epochs=args.epochs,
        min_count=args.min_count,
        subsample_threshold=args.subsample_threshold,
        learning_rate=args.learning_rate,
        seed=args.seed,
        batch_size=args.batch_size,
    )


def cmd_embed_train(args) -> int:
    seqs = [load_sequence(p)[0] for p in args.corpus]
    model = train_sgns(seqs, _emb_config(args))
    save_model(model, args.output)
    print(f"trained {len(model)} vectors of dimension {model.dimension}", file=sys.stderr)
    return EXIT_OK


def cmd_embed_propose(args) -> int:
    model = load_vectors(args.model)
    lex = _load_lex(args)
    if args.candidates:
        with open(args.candidates, encoding="utf-8") as fh:
            candidates = read_accepted(fh)
    elif args.corpus:
        seqs = [load_sequence(p)[0] for p in args.corpus]
        candidates = [w for w, _ in corpus_stats(seqs, args.top_k).top_frequent]
    else:
        raise ConfigError("give --candidates or --corpus")
    scan = scan_expansions(model, lex, candidates, args.threshold)
    text = "".join(json.dumps(p.to_json(), ensure_ascii=False, sort_keys=True) + "\n" for p in scan.proposals)
    atomic_write_text(args.output, text)
    if args.near_misses:
        text = "".join(json.dumps(p.to_json(), ensure_ascii=False, sort_keys=True) + "\n" for p in scan.near_misses)
        atomic_write_text(args.near_misses, text)
    print(
        f"{len(scan.proposals)} proposals, {len(scan.near_misses)} below threshold {args.threshold}, "
        f"{len(scan.skipped)} candidates not in model",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_embed_apply(args) -> int:
    lex = _load_lex(args)
    with open(args.proposals, encoding="utf-8") as fh:
        proposals = read_proposals(fh)
    with open(args.accepted, encoding="utf-8") as fh:
        accepted = read_accepted(fh)
    try:
        edited = apply_proposals(lex, proposals, accepted)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    atomic_write_text(args.output, format_lexicon(edited))
    if args.log:
        with open(args.log, "a", encoding="utf-8") as fh:
            write_edit_log(edited.edit_log, fh)
    print(f"accepted {len(set(accepted))} of {len(proposals)} proposals", file=sys.stderr)
    return EXIT_OK


def cmd_arc(args) -> int:
    lex = _load_lex(args)
    seq, md = load_sequence(args.document)
    arc = build_arc(seq, lex, n_chunks=args.n_chunks, window_tokens=args.window_tokens)
    arc = smooth_arc(arc, args.smooth)
    meta = {
        "tool": "emoarc",
        "version": __version__,
        "lexicon": args.lexicon,
        "document": {"id": seq.doc_id, "source": args.document, "title": md.title, "author": md.author, "year": md.year},
    }
    out = Path(args.out_dir)
    atomic_write_text(out / f"{seq.doc_id}.csv", format_arc_csv(arc))
    atomic_write_text(out / f"{seq.doc_id}.json", format_arc_json(arc, meta))
    if args.svg_emotions:
        svg = render_arc_svg(arc, args.svg_emotions, title=md.title or seq.doc_id, metadata=meta)
        atomic_write_text(out / f"{seq.doc_id}.svg", svg)
    return EXIT_OK


def cmd_compare(args) -> int:
    lex = _load_lex(args)
    a, _ = load_sequence(args.a)
    b, _ = load_sequence(args.b)
    emotions = args.emotion or list(lex.emotions)
    lines = []
    for e in emotions:
        res = permutation_test(a, b, lex, e, args.n_permutations, args.seed)
        lines.append(json.dumps(res.to_json()) + "\n")
    _write_or_print("".join(lines), args.output)
    return EXIT_OK


def cmd_plot(args) -> int:
    obj = json.loads(Path(args.arc).read_text("utf-8"))
    arc = Arc.from_json(obj)
    meta = obj.get("metadata")
    title = args.title or ((meta or {}).get("document") or {}).get("title") or arc.doc_id
    svg = render_arc_svg(arc, args.emotions, title=title, metadata=meta, smoothed=False if args.raw else None)
    _write_or_print(svg, args.output)
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {}
    for name in FIELD_TYPES:
        value = getattr(args, f"cfg_{name}", None)
        if value is not None:
            overrides[name] = parse_value(name, value)
    if args.seed is not None:
        overrides["seed"] = args.seed
    cfg = load_config(args.config, overrides)
    return run_pipeline(cfg)


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emoarc", description="Lexicon-based emotion arcs for literary corpora.")
    p.add_argument("--version", action="version", version=f"emoarc {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="strip Gutenberg boilerplate, extract metadata, split chapters")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--patterns", help="chapter heading pattern file")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("stats", help="token/type counts, TTR and frequency list")
    s.add_argument("files", nargs="+", help=".conllu, .txt or ingested .json files")
    s.add_argument("--top-k", type=int, default=2000)
    s.add_argument("--upos", type=_csv_list, default=None, help="only count these UPOS tags (CoNLL-U input)")
    s.add_argument("--freq-out", help="write lemma<TAB>count TSV here")
    s.set_defaults(func=cmd_stats)

    lex = sub.add_parser("lex", help="lexicon tools").add_subparsers(dest="lex_command", required=True)
    s = lex.add_parser("validate")
    s.add_argument("lexicon")
    s.add_argument("--emotions", type=_csv_list, default=None)
    s.add_argument("--dedupe", choices=["error", "keep-max"], default="error")
    s.set_defaults(func=cmd_lex_validate)
    s = lex.add_parser("edit")
    s.add_argument("lexicon")
    s.add_argument("--emotions", type=_csv_list, default=None)
    s.add_argument("--dedupe", choices=["error", "keep-max"], default="error")
    s.add_argument("--add", nargs=3, metavar=("LEMMA", "EMOTION", "INTENSITY"), action=_OrderedEdit)
    s.add_argument("--remove", metavar="LEMMA", action=_OrderedEdit)
    s.add_argument("--copy", nargs=2, metavar=("SOURCE", "TARGET"), action=_OrderedEdit)
    s.add_argument("--commands", help="JSON-lines edit commands, applied before the flags")
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--log", help="append the edit log (JSON lines) here")
    s.set_defaults(func=cmd_lex_edit)
    s = lex.add_parser("stats")
    s.add_argument("lexicon")
    s.add_argument("--emotions", type=_csv_list, default=None)
    s.add_argument("--dedupe", choices=["error", "keep-max"], default="error")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_lex_stats)

    emb = sub.add_parser("embed", help="word vectors and lexicon expansion").add_subparsers(
        dest="embed_command", required=True
    )
    s = emb.add_parser("train")
    s.add_argument("corpus", nargs="+")
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--seed", type=int, default=0)
    _embedding_args(s)
    s.set_defaults(func=cmd_embed_train)
    s = emb.add_parser("propose")
    s.add_argument("--model", required=True)
    _lexicon_args(s)
    s.add_argument("--corpus", nargs="+", help="rank candidates by frequency in these files")
    s.add_argument("--candidates", help="plain-text candidate list instead of --corpus")
    s.add_argument("--top-k", type=int, default=2000)
    s.add_argument("--threshold", type=float, default=0.5)
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--near-misses")
    s.set_defaults(func=cmd_embed_propose)
    s = emb.add_parser("apply")
    _lexicon_args(s)
    s.add_argument("--proposals", required=True)
    s.add_argument("--accepted", required=True, help="one accepted candidate lemma per line")
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--log")
    s.set_defaults(func=cmd_embed_apply)

    s = sub.add_parser("arc", help="chunked, smoothed emotion arc for one document")
    s.add_argument("document")
    _lexicon_args(s)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--n-chunks", type=int)
    g.add_argument("--window-tokens", type=int)
    s.add_argument("--smooth", type=int, default=5, help="odd moving-average window (1 = off)")
    s.add_argument("--svg-emotions", type=_csv_list)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_arc)

    s = sub.add_parser("compare", help="permutation test between two documents")
    s.add_argument("a")
    s.add_argument("b")
    _lexicon_args(s)
    s.add_argument("--emotion", action="append", help="repeatable; default all")
    s.add_argument("--n-permutations", type=int, default=9999)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", dest="output")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("plot", help="SVG chart from an arc JSON file")
    s.add_argument("arc")
    s.add_argument("--emotions", type=_csv_list, required=True)
    s.add_argument("--title")
    s.add_argument("--raw", action="store_true", help="plot unsmoothed values")
    s.add_argument("--out", dest="output")
    s.set_defaults(func=cmd_plot)

    s = sub.add_parser("run", help="full pipeline from a config file")
    s.add_argument("--config", "-c")
    s.add_argument("--seed", type=int)
    for f in fields(RunConfig):
        if f.name == "seed":
            continue
        flags = [f"--{f.name.replace('_', '-')}"]
        if "_" in f.name:
            flags.append(f"--{f.name}")
        s.add_argument(*flags, dest=f"cfg_{f.name}", metavar=_base_type(f.name).__name__.upper())
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EmoarcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
