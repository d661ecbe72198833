"""Lexicon scoring: whole-book emotion totals and chunked, smoothed arcs.

Raw intensity sums are accumulated exactly as rationals and rounded once to
float, so chunk sums add up to the document sum with no rounding drift and
results never depend on summation order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ChunkingError, ConfigError, EmptyDocumentError
from .lexicon import Lexicon
from .textproc import LemmaSequence, Token

PER = 10_000
RAW, PER10K, SUM = "raw", "per10k", "sum"

DEFAULT_N_CHUNKS = 100
DEFAULT_SMOOTHING = 5


@dataclass(frozen=True)
class EmotionVector:
    emotions: tuple[str, ...]
    values: tuple[float, ...]
    kind: str
    exact: Optional[tuple[Fraction, ...]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.values) != len(self.emotions):
            raise ValueError("one value per emotion required")
        if self.kind not in (RAW, PER10K, SUM):
            raise ValueError(f"unknown vector kind {self.kind!r}")
        if any(v < 0 for v in self.values):
            raise ValueError("emotion scores are non-negative")

    def __getitem__(self, emotion: str) -> float:
        return self.values[self.emotions.index(emotion)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.emotions, self.values))

    @classmethod
    def from_exact(cls, emotions, exact: Sequence[Fraction], kind: str = RAW) -> "EmotionVector":
        exact = tuple(exact)
        return cls(tuple(emotions), tuple(float(x) for x in exact), kind, exact)


@dataclass(frozen=True)
class DocumentScore:
    raw: EmotionVector
    normalized: EmotionVector
    word_count: int
    denominator: int


def exact_sums(lemmas: Sequence[str], lex: Lexicon) -> list[Fraction]:
    """Exact per-emotion intensity sums over ``lemmas``, in ``lex.emotions`` order."""
    pos = {e: i for i, e in enumerate(lex.emotions)}
    counts: dict[str, int] = {}
    for lemma in lemmas:
        counts[lemma] = counts.get(lemma, 0) + 1
    sums = [Fraction(0)] * len(pos)
    table = lex.table
    for lemma, n in counts.items():
        for emotion, value in table.get(lemma, ()):
            sums[pos[emotion]] += n * Fraction(value)
    return sums


def _normalize(emotions, sums: Sequence[Fraction], denominator: int) -> EmotionVector:
    return EmotionVector.from_exact(emotions, [PER * s / denominator for s in sums], PER10K)


def score_document(seq: LemmaSequence, lex: Lexicon, denominator: str = "words") -> DocumentScore:
    """Raw intensity sums and their per-10,000-word normalization.

    Only word tokens contribute. ``denominator="tokens"`` divides by the raw
    token count (punctuation included) instead of the word count.
    """
    words = [t.lemma for t in seq.tokens if t.is_word]
    if not words:
        raise EmptyDocumentError(f"document {seq.doc_id!r} has no word tokens")
    if denominator == "words":
        denom = len(words)
    elif denominator == "tokens":
        denom = len(seq.tokens)
    else:
        raise ConfigError(f"denominator must be 'words' or 'tokens', got {denominator!r}")
    sums = exact_sums(words, lex)
    return DocumentScore(
        EmotionVector.from_exact(lex.emotions, sums, RAW),
        _normalize(lex.emotions, sums, denom),
        len(words),
        denom,
    )


def chunk_sizes(n_words: int, n_chunks: int) -> list[int]:
    """Split ``n_words`` into ``n_chunks`` contiguous sizes differing by at most one."""
    if n_chunks < 1:
        raise ChunkingError("n_chunks must be >= 1")
    if n_words < n_chunks:
        raise ChunkingError(f"{n_words} word tokens cannot fill {n_chunks} chunks")
    q, r = divmod(n_words, n_chunks)
    return [q + 1] * r + [q] * (n_chunks - r)


def window_sizes(n_words: int, window_tokens: int) -> list[int]:
    if window_tokens < 1:
        raise ChunkingError("window_tokens must be >= 1")
    if n_words == 0:
        raise ChunkingError("no word tokens to chunk")
    q, r = divmod(n_words, window_tokens)
    return [window_tokens] * q + ([r] if r else [])


@dataclass(frozen=True)
class Arc:
    doc_id: str
    emotions: tuple[str, ...]
    chunking: dict
    chunk_token_counts: tuple[int, ...]
    raw: tuple[EmotionVector, ...]
    sums: tuple[EmotionVector, ...]
    smoothed: Optional[tuple[EmotionVector, ...]] = None
    smoothing: Optional[dict] = None

    def __post_init__(self):
        n = len(self.raw)
        if len(self.chunk_token_counts) != n or len(self.sums) != n:
            raise ValueError("raw, sums and chunk_token_counts must have equal length")
        if self.smoothed is not None and len(self.smoothed) != n:
            raise ValueError("smoothed series length differs from raw")

    def __len__(self):
        return len(self.raw)

    def series(self, emotion: str, smoothed: bool = False) -> list[float]:
        vectors = self.smoothed if smoothed else self.raw
        if vectors is None:
            raise ValueError("arc has no smoothed series")
        i = self.emotions.index(emotion)
        return [v.values[i] for v in vectors]

    def to_json(self) -> dict:
        out = {
            "doc_id": self.doc_id,
            "emotions": list(self.emotions),
            "chunking": self.chunking,
            "smoothing": self.smoothing,
            "chunks": [],
        }
        for i, (n, raw, s) in enumerate(zip(self.chunk_token_counts, self.raw, self.sums)):
            row = {"chunk": i, "word_count": n, "sum": list(s.values), "per10k": list(raw.values)}
            if self.smoothed is not None:
                row["smoothed"] = list(self.smoothed[i].values)
            out["chunks"].append(row)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Arc":
        emotions = tuple(obj["emotions"])
        chunks = obj["chunks"]
        smoothed = None
        if chunks and "smoothed" in chunks[0]:
            smoothed = tuple(EmotionVector(emotions, tuple(c["smoothed"]), PER10K) for c in chunks)
        return cls(
            obj["doc_id"],
            emotions,
            obj["chunking"],
            tuple(c["word_count"] for c in chunks),
            tuple(EmotionVector(emotions, tuple(c["per10k"]), PER10K) for c in chunks),
            tuple(EmotionVector(emotions, tuple(c["sum"]), SUM) for c in chunks),
            smoothed,
            obj.get("smoothing"),
        )


def build_arc(
    seq: LemmaSequence,
    lex: Lexicon,
    n_chunks: Optional[int] = None,
    window_tokens: Optional[int] = None,
) -> Arc:
    """Score contiguous word-token chunks, each normalized per 10k of its own words.

    Exactly one of ``n_chunks`` / ``window_tokens`` may be given; with neither,
    ``n_chunks=100``. Count-based chunks differ in size by at most one;
    window-based chunks are ``window_tokens`` long plus a final partial chunk.
    """
    if n_chunks is not None and window_tokens is not None:
        raise ConfigError("give either n_chunks or window_tokens, not both")
    words = [t.lemma for t in seq.tokens if t.is_word]
    if window_tokens is not None:
        sizes = window_sizes(len(words), window_tokens)
        chunking = {"window_tokens": window_tokens}
    else:
        n = DEFAULT_N_CHUNKS if n_chunks is None else n_chunks
        sizes = chunk_sizes(len(words), n)
        chunking = {"n_chunks": n}

    raw, sums = [], []
    start = 0
    for size in sizes:
        s = exact_sums(words[start : start + size], lex)
        sums.append(EmotionVector.from_exact(lex.emotions, s, SUM))
        raw.append(_normalize(lex.emotions, s, size))
        start += size
    return Arc(seq.doc_id, lex.emotions, chunking, tuple(sizes), tuple(raw), tuple(sums))


def moving_average(values: Sequence[float], window: int) -> list[float]:
    """Centered mean, truncated at the edges and averaged over the cells present."""
    if window < 1 or window % 2 == 0:
        raise ConfigError(f"smoothing window must be a positive odd integer, got {window}")
    half = window // 2
    n = len(values)
    exact = [Fraction(v) for v in values]
    out = []
    for i in range(n):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        out.append(float(sum(exact[lo:hi], Fraction(0)) / (hi - lo)))
    return out


def smooth_arc(arc: Arc, window: int = DEFAULT_SMOOTHING) -> Arc:
    columns = [moving_average([v.values[i] for v in arc.raw], window) for i in range(len(arc.emotions))]
    smoothed = tuple(
        EmotionVector(arc.emotions, tuple(col[j] for col in columns), PER10K) for j in range(len(arc.raw))
    )
    how = {"method": "centered-moving-average", "window": window, "edges": "truncated"}
    return replace(arc, smoothed=smoothed, smoothing=how)


# --- export -----------------------------------------------------------------


def format_arc_csv(arc: Arc) -> str:
    """``chunk,<emotions...>[,<emotion>_smoothed...]`` with 2-decimal values."""
    header = ["chunk", *arc.emotions]
    if arc.smoothed is not None:
        header += [f"{e}_smoothed" for e in arc.emotions]
    lines = [",".join(header)]
    for i, raw in enumerate(arc.raw):
        cells = [str(i)] + [f"{v:.2f}" for v in raw.values]
        if arc.smoothed is not None:
            cells += [f"{v:.2f}" for v in arc.smoothed[i].values]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def format_arc_json(arc: Arc, metadata: Optional[dict] = None) -> str:
    obj = arc.to_json()
    if metadata is not None:
        obj = {"metadata": metadata, **obj}
    return json.dumps(obj, ensure_ascii=False, indent=1) + "\n"


def format_totals_csv(rows: Sequence[tuple[str, str, DocumentScore]], emotions: Sequence[str]) -> str:
    """Per-book normalized totals; ``rows`` holds (doc_id, title, score)."""
    lines = [",".join(["doc_id", "title", "word_count", *emotions])]
    for doc_id, title, score in rows:
        vals = score.normalized.as_dict()
        cells = [_csv_cell(doc_id), _csv_cell(title), str(score.word_count)]
        cells += [f"{vals[e]:.2f}" for e in emotions]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _csv_cell(s: str) -> str:
    if any(c in s for c in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s
