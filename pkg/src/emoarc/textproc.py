"""Tokens, lemma sequences, CoNLL-U reading and corpus statistics.

The fallback lemmatizer only lowercases. Finnish inflection is far too rich
to approximate, so real analyses should feed CoNLL-U output from a proper
lemmatizer through :func:`read_conllu`.
"""

from __future__ import annotations

import io
import os
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO, Union

from .errors import ParseError

NON_WORD_UPOS = frozenset({"PUNCT", "SYM"})

_TOKEN_RE = re.compile(r"\w+(?:[-'’]\w+)*|[^\w\s]")
_SENTENCE_END = frozenset(".!?…")


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    upos: Optional[str] = None
    is_word: bool = True

    def __post_init__(self):
        if not self.lemma:
            raise ValueError(f"empty lemma for surface {self.surface!r}")


@dataclass(frozen=True)
class LemmaSequence:
    doc_id: str
    tokens: tuple[Token, ...]
    sentence_boundaries: tuple[int, ...] = ()

    def __post_init__(self):
        prev = 0
        for b in self.sentence_boundaries:
            if b <= prev or b > len(self.tokens):
                raise ValueError(f"bad sentence boundaries {self.sentence_boundaries!r}")
            prev = b

    @property
    def words(self) -> list[Token]:
        return [t for t in self.tokens if t.is_word]

    @property
    def word_count(self) -> int:
        return sum(1 for t in self.tokens if t.is_word)

    def sentences(self) -> list[list[Token]]:
        out, start = [], 0
        for b in self.sentence_boundaries:
            out.append(list(self.tokens[start:b]))
            start = b
        if start < len(self.tokens):
            out.append(list(self.tokens[start:]))
        return out

    def __len__(self):
        return len(self.tokens)


def _has_letter(s: str) -> bool:
    return any(c.isalpha() for c in s)


def tokenize(text: str) -> list[Token]:
    """Split on whitespace and punctuation; lemma is the lowercased surface."""
    return [Token(s, s.lower(), None, _has_letter(s)) for s in _TOKEN_RE.findall(text)]


def sequence_from_text(text: str, doc_id: str = "") -> LemmaSequence:
    """Tokenize plain text, with sentence breaks after ``.``, ``!``, ``?``."""
    tokens = tokenize(text)
    n = len(tokens)
    bounds = [
        i + 1
        for i, t in enumerate(tokens)
        if t.surface in _SENTENCE_END and (i + 1 == n or tokens[i + 1].surface not in _SENTENCE_END)
    ]
    if tokens and (not bounds or bounds[-1] != n):
        bounds.append(n)
    return LemmaSequence(doc_id, tuple(tokens), tuple(bounds))


def read_conllu(stream: Union[TextIO, str, os.PathLike], doc_id: str = "") -> LemmaSequence:
    """Read FORM/LEMMA/UPOS from CoNLL-U.

    Multiword range rows (``1-2``) and empty nodes (``1.1``) are skipped.
    A lemma of ``_`` on a non-underscore form falls back to the lowercased
    form. ``stream`` may be a path or an open text stream.
    """
    if isinstance(stream, (str, os.PathLike)):
        with open(stream, encoding="utf-8") as fh:
            return read_conllu(fh, doc_id or os.path.splitext(os.path.basename(stream))[0])

    tokens: list[Token] = []
    bounds: list[int] = []
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            if tokens and (not bounds or bounds[-1] != len(tokens)):
                bounds.append(len(tokens))
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ParseError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
        tok_id, form, lemma, upos = cols[0], cols[1], cols[2], cols[3]
        if "-" in tok_id or "." in tok_id:
            continue
        if not tok_id.isdigit():
            raise ParseError(f"bad token id {tok_id!r}", lineno)
        if lemma == "_" and form != "_":
            lemma = form.lower()
        if not lemma:
            raise ParseError("empty LEMMA column", lineno)
        upos = None if upos in ("_", "") else upos
        if upos is None:
            is_word = _has_letter(form)
        else:
            is_word = upos not in NON_WORD_UPOS
        tokens.append(Token(form, lemma, upos, is_word))
    if tokens and (not bounds or bounds[-1] != len(tokens)):
        bounds.append(len(tokens))
    return LemmaSequence(doc_id, tuple(tokens), tuple(bounds))


def parse_conllu(text: str, doc_id: str = "") -> LemmaSequence:
    return read_conllu(io.StringIO(text), doc_id)


@dataclass(frozen=True)
class CorpusStats:
    token_count: int
    word_count: int
    type_count: int
    ttr: float
    top_frequent: tuple[tuple[str, int], ...]

    def to_json(self) -> dict:
        return {
            "token_count": self.token_count,
            "word_count": self.word_count,
            "type_count": self.type_count,
            "ttr": self.ttr,
            "top_frequent": [list(p) for p in self.top_frequent],
        }


def lemma_counts(seqs: Iterable[LemmaSequence], upos: Optional[Sequence[str]] = None) -> Counter:
    wanted = None if upos is None else frozenset(upos)
    counts: Counter = Counter()
    for seq in seqs:
        for t in seq.tokens:
            if t.is_word and (wanted is None or t.upos in wanted):
                counts[t.lemma] += 1
    return counts


def rank(counts: Counter, k: Optional[int] = None) -> list[tuple[str, int]]:
    """Count-descending, lemma-ascending ranking, cut to ``k`` when given."""
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked if k is None else ranked[:k]


def corpus_stats(seqs: Sequence[LemmaSequence], k: int = 2000, upos: Optional[Sequence[str]] = None) -> CorpusStats:
    """Token/word/type counts, type-token ratio and the ``k`` most frequent lemmas.

    With ``upos`` (e.g. ``["ADJ"]``) only words carrying one of those tags are
    counted; this needs CoNLL-U input since plain-text tokens have no tag.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    seqs = list(seqs)
    counts = lemma_counts(seqs, upos)
    word_count = sum(counts.values())
    type_count = len(counts)
    ttr = type_count / word_count if word_count else 0.0
    token_count = sum(len(s.tokens) for s in seqs)
    return CorpusStats(token_count, word_count, type_count, ttr, tuple(rank(counts, k)))


def format_frequency_tsv(ranked: Iterable[tuple[str, int]]) -> str:
    return "".join(f"{lemma}\t{count}\n" for lemma, count in ranked)
