"""Word-emotion intensity lexicons (NRC/FEIL tab-separated format).

A :class:`Lexicon` is immutable. Edits go through :func:`edit_lexicon`, which
returns a new lexicon with the command appended to ``edit_log``; replaying
that log on the original reproduces the result.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence, TextIO, Union

from .errors import DuplicateError, MissingLemmaError, ParseError, RangeError, UnknownEmotionError

DEFAULT_EMOTIONS = ("anger", "anticipation", "disgust", "fear", "joy", "sadness", "trust")
# Canonical column order when the active set is extended (Plutchik's eight).
PLUTCHIK_ORDER = ("anger", "anticipation", "disgust", "fear", "joy", "sadness", "surprise", "trust")
IMPLICIT_EMOTIONS = ("surprise",)

ORIGINAL = "original"
MANUAL_ADD = "manual-add"
MANUAL_EDIT = "manual-edit"
EMBEDDING_COPY = "embedding-copy"


def order_emotions(names: Iterable[str]) -> tuple[str, ...]:
    """Plutchik order first, then any extra names alphabetically."""
    names = set(names)
    known = [e for e in PLUTCHIK_ORDER if e in names]
    return tuple(known + sorted(names - set(PLUTCHIK_ORDER)))


@dataclass(frozen=True)
class Provenance:
    kind: str = ORIGINAL
    source: Optional[str] = None
    cosine: Optional[float] = None

    def __str__(self):
        if self.kind == EMBEDDING_COPY:
            return f"{self.kind}({self.source}, {self.cosine:.4f})"
        if self.source:
            return f"{self.kind}({self.source})"
        return self.kind


@dataclass(frozen=True)
class LexiconEntry:
    lemma: str
    emotion: str
    intensity: float
    provenance: Provenance = Provenance()

    def __post_init__(self):
        check_intensity(self.intensity)


def check_intensity(value: float, lineno: Optional[int] = None) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and 0.0 <= value <= 1.0):
        raise RangeError(f"intensity {value!r} outside [0, 1]", lineno)


# --- edit commands ----------------------------------------------------------


@dataclass(frozen=True)
class Add:
    lemma: str
    emotion: str
    intensity: float
    op: str = "add"


@dataclass(frozen=True)
class RemoveLemma:
    lemma: str
    op: str = "remove_lemma"


@dataclass(frozen=True)
class CopyEntries:
    source: str
    target: str
    cosine: Optional[float] = None
    op: str = "copy_entries"


@dataclass(frozen=True)
class Reject:
    """A reviewed expansion proposal that was not applied (log only)."""

    candidate: str
    source: str
    cosine: float
    op: str = "reject"


_COMMANDS = {cls.op: cls for cls in (Add, RemoveLemma, CopyEntries, Reject)}
EditCommand = Union[Add, RemoveLemma, CopyEntries, Reject]


def command_to_json(cmd: EditCommand) -> dict:
    d = asdict(cmd)
    op = d.pop("op")
    return {"op": op, **d}


def command_from_json(obj: dict) -> EditCommand:
    obj = dict(obj)
    op = obj.pop("op", None)
    if op not in _COMMANDS:
        raise ValueError(f"unknown edit op {op!r}")
    return _COMMANDS[op](**obj)


def write_edit_log(commands: Iterable[EditCommand], stream: TextIO) -> None:
    for cmd in commands:
        stream.write(json.dumps(command_to_json(cmd), ensure_ascii=False, sort_keys=True) + "\n")


def read_edit_log(stream: TextIO) -> list[EditCommand]:
    out = []
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            out.append(command_from_json(json.loads(line)))
        except (ValueError, TypeError) as exc:
            raise ParseError(str(exc), lineno) from exc
    return out


# --- lexicon ----------------------------------------------------------------


class Lexicon:
    """Immutable set of (lemma, emotion) -> intensity entries."""

    def __init__(
        self,
        entries: Iterable[LexiconEntry] = (),
        name: str = "",
        emotions: Sequence[str] = DEFAULT_EMOTIONS,
        edit_log: Sequence[EditCommand] = (),
    ):
        self.name = name
        self.emotions = tuple(emotions)
        if len(set(self.emotions)) != len(self.emotions):
            raise ValueError(f"emotion names must be unique: {self.emotions}")
        self.edit_log = tuple(edit_log)
        allowed = set(self.emotions)
        index: dict[tuple[str, str], LexiconEntry] = {}
        dupes = []
        for e in entries:
            if e.emotion not in allowed:
                raise UnknownEmotionError(f"emotion {e.emotion!r} not in active set {self.emotions}")
            key = (e.lemma, e.emotion)
            if key in index:
                dupes.append(key)
            index[key] = e
        if dupes:
            raise DuplicateError(dupes)
        self._entries = tuple(sorted(index.values(), key=lambda e: (e.lemma, e.emotion)))
        table: dict[str, list[tuple[str, float]]] = {}
        for e in self._entries:
            table.setdefault(e.lemma, []).append((e.emotion, e.intensity))
        self._table = {k: tuple(v) for k, v in table.items()}
        self._index = index

    @property
    def entries(self) -> tuple[LexiconEntry, ...]:
        """Entries sorted by lemma, then emotion."""
        return self._entries

    @property
    def lemmas(self) -> list[str]:
        return sorted(self._table)

    @property
    def table(self) -> dict[str, tuple[tuple[str, float], ...]]:
        """lemma -> ((emotion, intensity), ...); treat as read-only."""
        return self._table

    def entries_for(self, lemma: str) -> tuple[tuple[str, float], ...]:
        return self._table.get(lemma, ())

    def intensity(self, lemma: str, emotion: str) -> float:
        e = self._index.get((lemma, emotion))
        return 0.0 if e is None else e.intensity

    def entry(self, lemma: str, emotion: str) -> Optional[LexiconEntry]:
        return self._index.get((lemma, emotion))

    def entry_set(self) -> frozenset[tuple[str, str, float]]:
        return frozenset((e.lemma, e.emotion, e.intensity) for e in self._entries)

    def replace(self, entries: Iterable[LexiconEntry], edit_log: Sequence[EditCommand]) -> "Lexicon":
        return Lexicon(entries, self.name, self.emotions, edit_log)

    def __contains__(self, lemma: str) -> bool:
        return lemma in self._table

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __repr__(self):
        return f"<Lexicon {self.name!r}: {len(self._table)} lemmas, {len(self._entries)} entries>"


def _looks_like_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_lexicon(
    stream: Union[TextIO, str, os.PathLike],
    name: str = "",
    emotions: Optional[Sequence[str]] = None,
    dedupe: str = "error",
) -> Lexicon:
    """Parse ``word<TAB>emotion<TAB>intensity`` rows.

    ``emotions`` is the run's active set (default: the seven of
    :data:`DEFAULT_EMOTIONS`). ``surprise`` rows are accepted and extend the
    set; other unknown names raise :class:`UnknownEmotionError`. Duplicate
    (lemma, emotion) rows raise :class:`DuplicateError` unless
    ``dedupe="keep-max"``.
    """
    if isinstance(stream, (str, os.PathLike)):
        with open(stream, encoding="utf-8") as fh:
            return load_lexicon(fh, name or os.path.basename(os.fspath(stream)), emotions, dedupe)
    if dedupe not in ("error", "keep-max"):
        raise ValueError(f"unknown dedupe policy {dedupe!r}")

    active = set(DEFAULT_EMOTIONS if emotions is None else emotions)
    seen: dict[tuple[str, str], float] = {}
    order: list[tuple[str, str]] = []
    dupes: list[tuple[str, str]] = []
    first = True
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"expected 3 tab-separated columns, got {len(cols)}", lineno)
        word, emotion, raw = (c.strip() for c in cols)
        if first and not _looks_like_float(raw):
            first = False
            continue
        first = False
        emotion = emotion.lower()
        if emotion not in active:
            if emotion in IMPLICIT_EMOTIONS:
                active.add(emotion)
            else:
                raise UnknownEmotionError(f"line {lineno}: unknown emotion {emotion!r}")
        try:
            value = float(raw)
        except ValueError:
            raise ParseError(f"intensity {raw!r} is not a number", lineno) from None
        check_intensity(value, lineno)
        key = (word, emotion)
        if key in seen:
            dupes.append(key)
            seen[key] = max(seen[key], value)
        else:
            seen[key] = value
            order.append(key)
    if dupes and dedupe == "error":
        raise DuplicateError(sorted(set(dupes)))
    entries = [LexiconEntry(w, e, seen[(w, e)]) for w, e in order]
    return Lexicon(entries, name, order_emotions(active))


def format_intensity(value: float) -> str:
    """Shortest decimal that round-trips (``1.0`` -> ``1``)."""
    s = repr(float(value))
    return s[:-2] if s.endswith(".0") else s


def format_lexicon(lex: Lexicon) -> str:
    return "".join(f"{e.lemma}\t{e.emotion}\t{format_intensity(e.intensity)}\n" for e in lex.entries)


def save_lexicon(lex: Lexicon, stream: Union[TextIO, str, os.PathLike]) -> None:
    if isinstance(stream, (str, os.PathLike)):
        from .io import atomic_write_text

        atomic_write_text(stream, format_lexicon(lex))
    else:
        stream.write(format_lexicon(lex))


def parse_lexicon(text: str, **kwargs) -> Lexicon:
    return load_lexicon(io.StringIO(text), **kwargs)


# --- editing ----------------------------------------------------------------


def edit_lexicon(lex: Lexicon, command: EditCommand) -> Lexicon:
    """Apply one edit command and return a new lexicon."""
    entries = {(e.lemma, e.emotion): e for e in lex.entries}
    if isinstance(command, Add):
        if command.emotion not in lex.emotions:
            raise UnknownEmotionError(f"emotion {command.emotion!r} not in active set {lex.emotions}")
        check_intensity(command.intensity)
        key = (command.lemma, command.emotion)
        kind = MANUAL_EDIT if key in entries else MANUAL_ADD
        entries[key] = LexiconEntry(command.lemma, command.emotion, float(command.intensity), Provenance(kind))
    elif isinstance(command, RemoveLemma):
        entries = {k: v for k, v in entries.items() if k[0] != command.lemma}
    elif isinstance(command, CopyEntries):
        if command.source not in lex:
            raise MissingLemmaError(f"copy source {command.source!r} is not in the lexicon")
        if command.cosine is None:
            prov = Provenance(MANUAL_ADD, command.source)
        else:
            prov = Provenance(EMBEDDING_COPY, command.source, float(command.cosine))
        entries = {k: v for k, v in entries.items() if k[0] != command.target}
        for emotion, value in lex.entries_for(command.source):
            entries[(command.target, emotion)] = LexiconEntry(command.target, emotion, value, prov)
    elif isinstance(command, Reject):
        pass
    else:
        raise TypeError(f"not an edit command: {command!r}")
    return lex.replace(entries.values(), lex.edit_log + (command,))


def replay(lex: Lexicon, commands: Iterable[EditCommand]) -> Lexicon:
    for cmd in commands:
        lex = edit_lexicon(lex, cmd)
    return lex


# --- statistics -------------------------------------------------------------


@dataclass(frozen=True)
class LexiconStats:
    emotions: tuple[str, ...]
    lemma_count: int
    counts: dict[str, int]
    overlap: dict[str, dict[str, int]]
    co_annotation: dict[str, dict[str, float]]

    def to_json(self) -> dict:
        return {
            "emotions": list(self.emotions),
            "lemma_count": self.lemma_count,
            "counts": self.counts,
            "overlap": self.overlap,
            "co_annotation": self.co_annotation,
        }


def lexicon_stats(lex: Lexicon) -> LexiconStats:
    """Per-emotion entry counts and the directional co-annotation matrix.

    ``co_annotation[a][b]`` is the share of ``a``-annotated lemmas that are
    also annotated with ``b``; it is 0.0 when ``a`` has no lemmas.
    """
    members: dict[str, set[str]] = {e: set() for e in lex.emotions}
    for e in lex.entries:
        members[e.emotion].add(e.lemma)
    counts = {e: len(members[e]) for e in lex.emotions}
    overlap = {a: {b: len(members[a] & members[b]) for b in lex.emotions} for a in lex.emotions}
    co = {
        a: {b: (overlap[a][b] / counts[a] if counts[a] else 0.0) for b in lex.emotions}
        for a in lex.emotions
    }
    return LexiconStats(lex.emotions, len(lex.lemmas), counts, overlap, co)
