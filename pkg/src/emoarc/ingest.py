"""Gutenberg plain-text ingestion: boilerplate stripping, metadata, chapters."""

from __future__ import annotations

import json
import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .errors import DecodeError, IngestError, MarkerOrderError

log = logging.getLogger(__name__)

HEADER_LINES = 200

_START_RE = re.compile(
    r"^\s*\*{3}\s*START\s+OF\s+(?:THIS|THE)\s+PROJECT\s+GUTENBERG\s+E-?BOOK\b.*$",
    re.IGNORECASE,
)
_END_RE = re.compile(
    r"^\s*\*{3}\s*END\s+OF\s+(?:THIS|THE)\s+PROJECT\s+GUTENBERG\s+E-?BOOK\b.*$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class RawBook:
    source_path: str
    data: bytes


@dataclass(frozen=True)
class Metadata:
    title: Optional[str] = None
    author: Optional[str] = None
    year: Optional[int] = None
    originally_finnish: Optional[bool] = None

    def __post_init__(self):
        if self.year is not None and not (1000 <= self.year <= 9999):
            raise ValueError(f"year must be a 4-digit positive integer, got {self.year}")


@dataclass(frozen=True)
class Document:
    id: str
    metadata: Metadata
    chapters: tuple[str, ...]
    body: str

    def __post_init__(self):
        if not self.chapters:
            raise ValueError("a document has at least one chapter")
        if "".join(self.chapters) != self.body:
            raise ValueError("chapters do not concatenate to body")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "metadata": asdict(self.metadata),
            "chapters": list(self.chapters),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Document":
        chapters = tuple(obj["chapters"])
        return cls(obj["id"], Metadata(**obj["metadata"]), chapters, "".join(chapters))


@dataclass(frozen=True)
class StripResult:
    text: str
    header: str
    markers_found: bool


def decode(data: bytes, source: str = "<bytes>") -> str:
    """Strict UTF-8 decode; BOM dropped, CRLF/CR normalised to LF."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"{source}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from exc
    if text.startswith("﻿"):
        text = text[1:]
    return text.replace("\r\n", "\n").replace("\r", "\n")


def strip_gutenberg(raw: Union[RawBook, bytes, str]) -> StripResult:
    """Drop the Project Gutenberg license header and footer.

    Everything up to and including the start marker line and everything from
    the end marker line onwards is removed. Without any marker the decoded text
    comes back unchanged with ``markers_found`` false.
    """
    if isinstance(raw, RawBook):
        text = decode(raw.data, raw.source_path)
    elif isinstance(raw, bytes):
        text = decode(raw)
    else:
        text = raw

    lines = text.split("\n")
    start = next((i for i, line in enumerate(lines) if _START_RE.match(line)), None)
    end = next((i for i, line in enumerate(lines) if _END_RE.match(line)), None)

    if start is None and end is None:
        header = "\n".join(lines[:HEADER_LINES])
        return StripResult(text, header, False)

    if start is not None and end is not None and end < start:
        later_end = next(
            (i for i in range(start + 1, len(lines)) if _END_RE.match(lines[i])), None
        )
        if later_end is None:
            raise MarkerOrderError(f"end marker on line {end + 1} precedes start marker on line {start + 1}")
        end = later_end

    lo = 0 if start is None else start + 1
    hi = len(lines) if end is None else end
    header = "\n".join(lines[:start]) if start is not None else ""
    return StripResult("\n".join(lines[lo:hi]), header, True)


# --- metadata ---------------------------------------------------------------

_FIELD_RE = {
    "title": re.compile(r"^\s*Title:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE),
    "author": re.compile(r"^\s*Author:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE),
    "language": re.compile(r"^\s*Language:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE),
}
_CONTINUATION_RE = re.compile(r"^[ \t]+(\S.*?)\s*$")
_TRANSLATOR_RE = re.compile(
    r"^\s*(Translator|Translated by|Suomentanut|Suomentaja|Suomennos)\b",
    re.IGNORECASE | re.MULTILINE,
)
_YEAR = r"(1[0-9]{3}|20[0-9]{2})"
# Labelled publication years, most specific first. Release dates are the
# Gutenberg upload date and never used as the publication year.
_YEAR_RES = [
    re.compile(r"^\s*Original\s+publication:.*?\b" + _YEAR + r"\b", re.IGNORECASE | re.MULTILINE),
    re.compile(r"^\s*(?:First\s+)?Publi(?:cation|shed)(?:\s+date)?:.*?\b" + _YEAR + r"\b", re.IGNORECASE | re.MULTILINE),
    re.compile(r"^\s*(?:Year|Vuosi|Julkaisuvuosi):\s*" + _YEAR + r"\b", re.IGNORECASE | re.MULTILINE),
    re.compile(r"^\s*(?:Ensimmäinen\s+painos|Julkaistu|Ilmestynyt)\b.*?\b" + _YEAR + r"\b", re.IGNORECASE | re.MULTILINE),
]


def _field(pattern: re.Pattern, header: str) -> Optional[str]:
    m = pattern.search(header)
    if not m:
        return None
    value = m.group(1)
    # Gutenberg wraps long titles onto indented continuation lines.
    rest = header[m.end():].split("\n")[1:]
    for line in rest:
        cont = _CONTINUATION_RE.match(line)
        if not cont or ":" in cont.group(1):
            break
        value += " " + cont.group(1)
    return value or None


def extract_metadata(raw_header: str) -> Metadata:
    title = _field(_FIELD_RE["title"], raw_header)
    author = _field(_FIELD_RE["author"], raw_header)
    language = _field(_FIELD_RE["language"], raw_header)

    year = None
    for pattern in _YEAR_RES:
        m = pattern.search(raw_header)
        if m:
            year = int(m.group(1))
            break

    if _TRANSLATOR_RE.search(raw_header):
        originally_finnish = False
    elif language is not None:
        originally_finnish = language.strip().lower() in ("finnish", "suomi")
    else:
        originally_finnish = None
    return Metadata(title=title, author=author, year=year, originally_finnish=originally_finnish)


# --- chapters ---------------------------------------------------------------


def load_patterns(path: Union[str, os.PathLike, None] = None) -> list[re.Pattern]:
    """Read heading patterns (one regex per line, ``#`` comments)."""
    if path is None:
        text = resources.files("emoarc").joinpath("data/chapter_patterns.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    patterns = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        patterns.append(re.compile(line, re.IGNORECASE))
    return patterns


DEFAULT_PATTERNS = load_patterns()


def _is_heading(line: str, patterns: Sequence[re.Pattern]) -> bool:
    stripped = line.strip()
    return bool(stripped) and any(p.fullmatch(stripped) for p in patterns)


def chapterize(body: str, patterns: Optional[Sequence[re.Pattern]] = None) -> list[str]:
    """Split ``body`` at chapter heading lines.

    Chapters are contiguous slices of ``body`` (each starting at its heading
    line), so ``"".join(chapterize(body)) == body``. Non-blank text before the
    first heading becomes a preamble chapter; blank lead-in is folded into the
    first chapter.
    """
    if patterns is None:
        patterns = DEFAULT_PATTERNS
    cuts = []
    offset = 0
    prev_blank = True
    for line in body.splitlines(keepends=True):
        if prev_blank and _is_heading(line, patterns):
            cuts.append(offset)
        prev_blank = not line.strip()
        offset += len(line)

    if not cuts:
        return [body]
    if cuts[0] != 0 and not body[: cuts[0]].strip():
        cuts[0] = 0
    if cuts[0] != 0:
        cuts.insert(0, 0)
    bounds = cuts + [len(body)]
    return [body[a:b] for a, b in zip(bounds, bounds[1:])]


# --- corpus -----------------------------------------------------------------


@dataclass
class IngestReport:
    retained: list[str] = field(default_factory=list)
    discarded: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"retained": self.retained, "discarded": self.discarded, "warnings": self.warnings}


def doc_id_for(path: Union[str, os.PathLike]) -> str:
    return Path(path).stem


def ingest_book(raw: RawBook, patterns: Optional[Sequence[re.Pattern]] = None) -> tuple[Document, bool]:
    """Strip, extract metadata, and chapterize one book.

    Returns the document and whether Gutenberg markers were found.
    """
    stripped = strip_gutenberg(raw)
    metadata = extract_metadata(stripped.header)
    chapters = chapterize(stripped.text, patterns)
    return Document(doc_id_for(raw.source_path), metadata, tuple(chapters), stripped.text), stripped.markers_found


def _ingest_path(path: Path, patterns) -> tuple[Optional[Document], Optional[str], bool]:
    try:
        raw = RawBook(str(path), path.read_bytes())
        if not raw.data:
            return None, "empty file", False
        doc, markers = ingest_book(raw, patterns)
        return doc, None, markers
    except DecodeError:
        return None, "encoding: not valid UTF-8", False
    except IngestError as exc:
        return None, f"{type(exc).__name__}: {exc}", False
    except OSError as exc:
        return None, f"read error: {exc}", False


def load_corpus(
    directory: Union[str, os.PathLike],
    patterns: Optional[Sequence[re.Pattern]] = None,
    jobs: int = 1,
    suffix: str = ".txt",
) -> tuple[list[Document], IngestReport]:
    """Ingest every ``*.txt`` file of ``directory`` in filename order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise OSError(f"not a readable directory: {directory}")
    paths = sorted((p for p in directory.iterdir() if p.is_file() and p.suffix == suffix), key=lambda p: p.name)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda p: _ingest_path(p, patterns), paths))
    else:
        results = [_ingest_path(p, patterns) for p in paths]

    report = IngestReport()
    docs = []
    for path, (doc, reason, markers) in zip(paths, results):
        if doc is None:
            log.info("discarding %s: %s", path.name, reason)
            report.discarded.append({"file": path.name, "reason": reason})
            continue
        if not markers:
            report.warnings.append(f"{path.name}: no Gutenberg markers found")
        report.retained.append(path.name)
        docs.append(doc)
    if not paths:
        report.warnings.append(f"no {suffix} files in {directory}")
    return docs, report


def write_corpus(docs: Iterable[Document], report: IngestReport, out_dir: Union[str, os.PathLike]) -> None:
    """Write ``<id>.txt`` bodies, ``<id>.json`` documents and ``ingest_report.json``."""
    from .io import atomic_write_text

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for doc in docs:
        atomic_write_text(out_dir / f"{doc.id}.txt", doc.body)
        atomic_write_text(out_dir / f"{doc.id}.json", json.dumps(doc.to_json(), ensure_ascii=False, indent=1) + "\n")
    atomic_write_text(out_dir / "ingest_report.json", json.dumps(report.to_json(), ensure_ascii=False, indent=1) + "\n")
