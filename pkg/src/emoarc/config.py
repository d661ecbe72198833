"""Run configuration: INI file ``[run]`` section, overridable by CLI flags."""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from . import __version__
from .arcs import DEFAULT_N_CHUNKS, DEFAULT_SMOOTHING
from .embeddings import EmbeddingConfig
from .errors import ConfigError
from .lexicon import DEFAULT_EMOTIONS

SECTION = "run"
_EMB = EmbeddingConfig()


@dataclass
class RunConfig:
    corpus: list = field(default_factory=list)
    lexicon: str = ""
    output: str = "out"
    emotions: list = field(default_factory=lambda: list(DEFAULT_EMOTIONS))
    dedupe: str = "error"
    n_chunks: Optional[int] = DEFAULT_N_CHUNKS
    window_tokens: Optional[int] = None
    smoothing_window: int = DEFAULT_SMOOTHING
    denominator: str = "words"
    svg: bool = True
    svg_emotions: list = field(default_factory=list)
    chapter_patterns: Optional[str] = None
    top_k: int = 2000
    expand: bool = False
    expansion_threshold: float = 0.5
    embedding_dimension: int = _EMB.dimension
    embedding_window: int = _EMB.window
    embedding_negatives: int = _EMB.negatives
    embedding_epochs: int = _EMB.epochs
    embedding_min_count: int = _EMB.min_count
    embedding_subsample_threshold: float = _EMB.subsample_threshold
    embedding_learning_rate: float = _EMB.learning_rate
    seed: int = 0

    def embedding_config(self) -> EmbeddingConfig:
        return EmbeddingConfig(
            dimension=self.embedding_dimension,
            window=self.embedding_window,
            negatives=self.embedding_negatives,
            epochs=self.embedding_epochs,
            min_count=self.embedding_min_count,
            subsample_threshold=self.embedding_subsample_threshold,
            learning_rate=self.embedding_learning_rate,
            seed=self.seed,
        )

    def plot_emotions(self) -> list:
        return list(self.svg_emotions) if self.svg_emotions else list(self.emotions)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    def metadata(self) -> dict:
        return {"tool": "emoarc", "version": __version__, "config": self.to_json()}

    def validate(self) -> None:
        problems = []
        if not self.corpus:
            problems.append("corpus: no corpus paths given")
        for p in self.corpus:
            if not os.path.exists(p):
                problems.append(f"corpus: path does not exist: {p}")
        if not self.lexicon:
            problems.append("lexicon: no lexicon path given")
        elif not os.path.isfile(self.lexicon):
            problems.append(f"lexicon: file does not exist: {self.lexicon}")
        if self.chapter_patterns and not os.path.isfile(self.chapter_patterns):
            problems.append(f"chapter_patterns: file does not exist: {self.chapter_patterns}")
        if not self.emotions or len(set(self.emotions)) != len(self.emotions):
            problems.append("emotions: must be a non-empty list of unique names")
        if self.window_tokens is None and (self.n_chunks is None or self.n_chunks < 1):
            problems.append("n_chunks: must be >= 1 (or set window_tokens)")
        if self.window_tokens is not None and self.window_tokens < 1:
            problems.append("window_tokens: must be >= 1")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            problems.append("smoothing_window: must be a positive odd integer")
        if self.denominator not in ("words", "tokens"):
            problems.append("denominator: must be 'words' or 'tokens'")
        if self.dedupe not in ("error", "keep-max"):
            problems.append("dedupe: must be 'error' or 'keep-max'")
        unknown = [e for e in self.svg_emotions if e not in self.emotions and e != "surprise"]
        if unknown:
            problems.append(f"svg_emotions: not in the emotion set: {unknown}")
        if not (0.0 < self.expansion_threshold <= 1.0):
            problems.append("expansion_threshold: must be in (0, 1]")
        if self.top_k < 0:
            problems.append("top_k: must be >= 0")
        try:
            self.embedding_config()
        except ValueError as exc:
            problems.append(f"embedding: {exc}")
        if problems:
            raise ConfigError("; ".join(problems))


FIELD_TYPES = {f.name: f for f in fields(RunConfig)}
LIST_FIELDS = {"corpus", "emotions", "svg_emotions"}
PATH_FIELDS = {"lexicon", "output", "chapter_patterns"}


def _base_type(name: str):
    default = FIELD_TYPES[name].default
    if name in LIST_FIELDS:
        return list
    if name in ("n_chunks", "window_tokens"):
        return int
    if name == "chapter_patterns":
        return str
    return type(default)


def parse_value(name: str, raw: str):
    """Convert a textual config or flag value to the field's type."""
    if name not in FIELD_TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    raw = raw.strip()
    kind = _base_type(name)
    if kind is list:
        return [p.strip() for p in raw.replace("\n", ",").split(",") if p.strip()]
    if raw.lower() in ("", "none") and name in ("n_chunks", "window_tokens", "chapter_patterns"):
        return None
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {kind.__name__}") from None


def load_config(path, overrides: Optional[dict] = None) -> RunConfig:
    """Read ``[run]`` from an INI file; relative paths resolve against its directory.

    ``overrides`` maps field names to already-typed values (from CLI flags)
    and wins over the file.
    """
    values: dict = {}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not parser.has_section(SECTION):
            raise ConfigError(f"config {path} has no [{SECTION}] section")
        base = Path(path).resolve().parent
        for key, raw in parser.items(SECTION):
            value = parse_value(key, raw)
            if key in PATH_FIELDS and value:
                value = str(base / value)
            elif key == "corpus":
                value = [str(base / p) for p in value]
            values[key] = value
    for key, value in (overrides or {}).items():
        if key not in FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = value
    cfg = RunConfig(**values)
    if cfg.window_tokens is not None:
        cfg.n_chunks = None
    return cfg


def format_config(cfg: RunConfig) -> str:
    """Render ``cfg`` as an INI document that :func:`load_config` reads back."""
    lines = [f"[{SECTION}]"]
    for name, value in cfg.to_json().items():
        if isinstance(value, list):
            value = ", ".join(value)
        elif value is None:
            value = ""
        lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"
