"""Skip-gram with negative sampling, cosine lookup and lexicon expansion.

Training is sequential and seeded: identical corpus, config and seed give
bit-identical vectors. Updates are applied in mini-batches of
(center, context) pairs for speed; within a batch, gradients are summed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from .errors import DimError, EmptyVocabError, MissingLemmaError, ParseError, ZeroVectorError
from .lexicon import CopyEntries, Lexicon, Reject, edit_lexicon
from .textproc import LemmaSequence

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingConfig:
    dimension: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    min_count: int = 5
    subsample_threshold: float = 1e-4
    learning_rate: float = 0.025
    seed: int = 0
    batch_size: int = 256

    def __post_init__(self):
        for name in ("dimension", "window", "negatives", "epochs", "min_count", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.subsample_threshold <= 0 or self.learning_rate <= 0:
            raise ValueError("subsample_threshold and learning_rate must be positive")


@dataclass
class EmbeddingModel:
    words: list[str]
    vectors: np.ndarray
    config: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    corpus_fingerprint: str = ""

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.words):
            raise DimError(f"vector matrix shape {self.vectors.shape} does not match {len(self.words)} words")
        self.index = {w: i for i, w in enumerate(self.words)}

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, word):
        return word in self.index

    def __len__(self):
        return len(self.words)

    def __getitem__(self, word) -> np.ndarray:
        return self.vectors[self.index[word]]

    def metadata(self) -> dict:
        return {
            "vocab_size": len(self.words),
            "dimension": self.dimension,
            "config": asdict(self.config),
            "corpus_fingerprint": self.corpus_fingerprint,
        }


def corpus_fingerprint(seqs: Iterable[LemmaSequence]) -> str:
    h = hashlib.sha256()
    for seq in seqs:
        for sent in seq.sentences():
            h.update("\x1f".join(t.lemma for t in sent if t.is_word).encode("utf-8"))
            h.update(b"\x1e")
        h.update(b"\x1d")
    return h.hexdigest()


def _sentences(seqs: Iterable[LemmaSequence]) -> list[list[str]]:
    return [[t.lemma for t in sent if t.is_word] for seq in seqs for sent in seq.sentences()]


def train_sgns(seqs: Sequence[LemmaSequence], cfg: EmbeddingConfig = EmbeddingConfig()) -> EmbeddingModel:
    """Train word vectors on the word-token lemmas of ``seqs``.

    Pairs are taken within ``cfg.window`` positions of each center inside a
    sentence, negatives come from the unigram distribution raised to 3/4, and
    frequent words are subsampled with word2vec's keep probability
    ``(sqrt(f / t) + 1) * t / f``. The learning rate decays linearly to
    ``1e-4`` of its start value.
    """
    seqs = list(seqs)
    sentences = _sentences(seqs)
    counts = Counter(w for s in sentences for w in s)
    vocab = sorted((w for w, c in counts.items() if c >= cfg.min_count), key=lambda w: (-counts[w], w))
    if not vocab:
        raise EmptyVocabError(f"no lemma occurs at least min_count={cfg.min_count} times")
    index = {w: i for i, w in enumerate(vocab)}
    freq = np.array([counts[w] for w in vocab], dtype=np.float64)
    total = freq.sum()

    rng = np.random.default_rng(cfg.seed)
    dim = cfg.dimension
    w_in = (rng.random((len(vocab), dim)) - 0.5) / dim
    w_out = np.zeros((len(vocab), dim))

    noise = freq ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())
    noise_cdf[-1] = 1.0

    ratio = freq / (cfg.subsample_threshold * total)
    keep_prob = np.minimum(1.0, (np.sqrt(ratio) + 1.0) / ratio)

    encoded = [np.array([index[w] for w in s if w in index], dtype=np.int64) for s in sentences]
    encoded = [s for s in encoded if len(s) > 1]

    # upper bound on pairs, used for the learning-rate schedule
    est_pairs = cfg.epochs * sum(_pair_count(len(s), cfg.window) for s in encoded) * float(keep_prob.mean())
    est_pairs = max(est_pairs, 1.0)
    seen = 0
    lr0 = cfg.learning_rate
    min_lr = lr0 * 1e-4

    for _epoch in range(cfg.epochs):
        centers_buf: list[np.ndarray] = []
        contexts_buf: list[np.ndarray] = []
        buffered = 0
        for sent in encoded:
            kept = sent[rng.random(len(sent)) < keep_prob[sent]]
            if len(kept) < 2:
                continue
            c, o = _pairs(kept, cfg.window)
            centers_buf.append(c)
            contexts_buf.append(o)
            buffered += len(c)
            if buffered >= cfg.batch_size:
                seen = _flush(centers_buf, contexts_buf, w_in, w_out, noise_cdf, rng, cfg, seen, est_pairs, lr0, min_lr)
                centers_buf, contexts_buf, buffered = [], [], 0
        if buffered:
            seen = _flush(centers_buf, contexts_buf, w_in, w_out, noise_cdf, rng, cfg, seen, est_pairs, lr0, min_lr)

    return EmbeddingModel(vocab, w_in, cfg, corpus_fingerprint(seqs))


def _pair_count(n: int, window: int) -> int:
    return sum(min(window, i) + min(window, n - 1 - i) for i in range(n))


def _pairs(sent: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    n = len(sent)
    centers, contexts = [], []
    for off in range(1, min(window, n - 1) + 1):
        centers.append(sent[:-off])
        contexts.append(sent[off:])
        centers.append(sent[off:])
        contexts.append(sent[:-off])
    return np.concatenate(centers), np.concatenate(contexts)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _flush(centers_buf, contexts_buf, w_in, w_out, noise_cdf, rng, cfg, seen, est_pairs, lr0, min_lr):
    centers = np.concatenate(centers_buf)
    contexts = np.concatenate(contexts_buf)
    for lo in range(0, len(centers), cfg.batch_size):
        c = centers[lo : lo + cfg.batch_size]
        o = contexts[lo : lo + cfg.batch_size]
        b = len(c)
        lr = max(min_lr, lr0 * (1.0 - seen / est_pairs))
        seen += b
        neg = np.searchsorted(noise_cdf, rng.random((b, cfg.negatives)), side="right")
        neg = np.minimum(neg, len(noise_cdf) - 1)

        v = w_in[c]                                   # (b, d)
        u_pos = w_out[o]                              # (b, d)
        u_neg = w_out[neg]                            # (b, k, d)
        g_pos = 1.0 - _sigmoid(np.einsum("bd,bd->b", v, u_pos))          # (b,)
        s_neg = _sigmoid(np.einsum("bd,bkd->bk", v, u_neg))              # (b, k)
        s_neg = np.where(neg == o[:, None], 0.0, s_neg)                  # skip accidental positives

        grad_v = g_pos[:, None] * u_pos - np.einsum("bk,bkd->bd", s_neg, u_neg)
        np.add.at(w_out, o, lr * g_pos[:, None] * v)
        np.add.at(w_out, neg.ravel(), (-lr * s_neg[:, :, None] * v[:, None, :]).reshape(-1, v.shape[1]))
        np.add.at(w_in, c, lr * grad_v)
    return seen


# --- persistence --------------------------------------------------------------


def save_model(model: EmbeddingModel, path: Union[str, os.PathLike], with_metadata: bool = True) -> None:
    """word2vec text format; metadata goes to ``<path>.meta.json``."""
    from .io import atomic_write_text

    lines = [f"{len(model.words)} {model.dimension}\n"]
    for w, vec in zip(model.words, model.vectors):
        lines.append(w + " " + " ".join(repr(float(x)) for x in vec) + "\n")
    atomic_write_text(path, "".join(lines))
    if with_metadata:
        atomic_write_text(os.fspath(path) + ".meta.json", json.dumps(model.metadata(), indent=1, sort_keys=True) + "\n")


def load_vectors(path: Union[str, os.PathLike, TextIO]) -> EmbeddingModel:
    """Load text-format vectors (``word v1 ... vd`` per line, header optional)."""
    if isinstance(path, (str, os.PathLike)):
        with open(path, encoding="utf-8") as fh:
            model = load_vectors(fh)
        meta_path = os.fspath(path) + ".meta.json"
        if os.path.exists(meta_path):
            with open(meta_path, encoding="utf-8") as fh:
                meta = json.load(fh)
            model.config = EmbeddingConfig(**meta.get("config", {}))
            model.corpus_fingerprint = meta.get("corpus_fingerprint", "")
        return model

    words, rows = [], []
    dim = None
    declared = None
    for lineno, line in enumerate(path, 1):
        parts = line.rstrip("\n").split(" ")
        parts = [p for p in parts if p]
        if not parts:
            continue
        if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
            declared = (int(parts[0]), int(parts[1]))
            dim = declared[1]
            continue
        try:
            vec = [float(x) for x in parts[1:]]
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if dim is None:
            dim = len(vec)
        if len(vec) != dim or dim == 0:
            raise ParseError(f"expected {dim} components, got {len(vec)}", lineno)
        words.append(parts[0])
        rows.append(vec)
    if declared is not None and declared[0] != len(words):
        raise ParseError(f"header declares {declared[0]} words, found {len(words)}")
    vectors = np.array(rows, dtype=np.float64).reshape(len(words), dim or 0)
    return EmbeddingModel(words, vectors, EmbeddingConfig(dimension=max(dim or 1, 1)))


# --- similarity -------------------------------------------------------------


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine is undefined for a zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def _unit_rows(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(norms > 0, m / norms, 0.0)


def nearest(model: EmbeddingModel, word: str, pool: Sequence[str]) -> Optional[tuple[str, float]]:
    """Most cosine-similar word of ``pool`` (ties: smallest lemma)."""
    pool = sorted(w for w in set(pool) if w in model and w != word)
    if not pool or not np.any(model[word]):
        return None
    unit = _unit_rows(model.vectors[[model.index[w] for w in pool]])
    q = model[word] / np.linalg.norm(model[word])
    sims = np.clip(unit @ q, -1.0, 1.0)
    best = int(np.argmax(sims))
    return pool[best], float(sims[best])


# --- expansion --------------------------------------------------------------

PENDING, ACCEPTED, REJECTED = "pending", "accepted", "rejected"


@dataclass(frozen=True)
class ExpansionProposal:
    candidate: str
    source: str
    cosine: float
    proposed_entries: tuple[tuple[str, float], ...]
    status: str = PENDING

    @property
    def id(self) -> str:
        return self.candidate

    def to_json(self) -> dict:
        return {
            "candidate": self.candidate,
            "source": self.source,
            "cosine": self.cosine,
            "proposed_entries": [list(p) for p in self.proposed_entries],
            "status": self.status,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExpansionProposal":
        return cls(
            obj["candidate"],
            obj["source"],
            float(obj["cosine"]),
            tuple((e, float(i)) for e, i in obj["proposed_entries"]),
            obj.get("status", PENDING),
        )


@dataclass
class ExpansionScan:
    proposals: list[ExpansionProposal]
    near_misses: list[ExpansionProposal]
    skipped: list[str]
    threshold: float


def scan_expansions(
    model: EmbeddingModel, lex: Lexicon, candidates: Iterable[str], threshold: float = 0.5
) -> ExpansionScan:
    """Nearest in-lexicon neighbour for every out-of-lexicon candidate.

    Candidates at or above ``threshold`` become proposals; the rest are kept
    as near misses. Candidates missing from the model are listed in
    ``skipped``. Both lists are sorted by cosine, descending, then candidate.
    """
    if not (0.0 < threshold <= 1.0):
        raise ValueError("threshold must be in (0, 1]")
    pool = [w for w in lex.lemmas if w in model and np.any(model[w])]
    unit = _unit_rows(model.vectors[[model.index[w] for w in pool]]) if pool else None
    proposals, misses, skipped = [], [], []
    seen = set()
    for cand in candidates:
        if cand in seen or cand in lex:
            continue
        seen.add(cand)
        if cand not in model or not np.any(model[cand]):
            skipped.append(cand)
            continue
        if unit is None:
            continue
        q = model[cand] / np.linalg.norm(model[cand])
        sims = np.clip(unit @ q, -1.0, 1.0)
        best = int(np.argmax(sims))  # first maximum = lexicographically smallest lemma
        source = pool[best]
        prop = ExpansionProposal(cand, source, float(sims[best]), lex.entries_for(source))
        (proposals if prop.cosine >= threshold else misses).append(prop)
    key = lambda p: (-p.cosine, p.candidate)
    return ExpansionScan(sorted(proposals, key=key), sorted(misses, key=key), skipped, threshold)


def propose_expansions(
    model: EmbeddingModel, lex: Lexicon, candidates: Iterable[str], threshold: float = 0.5
) -> list[ExpansionProposal]:
    return scan_expansions(model, lex, candidates, threshold).proposals


def apply_proposals(lex: Lexicon, proposals: Sequence[ExpansionProposal], accepted: Iterable[str]) -> Lexicon:
    """Copy entries for accepted proposals; log the rest as rejections."""
    accepted = set(accepted)
    ids = {p.id for p in proposals}
    unknown = accepted - ids
    if unknown:
        raise ValueError(f"accepted ids not among proposals: {sorted(unknown)}")
    for p in proposals:
        if p.id in accepted:
            if p.source not in lex:
                raise MissingLemmaError(f"proposal {p.id!r}: source {p.source!r} no longer in lexicon")
            lex = edit_lexicon(lex, CopyEntries(p.source, p.candidate, p.cosine))
        else:
            lex = edit_lexicon(lex, Reject(p.candidate, p.source, p.cosine))
    return lex


def write_proposals(proposals: Iterable[ExpansionProposal], stream: TextIO) -> None:
    for p in proposals:
        stream.write(json.dumps(p.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def read_proposals(stream: TextIO) -> list[ExpansionProposal]:
    return [ExpansionProposal.from_json(json.loads(line)) for line in stream if line.strip()]


def read_accepted(stream: TextIO) -> list[str]:
    """Plain text, one accepted candidate lemma per line; ``#`` comments."""
    out = []
    for line in stream:
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out
