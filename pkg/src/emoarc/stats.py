"""Token-level permutation test for differences in normalized emotion scores."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .arcs import PER
from .errors import EmptyDocumentError
from .lexicon import Lexicon
from .textproc import LemmaSequence

TIE_TOLERANCE = 1e-9
BATCH_CELLS = 2_000_000


@dataclass(frozen=True)
class SignificanceResult:
    emotion: str
    observed_diff: float
    p_value: float
    n_permutations: int
    seed: int

    def to_json(self) -> dict:
        return asdict(self)


def token_values(seq: LemmaSequence, lex: Lexicon, emotion: str) -> list[float]:
    """Per-word-token intensity for ``emotion`` (0.0 when not in the lexicon)."""
    if emotion not in lex.emotions:
        raise KeyError(f"emotion {emotion!r} not in lexicon set {lex.emotions}")
    return [lex.intensity(t.lemma, emotion) for t in seq.tokens if t.is_word]


def _diff(sum_a: float, n_a: int, sum_b: float, n_b: int) -> float:
    return PER * (sum_a / n_a - sum_b / n_b)


def _p_from_values(a: list[float], b: list[float], n_permutations: int, seed: int) -> tuple[float, float]:
    n_a, n_b = len(a), len(b)
    observed = _diff(math.fsum(a), n_a, math.fsum(b), n_b)
    # mathematically tied differences can land a few ulps apart
    target = abs(observed) - TIE_TOLERANCE * max(abs(observed), 1.0)
    pooled = np.array(a + b, dtype=np.float64)
    n = len(pooled)
    # Only tokens with a non-zero value move the sums, so a random regrouping
    # reduces to deciding, for each of them, whether it lands in group A.
    values = pooled[pooled != 0.0]
    m = len(values)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    batch = max(1, min(n_permutations, BATCH_CELLS // max(m, 1)))
    while done < n_permutations:
        size = min(batch, n_permutations - done)
        in_a = np.zeros((size, m), dtype=bool)
        left_a = np.full(size, n_a, dtype=np.int64)
        for j in range(m):
            take = rng.random(size) * (n - j) < left_a
            in_a[:, j] = take
            left_a -= take
        sum_a = (in_a * values).sum(axis=1)
        sum_b = (~in_a * values).sum(axis=1)
        d = PER * (sum_a / n_a - sum_b / n_b)
        hits += int(np.count_nonzero(np.abs(d) >= target))
        done += size
    return observed, (1 + hits) / (1 + n_permutations)


def permutation_test(
    seq_a: LemmaSequence,
    seq_b: LemmaSequence,
    lex: Lexicon,
    emotion: str,
    n_permutations: int = 9999,
    seed: int = 0,
) -> SignificanceResult:
    """Two-sided permutation test on the per-10k score difference A - B.

    All word tokens are pooled and reassigned to groups of the original sizes;
    ``p = (1 + #{|perm diff| >= |observed|}) / (1 + n_permutations)``, where
    ``>=`` allows a relative slack of ``TIE_TOLERANCE`` for rounding.
    """
    if n_permutations < 1:
        raise ValueError("n_permutations must be >= 1")
    a = token_values(seq_a, lex, emotion)
    b = token_values(seq_b, lex, emotion)
    if not a or not b:
        raise EmptyDocumentError("both documents need at least one word token")
    observed, p = _p_from_values(a, b, n_permutations, seed)
    return SignificanceResult(emotion, observed, p, n_permutations, seed)


def exact_permutation_p(a: list[float], b: list[float]) -> float:
    """Exhaustive-enumeration p-value (share of all regroupings with |diff| >= |observed|).

    Exponential in the pooled size; intended for small inputs and for checking
    :func:`permutation_test`.
    """
    pooled = [Fraction(x) for x in a + b]
    n_a, n_b = len(a), len(b)
    total = sum(pooled, Fraction(0))

    def stat(sum_a):
        return abs(sum_a / n_a - (total - sum_a) / n_b)

    observed = stat(sum(pooled[:n_a], Fraction(0)))
    hits = count = 0
    for idx in combinations(range(len(pooled)), n_a):
        count += 1
        if stat(sum((pooled[i] for i in idx), Fraction(0))) >= observed:
            hits += 1
    return hits / count
