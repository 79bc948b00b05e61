"""Static word embeddings and the phrase-similarity classifiers.

Money phrases ("a net income", "$10 million") are labeled revenue vs.
investment by comparing the phrase's mean word vector against two small
lexicons and taking the single most similar word; person mentions get the
same treatment against a founder lexicon.  A classification only sticks when
the winning similarity strictly exceeds the configured threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

REVENUE = "revenue"
INVESTMENT = "investment"
UNKNOWN = "unknown"
FOUNDER = "founder"
OTHER = "other"

DEFAULT_REVENUE_WORDS = ("revenue", "income", "earnings", "proceeds", "returns", "made")
DEFAULT_INVESTMENT_WORDS = ("raised", "investment", "received", "equity")
DEFAULT_FOUNDER_WORDS = ("founder", "co-founder", "cofounder", "founded", "started", "created")


class EmbeddingFormatError(ValueError):
    """Raised for malformed embedding or lexicon files."""


@dataclass(frozen=True)
class EmbeddingTable:
    """Case-folded word -> dense vector map of a fixed dimension."""

    dimension: int
    vectors: dict[str, np.ndarray]

    def lookup(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word.casefold())


@dataclass(frozen=True)
class LexiconConfig:
    revenue_words: tuple[str, ...] = DEFAULT_REVENUE_WORDS
    investment_words: tuple[str, ...] = DEFAULT_INVESTMENT_WORDS
    founder_words: tuple[str, ...] = DEFAULT_FOUNDER_WORDS
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if not self.revenue_words or not self.investment_words or not self.founder_words:
            raise ValueError("lexicon word lists must be non-empty")
        overlap = set(w.casefold() for w in self.revenue_words) & set(
            w.casefold() for w in self.investment_words
        )
        if overlap:
            raise ValueError(f"revenue and investment word lists overlap: {sorted(overlap)}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load a plain-text embedding file: one ``word v1 ... vD`` entry per line.

    An optional leading header line of two integers (vocabulary size and
    dimension) is tolerated and skipped.  The dimension is fixed by the first
    entry; duplicate words keep their first vector with a warning.
    """
    vectors: dict[str, np.ndarray] = {}
    dimension: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                except ValueError:
                    pass
                else:
                    continue
            word, values = parts[0].casefold(), parts[1:]
            if not values:
                raise EmbeddingFormatError(f"line {lineno}: entry {word!r} has no vector components")
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingFormatError(f"line {lineno}: unparsable vector component ({exc})") from exc
            if not np.all(np.isfinite(vec)):
                raise EmbeddingFormatError(f"line {lineno}: non-finite vector component")
            if dimension is None:
                dimension = len(vec)
            elif len(vec) != dimension:
                raise EmbeddingFormatError(
                    f"line {lineno}: expected {dimension} components, found {len(vec)}"
                )
            if word in vectors:
                logger.warning("duplicate embedding for %r at line %d; keeping first", word, lineno)
                continue
            vectors[word] = vec
    if dimension is None:
        raise EmbeddingFormatError(f"{path}: no embedding entries, dimension undeterminable")
    return EmbeddingTable(dimension=dimension, vectors=vectors)


def load_lexicon(path: str | Path) -> LexiconConfig:
    """Load a JSON lexicon override; missing fields fall back to defaults."""
    import json

    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise EmbeddingFormatError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise EmbeddingFormatError(f"{path}: expected a JSON object")
    kwargs = {}
    for key in ("revenue_words", "investment_words", "founder_words"):
        if key in obj:
            kwargs[key] = tuple(str(w) for w in obj[key])
    if "threshold" in obj:
        kwargs["threshold"] = float(obj["threshold"])
    try:
        return LexiconConfig(**kwargs)
    except ValueError as exc:
        raise EmbeddingFormatError(f"{path}: {exc}") from exc


def phrase_vector(table: EmbeddingTable, phrase: str) -> np.ndarray | None:
    """Mean vector of the phrase's in-vocabulary tokens, or ``None`` if all
    tokens are out of vocabulary."""
    found = [table.lookup(word) for word in phrase.split()]
    found = [v for v in found if v is not None]
    if not found:
        return None
    return np.mean(found, axis=0)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; a zero vector yields 0.0 with a warning."""
    nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        logger.warning("cosine of a zero vector is undefined; returning 0.0")
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def _best_match(
    table: EmbeddingTable, vec: np.ndarray, words: tuple[str, ...]
) -> tuple[str | None, float]:
    best_word, best_sim = None, -2.0
    for word in words:
        wvec = table.lookup(word)
        if wvec is None:
            continue
        sim = cosine(vec, wvec)
        if sim > best_sim:
            best_word, best_sim = word, sim
    return best_word, best_sim


def classify_money_phrase(table: EmbeddingTable, lex: LexiconConfig, phrase: str) -> str:
    """Label a money-describing phrase ``revenue``, ``investment``, or ``unknown``.

    The single lexicon word most similar to the phrase vector decides the
    group, provided its similarity strictly exceeds the threshold.  A fully
    out-of-vocabulary phrase, a sub-threshold winner, and an exact similarity
    tie between the two groups all yield ``unknown``.
    """
    vec = phrase_vector(table, phrase)
    if vec is None:
        return UNKNOWN
    rev_word, rev_sim = _best_match(table, vec, lex.revenue_words)
    inv_word, inv_sim = _best_match(table, vec, lex.investment_words)
    if rev_word is None and inv_word is None:
        return UNKNOWN
    best = max(rev_sim, inv_sim)
    if best <= lex.threshold:
        return UNKNOWN
    if rev_word is not None and inv_word is not None and rev_sim == inv_sim:
        return UNKNOWN
    return REVENUE if rev_sim > inv_sim else INVESTMENT


def classify_person_phrase(
    table: EmbeddingTable, lex: LexiconConfig, phrase: str, context: str
) -> str:
    """Label a person mention ``founder`` or ``other``.

    The mention and its governing noun-phrase context are pooled into one
    phrase vector and compared against the founder lexicon.
    """
    combined = f"{phrase} {context}".strip()
    vec = phrase_vector(table, combined)
    if vec is None:
        return OTHER
    word, sim = _best_match(table, vec, lex.founder_words)
    if word is None or sim <= lex.threshold:
        return OTHER
    return FOUNDER
