"""Annotated-document data model, file loaders, and dataset preparation.

Documents arrive pre-annotated: one JSON object per line carrying the
paragraph text, its tokens (with dependency heads), entity spans, and noun
chunks.  This module validates the annotation layers (head bounds, one root
per sentence, acyclicity, span bounds, non-overlap) and offers the two
corpus-preparation steps used before training/evaluation runs: an
information-deduplicated train/test split and a class-balanced subset.

Everything loaded here is immutable; all operations are pure given their
inputs and a seed, so documents can safely be processed in parallel.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from . import records as records_mod
from ._fileio import atomic_write_text, iter_jsonl, jsonl_dumps

logger = logging.getLogger(__name__)

POS_TAGS = frozenset(
    {
        "NOUN", "PROPN", "VERB", "ADJ", "ADV", "ADP", "DET", "NUM", "SYM",
        "PUNCT", "PRON", "AUX", "CCONJ", "SCONJ", "PART", "INTJ", "X",
    }
)

ENTITY_LABELS = frozenset({"ORG", "PERSON", "GPE", "MONEY", "DATE"})

ROOT_DEP = "ROOT"


class CorpusFormatError(ValueError):
    """Raised for malformed document or gold files (names the line number)."""


class DocumentValidationError(ValueError):
    """Raised when a document violates an annotation invariant (names the id)."""


class SplitInfeasibleError(RuntimeError):
    """Raised when the dedup constraint leaves no admissible test example."""


@dataclass(frozen=True)
class Token:
    """One token with its dependency attachment.

    ``head`` is the index of the governing token; a sentence root points at
    itself and carries the dependency label ``ROOT``.
    """

    index: int
    text: str
    lemma: str
    pos: str
    dep: str
    head: int
    sentence: int


@dataclass(frozen=True)
class EntitySpan:
    """A labeled token range, end-exclusive; ``text`` is the surface form."""

    start: int
    end: int
    label: str
    text: str


@dataclass(frozen=True)
class NounChunk:
    """A base noun phrase span with its syntactic head token."""

    start: int
    end: int
    root: int


@dataclass(frozen=True)
class AnnotatedDocument:
    id: str
    text: str
    tokens: tuple[Token, ...]
    entities: tuple[EntitySpan, ...]
    noun_chunks: tuple[NounChunk, ...]

    @cached_property
    def _char_offsets(self) -> tuple[tuple[int, int], ...] | None:
        """Character offsets per token, found by scanning the raw text.

        ``None`` when the tokens cannot be located left-to-right in the text;
        span extraction then falls back to space-joined token texts.
        """
        offsets: list[tuple[int, int]] = []
        cursor = 0
        for tok in self.tokens:
            pos = self.text.find(tok.text, cursor)
            if pos < 0:
                return None
            offsets.append((pos, pos + len(tok.text)))
            cursor = pos + len(tok.text)
        return tuple(offsets)

    def span_text(self, start: int, end: int) -> str:
        """Surface text of the token range [start, end)."""
        offsets = self._char_offsets
        if offsets is not None and start < end:
            return self.text[offsets[start][0] : offsets[end - 1][1]]
        return " ".join(t.text for t in self.tokens[start:end])


@dataclass(frozen=True)
class GoldExample:
    """A manually labeled paragraph: input text plus serialized target records.

    An empty ``target_text`` means the paragraph carries no relevant
    information.
    """

    id: str
    input_text: str
    target_text: str


def _require(obj: dict, key: str, lineno: int):
    if key not in obj:
        raise CorpusFormatError(f"line {lineno}: missing field {key!r}")
    return obj[key]


def _validate_document(doc_id: str, tokens: list[Token], entities: list[tuple[int, int, str]],
                       chunks: list[NounChunk]) -> None:
    n = len(tokens)

    def fail(msg: str) -> None:
        raise DocumentValidationError(f"document {doc_id!r}: {msg}")

    for pos_expected, tok in enumerate(tokens):
        if tok.index != pos_expected:
            fail(f"token index {tok.index} out of order (expected {pos_expected})")
        if tok.pos not in POS_TAGS:
            fail(f"token {tok.index}: unknown POS tag {tok.pos!r}")
        if not 0 <= tok.head < n:
            fail(f"token {tok.index}: head {tok.head} out of range for {n} tokens")
        if (tok.dep == ROOT_DEP) != (tok.head == tok.index):
            fail(f"token {tok.index}: dep {tok.dep!r} inconsistent with head {tok.head}")
        if tokens[tok.head].sentence != tok.sentence:
            fail(f"token {tok.index}: head crosses sentence boundary")
        if tok.sentence < 0:
            fail(f"token {tok.index}: negative sentence id")

    prev_sent = -1
    for tok in tokens:
        if tok.sentence not in (prev_sent, prev_sent + 1):
            fail(f"token {tok.index}: non-contiguous sentence id {tok.sentence}")
        prev_sent = tok.sentence

    sentences: dict[int, list[Token]] = {}
    for tok in tokens:
        sentences.setdefault(tok.sentence, []).append(tok)
    for sent_id, sent_tokens in sentences.items():
        roots = [t for t in sent_tokens if t.head == t.index]
        if len(roots) != 1:
            fail(f"sentence {sent_id}: expected exactly one root, found {len(roots)}")
        for tok in sent_tokens:
            seen = {tok.index}
            cur = tok
            while cur.head != cur.index:
                cur = tokens[cur.head]
                if cur.index in seen:
                    fail(f"token {tok.index}: cyclic head chain")
                seen.add(cur.index)

    spans = sorted(entities)
    for start, end, label in spans:
        if label not in ENTITY_LABELS:
            fail(f"entity [{start},{end}): unknown label {label!r}")
        if not 0 <= start < end <= n:
            fail(f"entity [{start},{end}): out of bounds for {n} tokens")
    for (s1, e1, l1), (s2, e2, l2) in zip(spans, spans[1:]):
        if s2 < e1:
            fail(f"entities [{s1},{e1}) {l1} and [{s2},{e2}) {l2} overlap")

    ordered = sorted(chunks, key=lambda c: c.start)
    for chunk in ordered:
        if not (0 <= chunk.start <= chunk.root < chunk.end <= n):
            fail(f"noun chunk [{chunk.start},{chunk.end}) root {chunk.root} out of bounds")
    for c1, c2 in zip(ordered, ordered[1:]):
        if c2.start < c1.end:
            fail(f"noun chunks [{c1.start},{c1.end}) and [{c2.start},{c2.end}) overlap")


def _document_from_dict(obj: dict, lineno: int) -> AnnotatedDocument:
    doc_id = str(_require(obj, "id", lineno))
    text = str(_require(obj, "text", lineno))
    tokens = []
    for tok_obj in _require(obj, "tokens", lineno):
        try:
            tokens.append(
                Token(
                    index=int(tok_obj["i"]),
                    text=str(tok_obj["text"]),
                    lemma=str(tok_obj["lemma"]),
                    pos=str(tok_obj["pos"]),
                    dep=str(tok_obj["dep"]),
                    head=int(tok_obj["head"]),
                    sentence=int(tok_obj["sent"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusFormatError(f"line {lineno}: bad token record ({exc})") from exc
    try:
        raw_entities = [
            (int(e["start"]), int(e["end"]), str(e["label"])) for e in _require(obj, "entities", lineno)
        ]
        chunks = [
            NounChunk(int(c["start"]), int(c["end"]), int(c["root"]))
            for c in _require(obj, "noun_chunks", lineno)
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusFormatError(f"line {lineno}: bad span record ({exc})") from exc

    _validate_document(doc_id, tokens, raw_entities, chunks)

    doc = AnnotatedDocument(
        id=doc_id,
        text=text,
        tokens=tuple(tokens),
        entities=(),
        noun_chunks=tuple(chunks),
    )
    entities = tuple(
        EntitySpan(start, end, label, doc.span_text(start, end)) for start, end, label in raw_entities
    )
    return AnnotatedDocument(doc.id, doc.text, doc.tokens, entities, doc.noun_chunks)


def load_documents(path: str | Path) -> list[AnnotatedDocument]:
    """Load and validate a line-delimited document file, in file order."""
    docs = []
    try:
        for lineno, obj in iter_jsonl(path):
            docs.append(_document_from_dict(obj, lineno))
    except ValueError as exc:
        if isinstance(exc, (CorpusFormatError, DocumentValidationError)):
            raise
        raise CorpusFormatError(str(exc)) from exc
    return docs


def document_to_dict(doc: AnnotatedDocument) -> dict:
    return {
        "id": doc.id,
        "text": doc.text,
        "tokens": [
            {
                "i": t.index,
                "text": t.text,
                "lemma": t.lemma,
                "pos": t.pos,
                "dep": t.dep,
                "head": t.head,
                "sent": t.sentence,
            }
            for t in doc.tokens
        ],
        "entities": [{"start": e.start, "end": e.end, "label": e.label} for e in doc.entities],
        "noun_chunks": [{"start": c.start, "end": c.end, "root": c.root} for c in doc.noun_chunks],
    }


def save_documents(docs: list[AnnotatedDocument], path: str | Path) -> None:
    atomic_write_text(path, jsonl_dumps(document_to_dict(d) for d in docs))


def load_gold(path: str | Path) -> list[GoldExample]:
    """Load gold (id, input_text, target_text) examples.

    Non-empty targets must parse under the record grammar; an empty target is
    legal and marks a no-information paragraph.
    """
    examples = []
    try:
        for lineno, obj in iter_jsonl(path):
            example = GoldExample(
                id=str(_require(obj, "id", lineno)),
                input_text=str(_require(obj, "input_text", lineno)),
                target_text=str(_require(obj, "target_text", lineno)),
            )
            if example.target_text.strip():
                try:
                    records_mod.parse(example.target_text)
                except records_mod.RecordError as exc:
                    raise CorpusFormatError(f"line {lineno}: bad target_text ({exc})") from exc
            examples.append(example)
    except ValueError as exc:
        if isinstance(exc, CorpusFormatError):
            raise
        raise CorpusFormatError(str(exc)) from exc
    return examples


def save_gold(examples: list[GoldExample], path: str | Path) -> None:
    atomic_write_text(
        path,
        jsonl_dumps(
            {"id": e.id, "input_text": e.input_text, "target_text": e.target_text} for e in examples
        ),
    )


def _info_content(example: GoldExample) -> Counter:
    if not example.target_text.strip():
        return Counter()
    parsed = records_mod.parse(example.target_text)
    return Counter(records_mod._normalize(r) for r in parsed)


def _contained(inner: Counter, outer: Counter) -> bool:
    return all(outer[key] >= count for key, count in inner.items())


def split_train_test(
    gold: list[GoldExample], test_fraction: float, seed: int
) -> tuple[list[GoldExample], list[GoldExample]]:
    """Seeded train/test split that never leaks information into the test set.

    Candidates are drawn from a uniform seeded shuffle (no stratification).
    A candidate joins the test set only if its parsed record multiset is
    neither equal to nor contained in the record multiset of any example left
    in the training side.  Rejected candidates stay in training and the draw
    continues until the requested size is met or candidates run out; running
    out yields a smaller test set plus a warning.  Note that a no-information
    candidate is contained in every training example, so such examples stay
    in training whenever anything else remains there.
    """
    if not gold:
        raise ValueError("gold corpus is empty")
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")

    target = round(test_fraction * len(gold))
    info = [_info_content(ex) for ex in gold]
    order = list(range(len(gold)))
    random.Random(seed).shuffle(order)

    picked: set[int] = set()
    for idx in order:
        if len(picked) >= target:
            break
        conflict = any(
            other != idx and other not in picked and _contained(info[idx], info[other])
            for other in range(len(gold))
        )
        if not conflict:
            picked.add(idx)

    if target > 0 and not picked:
        raise SplitInfeasibleError(
            "every candidate shares its information with a remaining training example; "
            "no test set satisfies the dedup constraint"
        )
    if len(picked) < target:
        logger.warning(
            "dedup constraint shrank the test set to %d examples (requested %d)",
            len(picked),
            target,
        )

    train = [ex for i, ex in enumerate(gold) if i not in picked]
    test = [ex for i, ex in enumerate(gold) if i in picked]
    return train, test


def balanced_subset(train: list[GoldExample], seed: int) -> list[GoldExample]:
    """All informative examples plus an equal seeded sample of empty ones.

    When fewer empty examples exist than informative ones, every empty example
    is kept and the shortfall is logged.
    """
    informative = [i for i, ex in enumerate(train) if ex.target_text.strip()]
    empty = [i for i, ex in enumerate(train) if not ex.target_text.strip()]
    if not informative:
        raise ValueError("training set has no informative examples to balance against")

    if len(empty) <= len(informative):
        chosen = empty
        if len(empty) < len(informative):
            logger.warning(
                "only %d empty examples available for %d informative ones",
                len(empty),
                len(informative),
            )
    else:
        chosen = random.Random(seed).sample(empty, len(informative))

    keep = set(informative) | set(chosen)
    return [ex for i, ex in enumerate(train) if i in keep]
