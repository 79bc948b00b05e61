"""Pairwise relation heuristics over dependency trees, and their integration.

The extractors walk a paragraph's dependency trees to decide which detected
entities belong together:

* money-company: a money token that is an attribute/direct object is tied to
  a subject found among its left ancestors (strategy a) or, when no subject
  exists, to an organization among its verb's children (strategy b); a money
  token that is a prepositional object takes the preposition head's noun
  chunk as its monetary variable and ties to an organization among the
  children of that head's governing verb (strategy c).
* company-date: prepositions around the company token are checked for date
  children (a); a direct-object company checks its verb's children (b); a
  prepositional-object company checks the descendants of a proper-noun
  preposition head and of the preposition's ancestral verb (c).
* the remaining pairs (company-country, company-person, money-date,
  person-country) use a shared-governor rule: two entity roots relate when
  they share their nearest governing verb or one lies in the other's
  subtree, nearest pair winning ties.

All heuristics are tree-local, so related entities always share a sentence.
``extract`` integrates the pairwise relations into ordered
:class:`~finrelex.records.RelationRecord` lists, classifying money bridges
as revenue/investment and person mentions as founders.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import deptree as dt
from . import semvec
from .corpus import EntitySpan, NounChunk
from .records import UNKNOWN_DATE, RecordError, RelationRecord

logger = logging.getLogger(__name__)

COMPANY_MONEY = "company-money"
COMPANY_DATE = "company-date"
COMPANY_COUNTRY = "company-country"
COMPANY_PERSON = "company-person"
MONEY_DATE = "money-date"
PERSON_COUNTRY = "person-country"

KIND_LABELS = {
    COMPANY_MONEY: ("ORG", "MONEY"),
    COMPANY_DATE: ("ORG", "DATE"),
    COMPANY_COUNTRY: ("ORG", "GPE"),
    COMPANY_PERSON: ("ORG", "PERSON"),
    MONEY_DATE: ("MONEY", "DATE"),
    PERSON_COUNTRY: ("PERSON", "GPE"),
}

LINK_DEPS = frozenset({"appos", "conj"})


@dataclass(frozen=True)
class PairwiseRelation:
    kind: str
    left: EntitySpan
    right: EntitySpan
    bridge_phrase: str | None = None

    def __post_init__(self) -> None:
        expected = KIND_LABELS[self.kind]
        if (self.left.label, self.right.label) != expected:
            raise ValueError(
                f"{self.kind} relation requires labels {expected}, "
                f"got ({self.left.label}, {self.right.label})"
            )


def _spans(view: dt.TreeView, label: str) -> list[EntitySpan]:
    return [e for e in view.document.entities if e.label == label]


def _chunk_text(view: dt.TreeView, chunk: NounChunk | None) -> str | None:
    if chunk is None:
        return None
    return view.document.span_text(chunk.start, chunk.end)


def _anchor(view: dt.TreeView, t: int) -> int:
    """Follow an appositive/conjunct edge one hop up, so modifiers attached
    to the apposition count as the entity's own context."""
    if view.document.tokens[t].dep in LINK_DEPS:
        return view.document.tokens[t].head
    return t


def _org_span_at(view: dt.TreeView, t: int) -> EntitySpan | None:
    """Organization span at ``t``, following appos/conj edges one hop."""
    span = dt.entity_at(view, t)
    if span is not None and span.label == "ORG":
        return span
    for child in dt.children(view, t):
        if view.document.tokens[child].dep in LINK_DEPS:
            linked = dt.entity_at(view, child)
            if linked is not None and linked.label == "ORG":
                return linked
    if view.document.tokens[t].dep in LINK_DEPS:
        linked = dt.entity_at(view, view.document.tokens[t].head)
        if linked is not None and linked.label == "ORG":
            return linked
    return None


def _date_span_at(view: dt.TreeView, t: int) -> EntitySpan | None:
    span = dt.entity_at(view, t)
    if span is not None and span.label == "DATE":
        return span
    return None


def _is_prep_token(view: dt.TreeView, t: int) -> bool:
    tok = view.document.tokens[t]
    return tok.dep == "prep" or tok.pos == "ADP"


def _find_left_subject(view: dt.TreeView, t: int) -> int | None:
    """First subject token preceding ``t`` among its left ancestors and
    their children, nearest ancestor first."""
    for a in dt.ancestors(view, t):
        if a >= t:
            continue
        if dt.is_subject(view, a):
            return a
        for child in dt.children(view, a):
            if child < t and dt.is_subject(view, child):
                return child
    return None


def _nearest_org_child(view: dt.TreeView, verb: int, t: int) -> EntitySpan | None:
    """Organization span among the verb's children nearest to token ``t``."""
    best: tuple[int, int, EntitySpan] | None = None
    for child in dt.children(view, verb):
        span = _org_span_at(view, child)
        if span is None:
            continue
        key = (abs(child - t), child)
        if best is None or key < best[:2]:
            best = (*key, span)
    return best[2] if best else None


def _note(trace: list[str] | None, message: str) -> None:
    if trace is not None:
        trace.append(message)


def relate_money_company(view: dt.TreeView, trace: list[str] | None = None) -> list[PairwiseRelation]:
    """Tie each money entity to at most one organization."""
    relations = []
    for money in _spans(view, "MONEY"):
        t = dt.entity_root(view, money)
        org: EntitySpan | None = None
        bridge: str | None = None
        path = None
        if dt.is_attr(view, t) or dt.is_direct_object(view, t):
            subject = _find_left_subject(view, t)
            if subject is not None:
                candidate = _org_span_at(view, subject)
                if candidate is not None:
                    org, path = candidate, "a"
                    bridge = _chunk_text(view, dt.noun_chunk_of(view, t))
            else:
                verb = dt.governing_verb(view, t)
                if verb is not None:
                    candidate = _nearest_org_child(view, verb, t)
                    if candidate is not None:
                        org, path = candidate, "b"
                        bridge = _chunk_text(view, dt.noun_chunk_of(view, t))
        elif dt.is_prepositional_object(view, t):
            prep = view.document.tokens[t].head
            prep_head = view.document.tokens[prep].head
            verb = dt.governing_verb(view, prep_head)
            if verb is not None:
                candidate = _nearest_org_child(view, verb, t)
                if candidate is not None:
                    org, path = candidate, "c"
                    bridge = _chunk_text(view, dt.noun_chunk_of(view, prep_head))
        if org is not None:
            relations.append(PairwiseRelation(COMPANY_MONEY, org, money, bridge))
            _note(trace, f"company-money path ({path}): {org.text} -> {money.text} via bridge {bridge!r}")
    return relations


def relate_company_date(view: dt.TreeView, trace: list[str] | None = None) -> list[PairwiseRelation]:
    """Tie organizations to dates; duplicates are emitted once."""
    relations = []
    seen: set[tuple[int, int, int, int]] = set()

    def emit(org: EntitySpan, date: EntitySpan, path: str) -> None:
        key = (org.start, org.end, date.start, date.end)
        if key in seen:
            return
        seen.add(key)
        relations.append(PairwiseRelation(COMPANY_DATE, org, date))
        _note(trace, f"company-date path ({path}): {org.text} -> {date.text}")

    for org in _spans(view, "ORG"):
        c = _anchor(view, dt.entity_root(view, org))
        head = view.document.tokens[c].head

        prepositions = {p for p in dt.subtree(view, c) if _is_prep_token(view, p)}
        prepositions.update(p for p in dt.children(view, head) if _is_prep_token(view, p))
        for prep in sorted(prepositions):
            for child in dt.children(view, prep):
                date = _date_span_at(view, child)
                if date is not None:
                    emit(org, date, "a")

        if dt.is_direct_object(view, c):
            verb = dt.governing_verb(view, c)
            if verb is not None:
                for child in dt.children(view, verb):
                    date = _date_span_at(view, child)
                    if date is not None:
                        emit(org, date, "b")

        if dt.is_prepositional_object(view, c):
            prep = view.document.tokens[c].head
            prep_head = view.document.tokens[prep].head
            if view.document.tokens[prep_head].pos == "PROPN":
                for desc in dt.subtree(view, prep_head):
                    date = _date_span_at(view, desc)
                    if date is not None:
                        emit(org, date, "c")
            verb = dt.governing_verb(view, prep)
            if verb is not None:
                for desc in dt.subtree(view, verb):
                    date = _date_span_at(view, desc)
                    if date is not None:
                        emit(org, date, "c")
    return relations


def _related(view: dt.TreeView, left_root: int, right_root: int) -> bool:
    tokens = view.document.tokens
    if tokens[left_root].sentence != tokens[right_root].sentence:
        return False
    left_verb = dt.governing_verb(view, left_root)
    right_verb = dt.governing_verb(view, right_root)
    if left_verb is not None and left_verb == right_verb:
        return True
    return right_root in dt.subtree(view, left_root) or left_root in dt.subtree(view, right_root)


def relate_other_pairs(view: dt.TreeView, trace: list[str] | None = None) -> list[PairwiseRelation]:
    """Shared-governor pairing for the four remaining relation kinds.

    Each right-hand entity pairs with its nearest related left-hand entity
    (token distance between roots, leftmost on ties).
    """
    relations = []
    for kind in (COMPANY_COUNTRY, COMPANY_PERSON, MONEY_DATE, PERSON_COUNTRY):
        left_label, right_label = KIND_LABELS[kind]
        lefts = _spans(view, left_label)
        if not lefts:
            continue
        for right in _spans(view, right_label):
            right_root = dt.entity_root(view, right)
            best: tuple[int, int, EntitySpan] | None = None
            for left in lefts:
                left_root = dt.entity_root(view, left)
                anchored = _anchor(view, left_root) if left_label == "ORG" else left_root
                if not _related(view, anchored, right_root):
                    continue
                key = (abs(left_root - right_root), left_root)
                if best is None or key < best[:2]:
                    best = (*key, left)
            if best is not None:
                relations.append(PairwiseRelation(kind, best[2], right))
                _note(trace, f"{kind} shared-governor: {best[2].text} -> {right.text}")
    return relations


def _person_context(view: dt.TreeView, person: EntitySpan) -> str:
    """Noun-phrase context governing a person mention, used for the founder
    classifier: the chunk (or text) of the mention's governor plus the chunks
    of any appositions hanging off the mention."""
    tokens = view.document.tokens
    p = dt.entity_root(view, person)
    if dt.is_prepositional_object(view, p):
        governor = tokens[tokens[p].head].head
    else:
        governor = tokens[p].head
    parts = [_chunk_text(view, dt.noun_chunk_of(view, governor)) or tokens[governor].text]
    for child in dt.children(view, p):
        if tokens[child].dep == "appos":
            parts.append(_chunk_text(view, dt.noun_chunk_of(view, child)) or tokens[child].text)
    return " ".join(parts)


def _nearest_date(
    candidates: list[EntitySpan], view: dt.TreeView, reference_root: int
) -> EntitySpan | None:
    if not candidates:
        return None
    return min(candidates, key=lambda d: (abs(dt.entity_root(view, d) - reference_root), d.start))


def extract(
    view: dt.TreeView,
    table: semvec.EmbeddingTable,
    lex: semvec.LexiconConfig,
    trace: list[str] | None = None,
) -> list[RelationRecord]:
    """Integrate all pairwise relations of a paragraph into ordered records.

    Money relations become revenue/investment records via the bridge-phrase
    classifier (an unknown verdict drops the record); the nearest related
    date, if any, fills the money record's date field.  Person relations
    become founder records only on a founder verdict; country relations pass
    through directly.  Records are ordered by company root token index, then
    by value span start.  A value that cannot form a well-formed record
    (embedded separator characters) is dropped with a warning.
    """
    money_rels = relate_money_company(view, trace)
    date_rels = relate_company_date(view, trace)
    other_rels = relate_other_pairs(view, trace)
    money_dates = [r for r in other_rels if r.kind == MONEY_DATE]

    rows: list[tuple[int, int, RelationRecord]] = []

    def add(company: EntitySpan, name: str, value_span: EntitySpan, date_text: str) -> None:
        try:
            record = RelationRecord(company.text, name, value_span.text, date_text)
        except RecordError as exc:
            logger.warning("dropping unserializable record from document %s: %s", view.document.id, exc)
            _note(trace, f"dropped record ({exc})")
            return
        rows.append((dt.entity_root(view, company), value_span.start, record))

    for rel in money_rels:
        label = semvec.classify_money_phrase(table, lex, rel.bridge_phrase or "")
        _note(trace, f"classify money bridge {rel.bridge_phrase!r} -> {label}")
        if label == semvec.UNKNOWN:
            continue
        money_root = dt.entity_root(view, rel.right)
        candidates = [r.right for r in money_dates if r.left == rel.right]
        candidates += [r.right for r in date_rels if r.left == rel.left]
        date = _nearest_date(candidates, view, money_root)
        add(rel.left, label, rel.right, date.text if date else UNKNOWN_DATE)

    for rel in other_rels:
        if rel.kind == COMPANY_PERSON:
            context = _person_context(view, rel.right)
            verdict = semvec.classify_person_phrase(table, lex, rel.right.text, context)
            _note(trace, f"classify person {rel.right.text!r} (context {context!r}) -> {verdict}")
            if verdict == semvec.FOUNDER:
                add(rel.left, "founder", rel.right, UNKNOWN_DATE)
        elif rel.kind == COMPANY_COUNTRY:
            add(rel.left, "country", rel.right, UNKNOWN_DATE)

    rows.sort(key=lambda row: (row[0], row[1]))
    return [record for _, _, record in rows]
