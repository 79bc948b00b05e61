"""Relation records and their flat string serialization.

A record ties a company to one extracted variable: ``company, variable_name,
variable_value, variable_date``.  A paragraph's full output is the records
rendered in that order and joined with a ``|`` separator, e.g.::

    Jumia, revenue, €41 million, Q4 2020| Jumia, revenue, €33.7 million, Q3 2020|

Dates may contain commas ("March 3, 2021"); parsing therefore splits each
record on its first three commas only.  Company and value fields must not
contain commas or pipes, which is enforced at construction time so a record
can never serialize into something that parses differently.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._fileio import atomic_write_text, iter_jsonl, jsonl_dumps

VARIABLE_NAMES = ("founder", "country", "revenue", "customers/users", "investment")

UNKNOWN_DATE = "unknown-date"

RECORD_SEPARATOR = "|"


class RecordError(ValueError):
    """Raised for invalid record fields or unparsable record strings."""


def _check_field(name: str, value: str, allow_comma: bool = False) -> None:
    if not isinstance(value, str) or not value:
        raise RecordError(f"{name} must be a non-empty string, got {value!r}")
    if value != value.strip():
        raise RecordError(f"{name} must not have leading/trailing whitespace: {value!r}")
    if RECORD_SEPARATOR in value:
        raise RecordError(f"{name} must not contain {RECORD_SEPARATOR!r}: {value!r}")
    if not allow_comma and "," in value:
        raise RecordError(f"{name} must not contain commas: {value!r}")


@dataclass(frozen=True)
class RelationRecord:
    """One extracted fact: a company plus a named variable, value, and date."""

    company: str
    variable_name: str
    variable_value: str
    variable_date: str = UNKNOWN_DATE

    def __post_init__(self) -> None:
        _check_field("company", self.company)
        if self.variable_name not in VARIABLE_NAMES:
            raise RecordError(
                f"variable_name must be one of {VARIABLE_NAMES}, got {self.variable_name!r}"
            )
        _check_field("variable_value", self.variable_value)
        _check_field("variable_date", self.variable_date, allow_comma=True)


def serialize(records: list[RelationRecord]) -> str:
    """Render records as the pipe-separated target string.

    Each record becomes ``company, name, value, date`` and is terminated by
    ``|``; consecutive records are separated by a single space after the pipe.
    An empty list renders as the empty string.  A missing date is rendered as
    the literal ``unknown-date`` so every record keeps four positional fields.
    """
    rendered = [
        f"{r.company}, {r.variable_name}, {r.variable_value}, {r.variable_date}"
        for r in records
    ]
    if not rendered:
        return ""
    return f"{RECORD_SEPARATOR} ".join(rendered) + RECORD_SEPARATOR


def parse(s: str) -> list[RelationRecord]:
    """Parse a serialized target string back into records.

    Splits on ``|``, trims each segment, and splits a segment on its first
    three commas so dates containing commas survive.  The empty string parses
    to an empty list.  Raises :class:`RecordError` for segments with fewer
    than three commas or with a variable name outside the known inventory.
    """
    records: list[RelationRecord] = []
    for segment in s.split(RECORD_SEPARATOR):
        segment = segment.strip()
        if not segment:
            continue
        parts = segment.split(",", 3)
        if len(parts) < 4:
            raise RecordError(f"record {segment!r} has fewer than four comma-separated fields")
        company, name, value, date = (p.strip() for p in parts)
        records.append(RelationRecord(company, name, value, date))
    return records


def load_predictions(path) -> dict[str, str]:
    """Load a prediction file (one ``{id, predicted_text}`` object per line)."""
    predictions: dict[str, str] = {}
    for lineno, obj in iter_jsonl(path):
        if "id" not in obj or "predicted_text" not in obj:
            raise RecordError(f"line {lineno}: prediction needs 'id' and 'predicted_text' fields")
        pred_id = str(obj["id"])
        if pred_id in predictions:
            raise RecordError(f"line {lineno}: duplicate prediction id {pred_id!r}")
        predictions[pred_id] = str(obj["predicted_text"])
    return predictions


def save_predictions(pairs: list[tuple[str, str]], path) -> None:
    """Write (id, predicted_text) pairs as a prediction file, atomically."""
    atomic_write_text(
        path, jsonl_dumps({"id": i, "predicted_text": t} for i, t in pairs)
    )


def _normalize(record: RelationRecord) -> tuple[str, str, str, str]:
    fields = (record.company, record.variable_name, record.variable_value, record.variable_date)
    return tuple(" ".join(f.casefold().split()) for f in fields)  # type: ignore[return-value]


def record_set_equal(a: list[RelationRecord], b: list[RelationRecord]) -> bool:
    """Multiset equality of two record lists, case- and whitespace-insensitive."""
    return sorted(_normalize(r) for r in a) == sorted(_normalize(r) for r in b)
