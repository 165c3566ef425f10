# src/biblink/model.py

"""
Corpus-independent document and citation data model.

Every other module consumes these types:

  - `AuthorName`, `SourceDescriptor`, `DocumentRecord`: one bibliographic
    document as ingested, with raw (un-normalized) numbering fields.
  - `Corpus`: the records of one data source, in ingestion order.
  - `CitationLink`: an ordered (citing, cited) pair inside one corpus.
  - `validate_corpus`: reports invariant violations as `ValidationIssue`s.

Records are pydantic models with `extra="forbid"`, so an NDJSON line with an
unknown field name is malformed. Sequences are tuples and models are frozen:
nothing is mutated after ingestion.

Example:
    >>> rec = DocumentRecord(record_id="S1", doi="10.1000/ABC", publication_year="2012")
    >>> corpus = Corpus("scopus", (rec,))
    >>> validate_corpus(corpus)
    []
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, NamedTuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class AuthorName(BaseModel):
    """An author as delivered by the data source.

    Some sources pre-split names (`last_name`/`first_name`), others only give
    `full_name`; `normalize.split_author` handles both.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    full_name: str | None = None
    last_name: str | None = None
    first_name: str | None = None

    @model_validator(mode="after")
    def _has_a_name(self) -> "AuthorName":
        if not (self.full_name or "").strip() and not (self.last_name or "").strip():
            raise ValueError("author needs full_name or last_name")
        return self


class SourceDescriptor(BaseModel):
    """Journal / book / proceedings a document appeared in."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    issns: tuple[str, ...] = ()
    isbns: tuple[str, ...] = ()
    title_variants: tuple[str, ...] = ()

    @field_validator("issns", "isbns", "title_variants")
    @classmethod
    def _drop_blank(cls, values: tuple[str, ...]) -> tuple[str, ...]:
        return tuple(v.strip() for v in values if v and v.strip())


class DocumentRecord(BaseModel):
    """One bibliographic document as ingested.

    Numbering fields (`publication_year`, `volume`, `issue`, pages,
    `article_number`) stay raw strings; normalization is a separate pass.

    `reference_count` is the length of the reference list when the source
    knows it (None = reference list not available). `references` holds only
    the references resolved to documents of the same corpus, so
    `reference_count >= len(references)` when both are known.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    record_id: str = Field(min_length=1)
    doi: str | None = None
    authors: tuple[AuthorName, ...] = ()
    title: str | None = None
    source: SourceDescriptor = SourceDescriptor()
    publication_year: str | None = None
    volume: str | None = None
    issue: str | None = None
    begin_page: str | None = None
    end_page: str | None = None
    article_number: str | None = None
    document_type: str | None = None
    language: str | None = None
    discipline_labels: tuple[str, ...] = ()
    reference_count: int | None = Field(default=None, ge=0)
    references: tuple[str, ...] = ()

    @field_validator("record_id")
    @classmethod
    def _id_not_blank(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("record_id must not be blank")
        return v


class CitationLink(NamedTuple):
    """(citing, cited) record ids within one corpus. Self-links are allowed."""

    citing: str
    cited: str


@dataclass(frozen=True)
class Corpus:
    """All records of one data source.

    `records` keeps ingestion order, duplicates included, so that
    `validate_corpus` can report them. Lookups go through `by_id`, where the
    first occurrence of an id wins.
    """

    corpus_id: str
    records: tuple[DocumentRecord, ...] = field(default_factory=tuple)

    @cached_property
    def by_id(self) -> dict[str, DocumentRecord]:
        index: dict[str, DocumentRecord] = {}
        for rec in self.records:
            index.setdefault(rec.record_id, rec)
        return index

    def __len__(self) -> int:
        return len(self.by_id)

    def links(self) -> set[CitationLink]:
        """Distinct citation links, taken from each record's `references`."""
        return {
            CitationLink(rec.record_id, cited)
            for rec in self.by_id.values()
            for cited in rec.references
        }


IssueKind = Literal["duplicate-id", "dangling-reference", "reference-count-mismatch", "self-link"]


class ValidationIssue(NamedTuple):
    kind: IssueKind
    record_id: str
    detail: str


def validate_corpus(corpus: Corpus) -> list[ValidationIssue]:
    """Check the corpus invariants without mutating anything.

    Reports, in record order:
      - `duplicate-id` for every repeated occurrence of a record_id
      - `self-link` for a record listing itself as a reference
      - `dangling-reference` for a reference to an id absent from the corpus
      - `reference-count-mismatch` when reference_count < len(references)

    Args:
        corpus: A parsed corpus.

    Returns:
        The issues found; an empty list means every invariant holds.
    """
    issues: list[ValidationIssue] = []
    known = {rec.record_id for rec in corpus.records}
    seen: Counter[str] = Counter()

    for rec in corpus.records:
        seen[rec.record_id] += 1
        if seen[rec.record_id] > 1:
            issues.append(ValidationIssue(
                "duplicate-id", rec.record_id, f"occurrence {seen[rec.record_id]}"
            ))
            continue

        for ref in rec.references:
            if ref == rec.record_id:
                issues.append(ValidationIssue("self-link", rec.record_id, ref))
            elif ref not in known:
                issues.append(ValidationIssue("dangling-reference", rec.record_id, ref))

        if rec.reference_count is not None and rec.reference_count < len(rec.references):
            issues.append(ValidationIssue(
                "reference-count-mismatch",
                rec.record_id,
                f"reference_count={rec.reference_count} < {len(rec.references)} resolved",
            ))

    return issues
