# src/biblink/normalize.py

"""
Preprocessing of ingested records into the form the matcher sees.

This module converts a raw `model.DocumentRecord` into a `NormalizedRecord`
that blocking and scoring can trust.

Rules:
    - year, volume, issue, begin/end page, article number: keep only the
      decimal digits, in order ("Vol. 12" -> "12"; "iv" -> absent)
    - titles, source titles, author names: Unicode compatibility
      decomposition, combining marks removed, a fixed transliteration table
      for the remaining Latin letters, everything else outside US-ASCII
      dropped; then lowercased with whitespace runs collapsed
    - DOI: lowercased, `https://doi.org/` / `doi:` prefixes removed
    - ISSN / ISBN: only digits and check character `X`
    - first author: first element of `authors`, split into last name and
      first initial

Post-conditions set by `normalize_record`:
    - every `*_num` field is absent or matches `[0-9]+`
    - `first_author_initial` is absent or one US-ASCII character
    - `title_norm` and source title variants are US-ASCII

Punctuation inside titles is kept; only whitespace is collapsed.

Example:
    >>> from biblink.model import DocumentRecord
    >>> rec = DocumentRecord(record_id="S1", title="Análisis de redes — Vol. II", volume="II")
    >>> n = normalize_record(rec)
    >>> n.title_norm
    'analisis de redes vol. ii'
    >>> n.volume_num is None
    True
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .model import AuthorName, Corpus, DocumentRecord


# Letters that survive compatibility decomposition without an ASCII base.
# Anything outside ASCII and outside this table is dropped.
TRANSLITERATION: dict[str, str] = {
    "ß": "ss", "ẞ": "ss",
    "æ": "ae", "Æ": "ae",
    "œ": "oe", "Œ": "oe",
    "ø": "o", "Ø": "o",
    "đ": "d", "Đ": "d",
    "ð": "d", "Ð": "d",
    "ł": "l", "Ł": "l",
    "þ": "th", "Þ": "th",
    "ı": "i",
    "ħ": "h", "Ħ": "h",
}

# ASCII digits only; \D would keep other scripts' digits
_NON_DIGIT = re.compile(r"[^0-9]+")
_DOI_PREFIX = re.compile(r"^(?:https?://(?:dx\.)?doi\.org/|doi:\s*)")
_NOT_ID_CHAR = re.compile(r"[^0-9X]")


@dataclass(frozen=True)
class NormalizedRecord:
    """A document after preprocessing; the only form blocking and scoring see."""

    record_id: str
    doi_norm: str | None = None
    first_author_last: str | None = None
    first_author_initial: str | None = None
    title_norm: str | None = None
    source_title_variants_norm: tuple[str, ...] = ()
    issns_norm: tuple[str, ...] = ()
    isbns_norm: tuple[str, ...] = ()
    year_num: str | None = None
    volume_num: str | None = None
    issue_num: str | None = None
    begin_page_num: str | None = None
    end_page_num: str | None = None
    article_number_num: str | None = None


def normalize_numeric(raw: str | None) -> str | None:
    """Return the decimal digits of `raw` in order, or None if there are none.

    Examples:
        >>> normalize_numeric("Vol. 12")
        '12'
        >>> normalize_numeric("e0371")
        '0371'
        >>> normalize_numeric("iv") is None
        True
    """
    if raw is None:
        return None
    return _NON_DIGIT.sub("", raw) or None


def fold_ascii(text: str) -> str:
    """Fold `text` to lowercase US-ASCII with single spaces.

    Idempotent: `fold_ascii(fold_ascii(x)) == fold_ascii(x)`.

    Examples:
        >>> fold_ascii("Gödel")
        'godel'
        >>> fold_ascii("Łukasz  MÜLLER")
        'lukasz muller'
    """
    out: list[str] = []
    for ch in unicodedata.normalize("NFKD", text):
        if unicodedata.combining(ch):
            continue
        if ch.isspace():
            out.append(" ")
        elif ch.isascii():
            out.append(ch)
        else:
            out.append(TRANSLITERATION.get(ch, ""))
    return " ".join("".join(out).lower().split())


def _fold_or_none(text: str | None) -> str | None:
    if text is None:
        return None
    folded = fold_ascii(text)
    return folded or None


def split_author(name: AuthorName) -> tuple[str | None, str | None]:
    """Return (folded last name, first initial) of an author.

    Pre-split names are used as given. Otherwise `full_name` is split:
    "Last, First" on the first comma, else the final whitespace token is the
    last name and the rest is the first name. Name particles are not
    special-cased ("Nees Jan van Eck" -> last name "eck").

    Examples:
        >>> split_author(AuthorName(full_name="Waltman, Ludo"))
        ('waltman', 'l')
        >>> split_author(AuthorName(last_name="García", first_name="María"))
        ('garcia', 'm')
    """
    if name.last_name and name.last_name.strip():
        last_raw, first_raw = name.last_name, name.first_name
    else:
        full = (name.full_name or "").strip()
        if "," in full:
            last_raw, _, first_raw = full.partition(",")
        else:
            tokens = full.split()
            last_raw = tokens[-1] if tokens else None
            first_raw = " ".join(tokens[:-1]) or None

    last = _fold_or_none(last_raw)
    first = _fold_or_none(first_raw)
    return last, (first[0] if first else None)


def normalize_doi(raw: str | None) -> str | None:
    """Lowercase a DOI and drop resolver / `doi:` prefixes.

    Example:
        >>> normalize_doi(" https://doi.org/10.1000/ABC ")
        '10.1000/abc'
    """
    if raw is None:
        return None
    doi = _DOI_PREFIX.sub("", raw.strip().lower()).strip()
    return doi or None


def _normalize_ids(values: tuple[str, ...]) -> tuple[str, ...]:
    """ISSN/ISBN strings reduced to digits and `X`, deduplicated in order."""
    cleaned = (_NOT_ID_CHAR.sub("", v.upper()) for v in values)
    return tuple(dict.fromkeys(c for c in cleaned if c))


def normalize_record(rec: DocumentRecord) -> NormalizedRecord:
    """Apply every preprocessing rule to one record. Never raises.

    Args:
        rec: An ingested (and ideally validated) record.

    Returns:
        The corresponding `NormalizedRecord`.
    """
    last, initial = split_author(rec.authors[0]) if rec.authors else (None, None)
    variants = (fold_ascii(v) for v in rec.source.title_variants)

    return NormalizedRecord(
        record_id=rec.record_id,
        doi_norm=normalize_doi(rec.doi),
        first_author_last=last,
        first_author_initial=initial,
        title_norm=_fold_or_none(rec.title),
        source_title_variants_norm=tuple(dict.fromkeys(v for v in variants if v)),
        issns_norm=_normalize_ids(rec.source.issns),
        isbns_norm=_normalize_ids(rec.source.isbns),
        year_num=normalize_numeric(rec.publication_year),
        volume_num=normalize_numeric(rec.volume),
        issue_num=normalize_numeric(rec.issue),
        begin_page_num=normalize_numeric(rec.begin_page),
        end_page_num=normalize_numeric(rec.end_page),
        article_number_num=normalize_numeric(rec.article_number),
    )


def normalize_corpus(corpus: Corpus) -> dict[str, NormalizedRecord]:
    """Normalize every distinct record of a corpus, keyed by record_id."""
    return {rid: normalize_record(rec) for rid, rec in corpus.by_id.items()}
