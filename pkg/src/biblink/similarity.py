# src/biblink/similarity.py

"""Attribute similarities and the weighted matching score of two documents.

Five components, each in [0, 1], are combined into

    S = 15·m_doi + 7·m_first_author + 14·m_title + 5·m_source + 14·m_other

and a pair is a match when S is strictly greater than the threshold (30).

- ``m_doi``: 1 if both DOIs are present and identical.
- ``m_first_author``: ``0.8 − 0.8·D(l_A, l_B)/max(L) + 0.2·E(f_A, f_B)`` on
  last name ``l`` and first initial ``f``. ``ScoreWeights.legacy_first_author``
  switches to the variant without the 0.8 on the distance term (clamped at 0)
  to replicate results produced with that formula.
- ``m_title``: ``1 − D(t_A, t_B)/max(L)``.
- ``m_source``: 1 on a shared ISSN/ISBN, else the best over all source-title
  variant pairs of ``1 − [D(s_A, s_B) − |L(s_A) − L(s_B)|]/min(L)``, which is 1
  whenever one title contains the other.
- ``m_other``: ``0.1·E(year) + 0.2·E(volume) + 0.1·E(issue) + 0.3·E(begin page)
  + 0.3·E(end page)``; the begin-page term also accepts equal article numbers.

D is the Levenshtein distance, L the string length and E the equality
indicator. Any component whose inputs are missing on either side is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field
from rapidfuzz.distance import Levenshtein

from .normalize import NormalizedRecord


class ScoreWeights(BaseModel):
    """Component weights, the match threshold, and formula switches."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    w_doi: float = Field(default=15.0, ge=0)
    w_first_author: float = Field(default=7.0, ge=0)
    w_title: float = Field(default=14.0, ge=0)
    w_source: float = Field(default=5.0, ge=0)
    w_other: float = Field(default=14.0, ge=0)
    threshold: float = Field(default=30.0, ge=0)
    legacy_first_author: bool = False
    numeric_as_int: bool = False

    def accepts(self, total: float) -> bool:
        """Strict threshold test: a total equal to the threshold is rejected."""
        return total > self.threshold


@dataclass(frozen=True)
class ScoreBreakdown:
    m_doi: float
    m_first_author: float
    m_title: float
    m_source: float
    m_other: float
    total: float


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions and substitutions.

    Example:
        >>> levenshtein("kitten", "sitting")
        3
    """
    return Levenshtein.distance(a, b)


def _eq(a: str | None, b: str | None) -> float:
    return 1.0 if a is not None and b is not None and a == b else 0.0


def _eq_num(a: str | None, b: str | None, as_int: bool) -> float:
    if as_int and a is not None and b is not None:
        return 1.0 if int(a) == int(b) else 0.0
    return _eq(a, b)


def m_doi(a: NormalizedRecord, b: NormalizedRecord) -> float:
    return _eq(a.doi_norm, b.doi_norm)


def m_first_author(a: NormalizedRecord, b: NormalizedRecord, legacy: bool = False) -> float:
    la, lb = a.first_author_last, b.first_author_last
    if not la or not lb:
        return 0.0
    ratio = levenshtein(la, lb) / max(len(la), len(lb))
    initial = _eq(a.first_author_initial, b.first_author_initial)
    if legacy:
        return max(0.0, 0.8 - ratio + 0.2 * initial)
    return 0.8 - 0.8 * ratio + 0.2 * initial


def m_title(a: NormalizedRecord, b: NormalizedRecord) -> float:
    ta, tb = a.title_norm, b.title_norm
    if not ta or not tb:
        return 0.0
    return 1.0 - levenshtein(ta, tb) / max(len(ta), len(tb))


def _source_title_similarity(sa: str, sb: str) -> float:
    excess = levenshtein(sa, sb) - abs(len(sa) - len(sb))
    return 1.0 - excess / min(len(sa), len(sb))


def m_source(a: NormalizedRecord, b: NormalizedRecord) -> float:
    if set(a.issns_norm) & set(b.issns_norm) or set(a.isbns_norm) & set(b.isbns_norm):
        return 1.0
    return max(
        (
            _source_title_similarity(sa, sb)
            for sa in a.source_title_variants_norm
            for sb in b.source_title_variants_norm
        ),
        default=0.0,
    )


def m_other(a: NormalizedRecord, b: NormalizedRecord, as_int: bool = False) -> float:
    begin = max(
        _eq_num(a.begin_page_num, b.begin_page_num, as_int),
        _eq_num(a.article_number_num, b.article_number_num, as_int),
    )
    # summed in tenths so that all-equal gives exactly 1.0
    tenths = (
        1 * _eq_num(a.year_num, b.year_num, as_int)
        + 2 * _eq_num(a.volume_num, b.volume_num, as_int)
        + 1 * _eq_num(a.issue_num, b.issue_num, as_int)
        + 3 * begin
        + 3 * _eq_num(a.end_page_num, b.end_page_num, as_int)
    )
    return tenths / 10


def matching_score(
    a: NormalizedRecord, b: NormalizedRecord, w: ScoreWeights | None = None
) -> ScoreBreakdown:
    """Compute all five components and the weighted total for one pair.

    Args:
        a: Record from corpus A.
        b: Record from corpus B.
        w: Weights and switches; `ScoreWeights()` when omitted.

    Returns:
        `ScoreBreakdown` with `total = Σ weight_k · m_k`.

    Example:
        >>> from biblink.normalize import NormalizedRecord
        >>> r = NormalizedRecord("x", doi_norm="10.1/x", year_num="2012")
        >>> round(matching_score(r, NormalizedRecord("y", doi_norm="10.1/x", year_num="2012")).total, 6)
        16.4
    """
    w = w or ScoreWeights()
    doi = m_doi(a, b)
    author = m_first_author(a, b, legacy=w.legacy_first_author)
    title = m_title(a, b)
    source = m_source(a, b)
    other = m_other(a, b, as_int=w.numeric_as_int)
    total = (
        w.w_doi * doi
        + w.w_first_author * author
        + w.w_title * title
        + w.w_source * source
        + w.w_other * other
    )
    return ScoreBreakdown(doi, author, title, source, other, total)
