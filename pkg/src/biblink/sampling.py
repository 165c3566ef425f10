# src/biblink/sampling.py

"""
Seeded review worksheets for manual evaluation of the matching.

- `sample_unmatched`: random unmatched documents of one corpus, each with its
  best rejected candidate from the other corpus and that candidate's score
  components. Near misses scoring just under the threshold show up here.
- `sample_matched`: random matched pairs with both records side by side, for
  a precision check.

Sampling is uniform without replacement from the canonically sorted
population, driven only by `numpy.random.default_rng(seed)`; the sample is
returned in canonical order. The same seed and inputs give the same
worksheet on every platform.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Literal, TypeVar

import numpy as np
import pandas as pd
from loguru import logger

from .matcher import MatchSet
from .model import Corpus, DocumentRecord
from .similarity import ScoreBreakdown

T = TypeVar("T")
Side = Literal["a", "b"]

METADATA_FIELDS = [
    "record_id", "doi", "first_author", "title", "year", "source",
    "volume", "issue", "begin_page", "end_page", "article_number", "document_type",
]
COMPONENT_FIELDS = ["total", "m_doi", "m_first_author", "m_title", "m_source", "m_other"]


def seeded_sample(population: Sequence[T], n: int, rng: np.random.Generator, what: str = "items") -> list[T]:
    """Uniform sample without replacement, returned in canonical (sorted) order.

    Args:
        population: Sortable items; order of the input does not matter.
        n: Sample size. Larger than the population returns all of it.
        rng: Generator driving the draw.
        what: Population name for the shortfall warning.

    Raises:
        ValueError: if `n` is negative.
    """
    if n < 0:
        raise ValueError(f"sample size must be >= 0, got {n}")
    canon = sorted(population)
    if n >= len(canon):
        if n > len(canon):
            logger.warning("requested {} {} but only {} available; taking all", n, what, len(canon))
        return canon
    picked = np.sort(rng.choice(len(canon), size=n, replace=False))
    return [canon[i] for i in picked]


def _first_author(rec: DocumentRecord) -> str | None:
    if not rec.authors:
        return None
    au = rec.authors[0]
    if au.full_name:
        return au.full_name
    return ", ".join(part for part in (au.last_name, au.first_name) if part)


def record_metadata(rec: DocumentRecord | None, prefix: str) -> dict[str, object]:
    """Flatten a record into prefixed worksheet columns (all None if absent)."""
    if rec is None:
        return {f"{prefix}{name}": None for name in METADATA_FIELDS}
    values = {
        "record_id": rec.record_id,
        "doi": rec.doi,
        "first_author": _first_author(rec),
        "title": rec.title,
        "year": rec.publication_year,
        "source": rec.source.title_variants[0] if rec.source.title_variants else None,
        "volume": rec.volume,
        "issue": rec.issue,
        "begin_page": rec.begin_page,
        "end_page": rec.end_page,
        "article_number": rec.article_number,
        "document_type": rec.document_type,
    }
    return {f"{prefix}{name}": values[name] for name in METADATA_FIELDS}


def score_columns(bd: ScoreBreakdown | None, prefix: str) -> dict[str, object]:
    if bd is None:
        return {f"{prefix}{name}": None for name in COMPONENT_FIELDS}
    return {f"{prefix}{name}": getattr(bd, name) for name in COMPONENT_FIELDS}


def sample_unmatched(
    ms: MatchSet,
    a: Corpus,
    b: Corpus,
    side: Side = "a",
    n: int = 30,
    seed: int = 0,
) -> pd.DataFrame:
    """Worksheet of random unmatched documents of one side with their best rejected candidate.

    Args:
        ms: The match set.
        a: Corpus A.
        b: Corpus B.
        side: Which corpus to sample unmatched documents from.
        n: Sample size.
        seed: Sampling seed.

    Returns:
        One row per sampled document: its metadata, then `candidate_*`
        metadata of the best rejected candidate, the step it was scored in
        and its score components. Candidate columns are empty for documents
        that never got a candidate.
    """
    if side == "a":
        own, other, unmatched, near = a, b, ms.unmatched_a, ms.near_misses_a
    elif side == "b":
        own, other, unmatched, near = b, a, ms.unmatched_b, ms.near_misses_b
    else:
        raise ValueError(f"side must be 'a' or 'b', got {side!r}")

    picked = seeded_sample(list(unmatched), n, np.random.default_rng(seed), f"unmatched {side} documents")
    columns = (
        METADATA_FIELDS
        + [f"candidate_{f}" for f in METADATA_FIELDS]
        + ["candidate_step"]
        + [f"candidate_{f}" for f in COMPONENT_FIELDS]
    )
    rows = []
    for rid in picked:
        miss = near.get(rid)
        row = record_metadata(own.by_id.get(rid), "")
        row.update(record_metadata(other.by_id.get(miss.other_id) if miss else None, "candidate_"))
        row["candidate_step"] = miss.step if miss else None
        row.update(score_columns(miss.breakdown if miss else None, "candidate_"))
        rows.append(row)
    sheet = pd.DataFrame(rows, columns=columns)
    sheet["candidate_step"] = sheet["candidate_step"].astype("Int64")
    return sheet


def sample_matched(ms: MatchSet, a: Corpus, b: Corpus, n: int = 30, seed: int = 0) -> pd.DataFrame:
    """Worksheet of random matched pairs for a precision check."""
    pairs = seeded_sample([(p.id_a, p.id_b) for p in ms.pairs], n, np.random.default_rng(seed), "matched pairs")
    columns = (
        ["step"]
        + COMPONENT_FIELDS
        + [f"a_{f}" for f in METADATA_FIELDS]
        + [f"b_{f}" for f in METADATA_FIELDS]
    )
    rows = []
    for id_a, id_b in pairs:
        pair = ms.by_id_a[id_a]
        row: dict[str, object] = {"step": pair.step}
        row.update(score_columns(pair.breakdown, ""))
        row.update(record_metadata(a.by_id.get(id_a), "a_"))
        row.update(record_metadata(b.by_id.get(id_b), "b_"))
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)
