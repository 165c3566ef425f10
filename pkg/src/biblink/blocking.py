# src/biblink/blocking.py

"""
Candidate generation: the six blocking steps.

Each step pairs the still-unmatched records of corpus A and corpus B that
agree on a cheap key, so that only those pairs get scored:

  1. publication year + DOI
  2. publication year + volume + (begin page | article number)
  3. publication year + first-author last name + (begin page | article number)
  4. publication year + first-author last name + volume
  5. publication year + source ID (ISSN | ISBN) + (begin page | article number)
  6. similar titles: the three longest words of the A title all occur as
     words of the B title (directional; corpus A is the baseline)

Page alternatives are namespaced (`p101` vs `a101`) so that a begin page and an
article number with the same digits never share a key.

A key that matches more than `key_cap` records on one side is skipped and
reported in `BlockingResult.skipped_keys`, which bounds the worst case at the
cost of some recall.
"""

from __future__ import annotations

import string
from collections import defaultdict
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple

import pandas as pd
from loguru import logger

from .normalize import NormalizedRecord

STEPS = (1, 2, 3, 4, 5, 6)
DEFAULT_KEY_CAP = 10_000

# Separator for composite keys flattened into one DataFrame column.
_SEP = "\x1f"


class CandidatePair(NamedTuple):
    id_a: str
    id_b: str
    step: int


class SkippedKey(NamedTuple):
    step: int
    key: str
    size_a: int
    size_b: int


@dataclass
class BlockingResult:
    """Candidate pairs of one step in canonical (id_a, id_b) order."""

    step: int
    pairs: list[CandidatePair] = field(default_factory=list)
    skipped_keys: list[SkippedKey] = field(default_factory=list)

    def __iter__(self) -> Iterator[CandidatePair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def _title_tokens(title_norm: str) -> list[str]:
    tokens = (tok.strip(string.punctuation) for tok in title_norm.split())
    return [tok for tok in tokens if tok]


def three_longest_title_words(title_norm: str | None) -> list[str]:
    """Return the three longest words of a title, longest first.

    Words are whitespace tokens with punctuation stripped from their edges;
    equal lengths keep title order. Titles with fewer than three words are
    returned whole, in title order.

    Examples:
        >>> three_longest_title_words("large scale comparison of bibliographic data sources")
        ['bibliographic', 'comparison', 'sources']
        >>> three_longest_title_words("on art")
        ['on', 'art']
    """
    if not title_norm:
        return []
    tokens = _title_tokens(title_norm)
    if len(tokens) < 3:
        return tokens
    ranked = sorted(enumerate(tokens), key=lambda it: (-len(it[1]), it[0]))
    return [tok for _, tok in ranked[:3]]


def _page_alternatives(rec: NormalizedRecord) -> list[str]:
    alts = []
    if rec.begin_page_num is not None:
        alts.append("p" + rec.begin_page_num)
    if rec.article_number_num is not None:
        alts.append("a" + rec.article_number_num)
    return alts


def step_keys(step: int, rec: NormalizedRecord) -> list[tuple[str, ...]]:
    """Blocking keys of one record for one step.

    A record missing any required component yields no key. "Begin page or
    article number" yields one key per available alternative, and step 5 one
    key per ISSN and per ISBN. Step 6 yields a single key: the three longest
    title words.

    Raises:
        ValueError: if `step` is not 1..6.
    """
    year = rec.year_num
    if step == 6:
        words = three_longest_title_words(rec.title_norm)
        return [tuple(words)] if words else []
    if step not in STEPS:
        raise ValueError(f"blocking step must be 1..6, got {step}")
    if year is None:
        return []

    if step == 1:
        return [(year, rec.doi_norm)] if rec.doi_norm else []
    if step == 2:
        if rec.volume_num is None:
            return []
        return [(year, rec.volume_num, page) for page in _page_alternatives(rec)]
    if step == 3:
        if not rec.first_author_last:
            return []
        return [(year, rec.first_author_last, page) for page in _page_alternatives(rec)]
    if step == 4:
        if not rec.first_author_last or rec.volume_num is None:
            return []
        return [(year, rec.first_author_last, rec.volume_num)]

    # step 5
    source_ids = [f"issn:{v}" for v in rec.issns_norm] + [f"isbn:{v}" for v in rec.isbns_norm]
    return [(year, sid, page) for sid in source_ids for page in _page_alternatives(rec)]


def _key_frame(step: int, records: Mapping[str, NormalizedRecord], id_col: str) -> pd.DataFrame:
    rows = [
        (rid, _SEP.join(key))
        for rid, rec in records.items()
        for key in step_keys(step, rec)
    ]
    return pd.DataFrame(rows, columns=[id_col, "key"]).drop_duplicates()


def _keyed_candidates(
    step: int,
    unmatched_a: Mapping[str, NormalizedRecord],
    unmatched_b: Mapping[str, NormalizedRecord],
    key_cap: int,
) -> BlockingResult:
    """Steps 1-5: every (a, b) sharing at least one key."""
    ka = _key_frame(step, unmatched_a, "id_a")
    kb = _key_frame(step, unmatched_b, "id_b")

    sizes = pd.concat(
        [ka.groupby("key").size().rename("size_a"), kb.groupby("key").size().rename("size_b")],
        axis=1,
    ).fillna(0).astype(int)
    shared = sizes[(sizes["size_a"] > 0) & (sizes["size_b"] > 0)]
    oversized = shared[(shared["size_a"] > key_cap) | (shared["size_b"] > key_cap)].sort_index()

    skipped = [
        SkippedKey(step, key.replace(_SEP, "|"), int(row["size_a"]), int(row["size_b"]))
        for key, row in oversized.iterrows()
    ]
    for sk in skipped:
        logger.warning(
            "step {}: skipping key {} ({} A / {} B records > cap {})",
            step, sk.key, sk.size_a, sk.size_b, key_cap,
        )

    if not oversized.empty:
        ka = ka[~ka["key"].isin(oversized.index)]
    merged = (
        ka.merge(kb, on="key")[["id_a", "id_b"]]
        .drop_duplicates()
        .sort_values(["id_a", "id_b"], kind="mergesort")
    )
    pairs = [CandidatePair(a, b, step) for a, b in merged.itertuples(index=False, name=None)]
    return BlockingResult(step, pairs, skipped)


def _title_candidates(
    unmatched_a: Mapping[str, NormalizedRecord],
    unmatched_b: Mapping[str, NormalizedRecord],
    key_cap: int,
) -> BlockingResult:
    """Step 6: B titles containing all three longest words of the A title."""
    postings: dict[str, set[str]] = defaultdict(set)
    for rid, rec in unmatched_b.items():
        if rec.title_norm:
            for tok in _title_tokens(rec.title_norm):
                postings[tok].add(rid)

    result = BlockingResult(6)
    empty: set[str] = set()
    for rid_a in sorted(unmatched_a):
        words = three_longest_title_words(unmatched_a[rid_a].title_norm)
        if not words:
            continue
        lists = sorted((postings.get(w, empty) for w in set(words)), key=len)
        # the key is the word set, so the cap applies to the intersection
        hits = lists[0].intersection(*lists[1:])
        if not hits:
            continue
        if len(hits) > key_cap:
            sk = SkippedKey(6, " ".join(words), 1, len(hits))
            logger.warning("step 6: skipping title words {!r} ({} B records > cap {})", sk.key, sk.size_b, key_cap)
            result.skipped_keys.append(sk)
            continue
        for rid_b in sorted(hits):
            result.pairs.append(CandidatePair(rid_a, rid_b, 6))
    return result


def generate_candidates(
    step: int,
    unmatched_a: Mapping[str, NormalizedRecord],
    unmatched_b: Mapping[str, NormalizedRecord],
    key_cap: int = DEFAULT_KEY_CAP,
) -> BlockingResult:
    """Candidate pairs of one step between the unmatched records of A and B.

    Each pair appears once even if it shares several keys; output is sorted by
    (id_a, id_b) whatever the iteration order of the inputs.

    Args:
        step: Blocking step, 1..6.
        unmatched_a: Unmatched corpus-A records keyed by record_id.
        unmatched_b: Unmatched corpus-B records keyed by record_id.
        key_cap: Keys matching more records than this on one side are skipped.

    Returns:
        `BlockingResult` with the pairs and the skipped keys.
    """
    if step not in STEPS:
        raise ValueError(f"blocking step must be 1..6, got {step}")
    if step == 6:
        result = _title_candidates(unmatched_a, unmatched_b, key_cap)
    else:
        result = _keyed_candidates(step, unmatched_a, unmatched_b, key_cap)
    logger.debug("step {}: {} candidate pairs", step, len(result.pairs))
    return result
