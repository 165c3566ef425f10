# src/biblink/citations.py

"""Citation-link comparison between two matched corpora.

Only co-covered links are compared: links whose citing and cited documents
both have a match in the other corpus. A co-covered link of A is mapped
through the match set to a pair of B ids and looked up among B's co-covered
links, and vice versa.

A one-sided link is classified by the reference list of the citing document
in the other corpus:

- `missing_reference_list_in_other`: the matched citing document has no
  reference list there (`reference_count` absent -> `not_available`,
  zero -> `empty`)
- `unexplained`: it has one, and the link is still not in it

Percentages are relative to each side's co-covered link total.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd

from .matcher import MatchSet
from .model import CitationLink, Corpus
from .sampling import METADATA_FIELDS, record_metadata, seeded_sample

Side = Literal["a", "b"]

MISSING_LIST = "missing_reference_list_in_other"
UNEXPLAINED = "unexplained"
CAUSES = (MISSING_LIST, UNEXPLAINED)
MISSING_DETAILS = ("not_available", "empty")


@dataclass(frozen=True)
class LinkDiff:
    """Link overlap of two corpora over co-covered documents.

    `only_a` / `only_b` are sorted; `cause_a` / `cause_b` map each one-sided
    link to its cause, `detail_a` / `detail_b` the missing-list ones to their
    sub-cause.
    """

    shared: int
    total_a: int
    total_b: int
    only_a: tuple[CitationLink, ...] = ()
    only_b: tuple[CitationLink, ...] = ()
    cause_a: Mapping[CitationLink, str] = field(default_factory=dict)
    cause_b: Mapping[CitationLink, str] = field(default_factory=dict)
    detail_a: Mapping[CitationLink, str] = field(default_factory=dict)
    detail_b: Mapping[CitationLink, str] = field(default_factory=dict)

    @property
    def classified_only_a(self) -> dict[str, int]:
        return _count(self.cause_a.values(), CAUSES)

    @property
    def classified_only_b(self) -> dict[str, int]:
        return _count(self.cause_b.values(), CAUSES)

    @property
    def missing_detail_a(self) -> dict[str, int]:
        return _count(self.detail_a.values(), MISSING_DETAILS)

    @property
    def missing_detail_b(self) -> dict[str, int]:
        return _count(self.detail_b.values(), MISSING_DETAILS)

    def summary(self) -> dict:
        """JSON-ready counts and shares (in % of each side's co-covered links)."""
        def pct(k: int, total: int) -> float:
            return round(100.0 * k / total, 3) if total else 0.0

        out: dict = {"shared": self.shared}
        for side, total, only, causes, detail in (
            ("a", self.total_a, self.only_a, self.classified_only_a, self.missing_detail_a),
            ("b", self.total_b, self.only_b, self.classified_only_b, self.missing_detail_b),
        ):
            out[f"co_covered_{side}"] = total
            out[f"only_{side}"] = len(only)
            out[f"only_{side}_pct"] = pct(len(only), total)
            out[f"shared_{side}_pct"] = pct(self.shared, total)
            out[f"classified_only_{side}"] = {
                cause: {"count": k, "pct": pct(k, total)} for cause, k in causes.items()
            }
            out[f"missing_detail_{side}"] = detail
        return out


def _count(values, keys) -> dict[str, int]:
    counts = Counter(values)
    return {k: counts.get(k, 0) for k in keys}


def co_covered_links(corpus: Corpus, ms: MatchSet, side: Side) -> set[CitationLink]:
    """Links of `corpus` whose citing and cited documents are both matched.

    Args:
        corpus: Corpus A when `side == "a"`, else corpus B.
        ms: Match set between the two corpora.
        side: Which side of `ms` the corpus is on.
    """
    if side == "a":
        matched = ms.a_to_b
    elif side == "b":
        matched = ms.b_to_a
    else:
        raise ValueError(f"side must be 'a' or 'b', got {side!r}")
    return {link for link in corpus.links() if link.citing in matched and link.cited in matched}


def _one_sided(
    own: set[CitationLink],
    other: set[CitationLink],
    mapping: Mapping[str, str],
    other_corpus: Corpus,
) -> tuple[list[CitationLink], dict[CitationLink, str], dict[CitationLink, str]]:
    only = sorted(
        link for link in own
        if CitationLink(mapping[link.citing], mapping[link.cited]) not in other
    )
    cause: dict[CitationLink, str] = {}
    detail: dict[CitationLink, str] = {}
    for link in only:
        count = other_corpus.by_id[mapping[link.citing]].reference_count
        if count is None or count == 0:
            cause[link] = MISSING_LIST
            detail[link] = "not_available" if count is None else "empty"
        else:
            cause[link] = UNEXPLAINED
    return only, cause, detail


def diff_links(a: Corpus, b: Corpus, ms: MatchSet) -> LinkDiff:
    """Compare the co-covered citation links of A and B.

    Returns:
        `LinkDiff` with `shared + len(only_a) == total_a` and likewise for B.
    """
    links_a = co_covered_links(a, ms, "a")
    links_b = co_covered_links(b, ms, "b")

    only_a, cause_a, detail_a = _one_sided(links_a, links_b, ms.a_to_b, b)
    only_b, cause_b, detail_b = _one_sided(links_b, links_a, ms.b_to_a, a)

    return LinkDiff(
        shared=len(links_a) - len(only_a),
        total_a=len(links_a),
        total_b=len(links_b),
        only_a=tuple(only_a),
        only_b=tuple(only_b),
        cause_a=cause_a,
        cause_b=cause_b,
        detail_a=detail_a,
        detail_b=detail_b,
    )


def _link_row(
    link: CitationLink,
    direction: str,
    diff: LinkDiff,
    own: Corpus,
    other: Corpus,
    mapping: Mapping[str, str],
    ms: MatchSet,
) -> dict[str, object]:
    cause = (diff.cause_a if direction == "only_a" else diff.cause_b)[link]
    detail = (diff.detail_a if direction == "only_a" else diff.detail_b).get(link)
    row: dict[str, object] = {"direction": direction, "cause": cause, "missing_detail": detail}

    for role, rid in (("citing", link.citing), ("cited", link.cited)):
        other_id = mapping[rid]
        id_a, id_b = (rid, other_id) if direction == "only_a" else (other_id, rid)
        a_rec, b_rec = (own, other) if direction == "only_a" else (other, own)
        row.update(record_metadata(a_rec.by_id.get(id_a), f"{role}_a_"))
        row.update(record_metadata(b_rec.by_id.get(id_b), f"{role}_b_"))
        pair = ms.by_id_a[id_a]
        row[f"{role}_step"] = pair.step
        row[f"{role}_score"] = pair.total
    return row


def sample_discrepancies(
    diff: LinkDiff,
    a: Corpus,
    b: Corpus,
    ms: MatchSet,
    n: int = 15,
    seed: int = 0,
) -> pd.DataFrame:
    """Review worksheet of random one-sided links, `n` per direction.

    Each row carries the cause, the metadata of the citing and cited
    documents in both corpora and the matching scores of the two document
    pairs, so reviewers can also spot matching errors.
    """
    rng = np.random.default_rng(seed)
    picked_a = seeded_sample(diff.only_a, n, rng, "links only in A")
    picked_b = seeded_sample(diff.only_b, n, rng, "links only in B")

    rows = [_link_row(link, "only_a", diff, a, b, ms.a_to_b, ms) for link in picked_a]
    rows += [_link_row(link, "only_b", diff, b, a, ms.b_to_a, ms) for link in picked_b]
    return pd.DataFrame(rows, columns=discrepancy_columns())


def discrepancy_columns() -> list[str]:
    cols = ["direction", "cause", "missing_detail"]
    for role in ("citing", "cited"):
        cols += [f"{role}_a_{f}" for f in METADATA_FIELDS]
        cols += [f"{role}_b_{f}" for f in METADATA_FIELDS]
        cols += [f"{role}_step", f"{role}_score"]
    return cols
