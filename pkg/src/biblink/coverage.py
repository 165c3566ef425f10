# src/biblink/coverage.py

"""Coverage overlap between two matched corpora, overall and broken down.

Every breakdown is computed from one *perspective* corpus ("a" or "b"): rows
are keyed on that corpus's own values (its document types, its discipline
labels, its reference counts, ...), `total` counts its documents and
`overlap` counts those with a match in the other corpus. The same `MatchSet`
serves both perspectives.

Outputs:
- `overlap_summary(...)` returns totals and the global overlap.
- `breakdown_by_*` return one DataFrame each (`value`, `total`, `overlap`,
  `overlap_pct`); the year table carries both corpora side by side.
- `build_coverage(...)` returns an `OverlapSummary` with all breakdowns for
  both perspectives.

Buckets for missing data ("unknown", "unavailable", "unclassified") are
always present, even when empty, so report schemas are stable. Bins are
half-open `(lo, hi]` with ASCII labels such as `0`, `1-10`, `11-50`, `>50`.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd

from .matcher import MatchSet
from .model import Corpus, DocumentRecord
from .normalize import normalize_numeric

Perspective = Literal["a", "b"]

UNKNOWN = "unknown"
UNAVAILABLE = "unavailable"
UNCLASSIFIED = "unclassified"

DEFAULT_REFERENCE_BINS: tuple[int, ...] = (0, 10, 50)
DEFAULT_CITATION_BINS: tuple[int, ...] = (0, 5, 25)

ENGLISH = frozenset({"en", "eng", "english"})


@dataclass
class OverlapSummary:
    total_a: int
    total_b: int
    overlap: int
    breakdowns: dict[str, pd.DataFrame] = field(default_factory=dict)

    @property
    def share_a_pct(self) -> float:
        return round(100.0 * self.overlap / self.total_a, 3) if self.total_a else 0.0

    @property
    def share_b_pct(self) -> float:
        return round(100.0 * self.overlap / self.total_b, 3) if self.total_b else 0.0

    def to_dict(self) -> dict:
        return {
            "total_a": self.total_a,
            "total_b": self.total_b,
            "overlap": self.overlap,
            "share_a_pct": self.share_a_pct,
            "share_b_pct": self.share_b_pct,
        }


# -----------------------
# Helpers
# -----------------------

def _side(ms: MatchSet, a: Corpus, b: Corpus, perspective: Perspective) -> tuple[Corpus, set[str]]:
    if perspective == "a":
        return a, set(ms.a_to_b)
    if perspective == "b":
        return b, set(ms.b_to_a)
    raise ValueError(f"perspective must be 'a' or 'b', got {perspective!r}")


def _summarize(frame: pd.DataFrame, order: Sequence[str], fractional: bool = False) -> pd.DataFrame:
    """Aggregate `weight` per `value` into total / overlap / overlap_pct.

    Args:
        frame: One row per (document, value) with `weight` and `matched`.
        order: Row order of the output; values missing from `frame` get zeros.
        fractional: Keep totals as floats instead of integers.
    """
    frame = frame.astype({"weight": "float64", "matched": "bool"})
    out = (
        frame.assign(overlap=frame["weight"] * frame["matched"])
        .groupby("value")
        .agg(total=("weight", "sum"), overlap=("overlap", "sum"))
        .reindex(list(order), fill_value=0.0)
        .astype("float64")
    )
    total = out["total"].to_numpy()
    pct = np.divide(100.0 * out["overlap"].to_numpy(), total, out=np.zeros_like(total), where=total > 0)
    if not fractional:
        out = out.astype(int)
    out["overlap_pct"] = np.round(pct, 3)
    return out.rename_axis("value").reset_index()


def _observed_order(values: pd.Series, *special: str) -> list[str]:
    observed = sorted(set(values) - set(special))
    return observed + list(special)


def _record_frame(corpus: Corpus, matched: set[str], value_of) -> pd.DataFrame:
    rows = [
        (rec.record_id, value_of(rec), 1.0, rec.record_id in matched)
        for rec in corpus.by_id.values()
    ]
    return _weighted_frame(rows)


def _weighted_frame(rows: list[tuple]) -> pd.DataFrame:
    frame = pd.DataFrame(rows, columns=["record_id", "value", "weight", "matched"])
    return frame.astype({"record_id": object, "weight": "float64", "matched": "bool"})


def bin_labels(edges: Sequence[int]) -> list[str]:
    """Labels of the half-open bins (lo, hi] defined by upper `edges`.

    Example:
        >>> bin_labels((0, 10, 50))
        ['0', '1-10', '11-50', '>50']
    """
    labels = []
    lo = -1
    for hi in edges:
        labels.append(str(hi) if hi == lo + 1 else f"{lo + 1}-{hi}")
        lo = hi
    labels.append(f">{lo}")
    return labels


def _bucket(counts: pd.Series, edges: Sequence[int], missing: str) -> pd.Series:
    edges = sorted(int(e) for e in edges)
    cut = pd.cut(
        counts.astype(float),
        bins=[-np.inf, *edges, np.inf],
        right=True,
        labels=bin_labels(edges),
    )
    return cut.astype(object).where(counts.notna(), missing)


# -----------------------
# Breakdowns
# -----------------------

def overlap_summary(ms: MatchSet, a: Corpus, b: Corpus) -> OverlapSummary:
    return OverlapSummary(total_a=len(a), total_b=len(b), overlap=len(ms))


def breakdown_by_year(ms: MatchSet, a: Corpus, b: Corpus, perspective: Perspective = "a") -> pd.DataFrame:
    """Documents per normalized publication year in both corpora, and the overlap.

    The overlap of a year counts matched pairs by the perspective corpus's year.

    Returns:
        DataFrame with `year`, `total_a`, `total_b`, `overlap`, `overlap_pct`
        (overlap relative to the perspective total). Absent years fall under
        "unknown".
    """
    def year_of(rec: DocumentRecord) -> str:
        return normalize_numeric(rec.publication_year) or UNKNOWN

    corpus, _ = _side(ms, a, b, perspective)
    fa = _record_frame(a, set(ms.a_to_b), year_of)
    fb = _record_frame(b, set(ms.b_to_a), year_of)
    order = _observed_order(pd.concat([fa["value"], fb["value"]]), UNKNOWN)

    persp = _summarize(fa if corpus is a else fb, order)
    table = pd.DataFrame({
        "year": order,
        "total_a": fa.groupby("value")["weight"].sum().reindex(order, fill_value=0).astype(int).to_numpy(),
        "total_b": fb.groupby("value")["weight"].sum().reindex(order, fill_value=0).astype(int).to_numpy(),
        "overlap": persp["overlap"].to_numpy(),
        "overlap_pct": persp["overlap_pct"].to_numpy(),
    })
    return table


def breakdown_by_doctype(ms: MatchSet, a: Corpus, b: Corpus, perspective: Perspective = "a") -> pd.DataFrame:
    """Overlap per native document type of the perspective corpus."""
    corpus, matched = _side(ms, a, b, perspective)
    frame = _record_frame(corpus, matched, lambda r: (r.document_type or "").strip() or UNKNOWN)
    return _summarize(frame, _observed_order(frame["value"], UNKNOWN))


def breakdown_by_discipline(ms: MatchSet, a: Corpus, b: Corpus, perspective: Perspective = "a") -> pd.DataFrame:
    """Overlap per discipline label with fractional counting.

    A document with k labels adds 1/k to each label; a document without
    labels adds 1 to "unclassified".
    """
    corpus, matched = _side(ms, a, b, perspective)
    rows = []
    for rec in corpus.by_id.values():
        labels = list(dict.fromkeys(lbl.strip() for lbl in rec.discipline_labels if lbl.strip()))
        hit = rec.record_id in matched
        if not labels:
            rows.append((rec.record_id, UNCLASSIFIED, 1.0, hit))
            continue
        for lbl in labels:
            rows.append((rec.record_id, lbl, 1.0 / len(labels), hit))
    frame = _weighted_frame(rows)
    return _summarize(frame, _observed_order(frame["value"], UNCLASSIFIED), fractional=True)


def breakdown_by_reference_count(
    ms: MatchSet,
    a: Corpus,
    b: Corpus,
    perspective: Perspective = "a",
    bins: Sequence[int] = DEFAULT_REFERENCE_BINS,
) -> pd.DataFrame:
    """Overlap per reference-count bin; absent counts go to "unavailable"."""
    corpus, matched = _side(ms, a, b, perspective)
    frame = _record_frame(corpus, matched, lambda r: r.reference_count)
    frame["value"] = _bucket(pd.to_numeric(frame["value"], errors="coerce"), bins, UNAVAILABLE)
    return _summarize(frame, [*bin_labels(sorted(bins)), UNAVAILABLE])


def citation_counts(corpus: Corpus) -> Counter[str]:
    """In-degree of every record over the corpus's own citation links."""
    return Counter(link.cited for link in corpus.links())


def breakdown_by_citation_count(
    ms: MatchSet,
    a: Corpus,
    b: Corpus,
    perspective: Perspective = "a",
    bins: Sequence[int] = DEFAULT_CITATION_BINS,
) -> pd.DataFrame:
    """Overlap per bin of citations received within the perspective corpus."""
    corpus, matched = _side(ms, a, b, perspective)
    cites = citation_counts(corpus)
    frame = _record_frame(corpus, matched, lambda r: cites.get(r.record_id, 0))
    frame["value"] = _bucket(frame["value"], bins, UNAVAILABLE)
    return _summarize(frame, bin_labels(sorted(bins)))


def _language_of(rec: DocumentRecord) -> str:
    return (rec.language or "").strip().lower() or UNKNOWN


def breakdown_by_language(
    ms: MatchSet, a: Corpus, b: Corpus, perspective: Perspective = "a"
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Overlap per language, plus an English / non-English / unknown rollup.

    Returns:
        (by_language, rollup), both with `value`, `total`, `overlap`,
        `overlap_pct`.
    """
    corpus, matched = _side(ms, a, b, perspective)
    frame = _record_frame(corpus, matched, _language_of)
    by_language = _summarize(frame, _observed_order(frame["value"], UNKNOWN))

    def group(lang: str) -> str:
        if lang == UNKNOWN:
            return UNKNOWN
        return "english" if lang in ENGLISH else "non-english"

    rollup = _summarize(frame.assign(value=frame["value"].map(group)), ["english", "non-english", UNKNOWN])
    return by_language, rollup


def build_coverage(
    ms: MatchSet,
    a: Corpus,
    b: Corpus,
    *,
    reference_bins: Sequence[int] = DEFAULT_REFERENCE_BINS,
    citation_bins: Sequence[int] = DEFAULT_CITATION_BINS,
) -> OverlapSummary:
    """Overlap summary with every breakdown, from both perspectives.

    Breakdown keys: `year`, and per side `x` in {a, b}: `doctype_x`,
    `discipline_x`, `references_x`, `citations_x`, `language_x`,
    `language_rollup_x`.
    """
    summary = overlap_summary(ms, a, b)
    summary.breakdowns["year"] = breakdown_by_year(ms, a, b, "a")
    for side in ("a", "b"):
        summary.breakdowns[f"doctype_{side}"] = breakdown_by_doctype(ms, a, b, side)
        summary.breakdowns[f"discipline_{side}"] = breakdown_by_discipline(ms, a, b, side)
        summary.breakdowns[f"references_{side}"] = breakdown_by_reference_count(ms, a, b, side, reference_bins)
        summary.breakdowns[f"citations_{side}"] = breakdown_by_citation_count(ms, a, b, side, citation_bins)
        langs, rollup = breakdown_by_language(ms, a, b, side)
        summary.breakdowns[f"language_{side}"] = langs
        summary.breakdowns[f"language_rollup_{side}"] = rollup
    return summary
