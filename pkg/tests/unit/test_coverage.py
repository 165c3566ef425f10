# tests/unit/test_coverage.py

"""Unit tests for `coverage`.

Covers:
  - Overlap totals and shares
  - Year table with both corpora side by side and an "unknown" row
  - Document-type, language and rollup tables with stable special rows
  - Fractional discipline counting adds up to corpus size and overlap
  - Reference and citation bins, half-open (lo, hi], ASCII labels
  - Empty corpora give zero rows for every special bucket, never a division error

Run all unit tests:
    pytest tests/unit -q
Run this file:
    pytest tests/unit/test_coverage.py -q
"""

import pytest

from biblink.coverage import (
    bin_labels,
    breakdown_by_citation_count,
    breakdown_by_discipline,
    breakdown_by_doctype,
    breakdown_by_language,
    breakdown_by_reference_count,
    breakdown_by_year,
    build_coverage,
    overlap_summary,
)
from biblink.matcher import MatchedPair, MatchSet, match_corpora
from biblink.model import Corpus
from biblink.similarity import ScoreBreakdown


@pytest.fixture
def small(make_rec):
    """A: 4 documents, B: 3; A1-B1 and A2-B2 matched by hand."""
    a = Corpus("a", (
        make_rec("A1", publication_year="2012", document_type="article", language="en",
                 discipline_labels=("physics", "chemistry"), reference_count=0, references=("A2",)),
        make_rec("A2", publication_year="2012", document_type="review", language="English",
                 discipline_labels=("physics",), reference_count=12),
        make_rec("A3", publication_year="2013", document_type="article", language="de",
                 reference_count=51, references=("A2",)),
        make_rec("A4", document_type=" ", reference_count=None, references=("A2",)),
    ))
    b = Corpus("b", (
        make_rec("B1", publication_year="2012", document_type="Journal Article"),
        make_rec("B2", publication_year="2011", document_type="Journal Article"),
        make_rec("B3", publication_year="2013"),
    ))
    bd = ScoreBreakdown(1, 1, 1, 1, 1, 55.0)
    ms = MatchSet(
        pairs=(MatchedPair("A1", "B1", 1, bd), MatchedPair("A2", "B2", 1, bd)),
        unmatched_a=frozenset({"A3", "A4"}),
        unmatched_b=frozenset({"B3"}),
    )
    return a, b, ms


def rows(df, key="value"):
    return {r[key]: r for r in df.to_dict(orient="records")}


def test_overlap_summary(small):
    a, b, ms = small
    s = overlap_summary(ms, a, b)
    assert (s.total_a, s.total_b, s.overlap) == (4, 3, 2)
    assert s.share_a_pct == 50.0
    assert s.share_b_pct == pytest.approx(66.667)


def test_year_table_keys_overlap_by_perspective_year(small):
    a, b, ms = small

    table = rows(breakdown_by_year(ms, a, b, "a"), "year")
    from_b = rows(breakdown_by_year(ms, a, b, "b"), "year")

    assert list(table) == ["2011", "2012", "2013", "unknown"]
    assert (table["2012"]["total_a"], table["2012"]["total_b"], table["2012"]["overlap"]) == (2, 1, 2)
    assert table["unknown"]["total_a"] == 1
    assert (from_b["2011"]["overlap"], from_b["2012"]["overlap"]) == (1, 1)
    assert from_b["2012"]["overlap_pct"] == 100.0


def test_doctype_uses_native_labels_with_unknown_row(small):
    a, b, ms = small

    table_a = rows(breakdown_by_doctype(ms, a, b, "a"))
    table_b = rows(breakdown_by_doctype(ms, a, b, "b"))

    assert list(table_a) == ["article", "review", "unknown"]
    assert (table_a["article"]["total"], table_a["article"]["overlap"]) == (2, 1)
    assert table_a["article"]["overlap_pct"] == 50.0
    assert table_a["unknown"]["total"] == 1
    assert (table_b["Journal Article"]["total"], table_b["Journal Article"]["overlap"]) == (2, 2)
    assert table_b["unknown"]["total"] == 1


def test_discipline_fractional_counting_conserves_totals(small):
    a, b, ms = small

    table = rows(breakdown_by_discipline(ms, a, b, "a"))

    assert table["physics"]["total"] == pytest.approx(1.5)
    assert table["chemistry"]["total"] == pytest.approx(0.5)
    assert table["unclassified"]["total"] == pytest.approx(2.0)
    assert table["physics"]["overlap"] == pytest.approx(1.5)
    assert sum(r["total"] for r in table.values()) == pytest.approx(len(a), abs=1e-9)
    assert sum(r["overlap"] for r in table.values()) == pytest.approx(len(ms), abs=1e-9)


def test_discipline_conservation_on_synthetic_pair(pair):
    ms = match_corpora(pair.a, pair.b)
    for side, corpus in (("a", pair.a), ("b", pair.b)):
        table = breakdown_by_discipline(ms, pair.a, pair.b, side)
        assert abs(table["total"].sum() - len(corpus)) < 1e-9
        assert abs(table["overlap"].sum() - len(ms)) < 1e-9


def test_bin_labels_are_ascii():
    assert bin_labels((0, 10, 50)) == ["0", "1-10", "11-50", ">50"]
    assert bin_labels((0, 5, 25)) == ["0", "1-5", "6-25", ">25"]
    assert bin_labels((2, 3)) == ["0-2", "3", ">3"]


def test_reference_bins_with_unavailable_row(small):
    a, b, ms = small

    table = rows(breakdown_by_reference_count(ms, a, b, "a"))

    assert list(table) == ["0", "1-10", "11-50", ">50", "unavailable"]
    assert [table[k]["total"] for k in table] == [1, 0, 1, 1, 1]
    assert table["1-10"]["overlap_pct"] == 0.0
    assert table["0"]["overlap"] == 1


def test_reference_bins_unavailable_on_side_without_counts(small):
    a, b, ms = small
    table = rows(breakdown_by_reference_count(ms, a, b, "b"))
    assert table["unavailable"]["total"] == 3
    assert table["unavailable"]["overlap"] == 2


def test_citation_bins_count_in_degree(small):
    """A2 is cited three times, everyone else never."""
    a, b, ms = small

    table = rows(breakdown_by_citation_count(ms, a, b, "a", bins=(0, 2)))

    assert list(table) == ["0", "1-2", ">2"]
    assert (table["0"]["total"], table[">2"]["total"]) == (3, 1)
    assert table[">2"]["overlap"] == 1


def test_language_table_and_rollup(small):
    a, b, ms = small

    langs, rollup = breakdown_by_language(ms, a, b, "a")

    assert list(rows(langs)) == ["de", "en", "english", "unknown"]
    roll = rows(rollup)
    assert list(roll) == ["english", "non-english", "unknown"]
    assert (roll["english"]["total"], roll["english"]["overlap"]) == (2, 2)
    assert (roll["non-english"]["total"], roll["unknown"]["total"]) == (1, 1)


def test_build_coverage_has_every_breakdown_and_sums_to_corpus_size(pair):
    ms = match_corpora(pair.a, pair.b)

    summary = build_coverage(ms, pair.a, pair.b)

    expected = {"year"} | {
        f"{name}_{side}" for side in "ab"
        for name in ("doctype", "discipline", "references", "citations", "language", "language_rollup")
    }
    assert set(summary.breakdowns) == expected
    assert summary.breakdowns["year"]["total_a"].sum() == len(pair.a)
    assert summary.breakdowns["year"]["total_b"].sum() == len(pair.b)
    for side, corpus in (("a", pair.a), ("b", pair.b)):
        for name in ("doctype", "references", "citations", "language", "language_rollup"):
            table = summary.breakdowns[f"{name}_{side}"]
            assert table["total"].sum() == len(corpus)
            assert table["overlap"].sum() == len(ms)


def test_empty_corpora_keep_special_rows(make_rec):
    ms = MatchSet()
    a, b = Corpus("a"), Corpus("b")
    summary = build_coverage(ms, a, b)
    assert summary.breakdowns["year"]["year"].tolist() == ["unknown"]
    assert summary.breakdowns["references_a"]["value"].tolist()[-1] == "unavailable"
    assert summary.breakdowns["discipline_b"]["value"].tolist() == ["unclassified"]
    assert summary.share_a_pct == 0.0


@pytest.mark.parametrize(
    "breakdown",
    [breakdown_by_discipline, breakdown_by_doctype, breakdown_by_reference_count, breakdown_by_citation_count],
)
def test_empty_corpus_breakdowns_report_zero_shares(breakdown):
    # ---------- Act ----------
    table = breakdown(MatchSet(), Corpus("a"), Corpus("b"), "a")

    # ---------- Assert ----------
    assert (table["total"] == 0).all()
    assert (table["overlap"] == 0).all()
    assert table["overlap_pct"].dtype == float
    assert (table["overlap_pct"] == 0.0).all()


def test_empty_corpus_language_rollup():
    langs, rollup = breakdown_by_language(MatchSet(), Corpus("a"), Corpus("b"), "b")
    assert langs["value"].tolist() == ["unknown"]
    assert rollup["value"].tolist() == ["english", "non-english", "unknown"]
    assert rollup["overlap_pct"].tolist() == [0.0, 0.0, 0.0]
