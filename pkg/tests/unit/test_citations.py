# tests/unit/test_citations.py

"""Unit tests for `citations`.

Covers:
  - Co-covered link sets and the shared / one-sided split on a hand-built pair
  - Cause classification (missing reference list: not available / empty; unexplained)
  - Agreement with a brute-force set computation on synthetic corpora
  - Swapping the corpora swaps the one-sided sets
  - Discrepancy worksheet layout and reproducibility

Run all unit tests:
    pytest tests/unit -q
Run this file:
    pytest tests/unit/test_citations.py -q
"""

import pytest

from biblink.citations import (
    MISSING_LIST,
    UNEXPLAINED,
    co_covered_links,
    diff_links,
    discrepancy_columns,
    sample_discrepancies,
)
from biblink.matcher import MatchedPair, MatchSet, match_corpora
from biblink.model import CitationLink, Corpus
from biblink.similarity import ScoreBreakdown


@pytest.fixture
def linked(make_rec):
    """Three matched pairs A1-B1, A2-B2, A3-B3 plus an unmatched A4.

    A links: A1->A2, A1->A3, A2->A3, A4->A1 (not co-covered)
    B links: B1->B2, B3->B1; B2 has no reference list, A3 an empty one.
    """
    a = Corpus("a", (
        make_rec("A1", references=("A2", "A3"), reference_count=2),
        make_rec("A2", references=("A3",), reference_count=1),
        make_rec("A3", reference_count=0),
        make_rec("A4", references=("A1",), reference_count=1),
    ))
    b = Corpus("b", (
        make_rec("B1", references=("B2",), reference_count=1),
        make_rec("B2", reference_count=None),
        make_rec("B3", references=("B1",), reference_count=1),
    ))
    bd = ScoreBreakdown(1, 1, 1, 1, 1, 55.0)
    ms = MatchSet(
        pairs=tuple(MatchedPair(f"A{i}", f"B{i}", 1, bd) for i in (1, 2, 3)),
        unmatched_a=frozenset({"A4"}),
    )
    return a, b, ms


def test_co_covered_links_need_both_ends_matched(linked):
    a, b, ms = linked
    assert co_covered_links(a, ms, "a") == {
        CitationLink("A1", "A2"), CitationLink("A1", "A3"), CitationLink("A2", "A3"),
    }
    assert co_covered_links(b, ms, "b") == {CitationLink("B1", "B2"), CitationLink("B3", "B1")}
    with pytest.raises(ValueError):
        co_covered_links(a, ms, "c")


def test_diff_splits_shared_and_one_sided_with_causes(linked):
    # ---------- Arrange ----------
    a, b, ms = linked

    # ---------- Act ----------
    diff = diff_links(a, b, ms)

    # ---------- Assert ----------
    assert (diff.shared, diff.total_a, diff.total_b) == (1, 3, 2)
    assert diff.only_a == (CitationLink("A1", "A3"), CitationLink("A2", "A3"))
    assert diff.only_b == (CitationLink("B3", "B1"),)
    assert diff.cause_a[CitationLink("A1", "A3")] == UNEXPLAINED
    assert diff.cause_a[CitationLink("A2", "A3")] == MISSING_LIST
    assert diff.detail_a == {CitationLink("A2", "A3"): "not_available"}
    assert diff.detail_b == {CitationLink("B3", "B1"): "empty"}
    assert diff.classified_only_a == {MISSING_LIST: 1, UNEXPLAINED: 1}
    assert diff.missing_detail_b == {"not_available": 0, "empty": 1}


def test_summary_percentages_are_relative_to_each_side(linked):
    a, b, ms = linked

    s = diff_links(a, b, ms).summary()

    assert s["shared"] == 1
    assert (s["co_covered_a"], s["only_a"], s["only_a_pct"]) == (3, 2, 66.667)
    assert s["shared_a_pct"] == 33.333
    assert (s["co_covered_b"], s["only_b"], s["only_b_pct"], s["shared_b_pct"]) == (2, 1, 50.0, 50.0)
    assert s["classified_only_b"][MISSING_LIST] == {"count": 1, "pct": 50.0}
    assert s["classified_only_b"][UNEXPLAINED] == {"count": 0, "pct": 0.0}


def _brute_force(a, b, ms):
    links_a = {(x, y) for x, y in a.links() if x in ms.a_to_b and y in ms.a_to_b}
    links_b = {(x, y) for x, y in b.links() if x in ms.b_to_a and y in ms.b_to_a}
    mapped_a = {(ms.a_to_b[x], ms.a_to_b[y]) for x, y in links_a}
    only_a = {(x, y) for x, y in links_a if (ms.a_to_b[x], ms.a_to_b[y]) not in links_b}
    only_b = {(x, y) for x, y in links_b if (x, y) not in mapped_a}
    return len(mapped_a & links_b), only_a, only_b


@pytest.mark.parametrize("seed", [41, 42, 43])
def test_diff_equals_brute_force_sets(synthetic, seed):
    # ---------- Arrange ----------
    p = synthetic(seed, n=150)
    ms = match_corpora(p.a, p.b)

    # ---------- Act ----------
    diff = diff_links(p.a, p.b, ms)
    shared, only_a, only_b = _brute_force(p.a, p.b, ms)

    # ---------- Assert ----------
    assert diff.shared == shared
    assert set(diff.only_a) == only_a
    assert set(diff.only_b) == only_b
    assert diff.shared + len(diff.only_a) == diff.total_a
    assert diff.shared + len(diff.only_b) == diff.total_b
    assert sum(diff.classified_only_a.values()) == len(diff.only_a)


def test_causes_follow_reference_count_of_matched_citing_document(synthetic):
    p = synthetic(44, n=150)
    ms = match_corpora(p.a, p.b)

    diff = diff_links(p.a, p.b, ms)

    for link in diff.only_a:
        count = p.b.by_id[ms.a_to_b[link.citing]].reference_count
        expected = MISSING_LIST if count in (None, 0) else UNEXPLAINED
        assert diff.cause_a[link] == expected
    assert diff.classified_only_a[MISSING_LIST] > 0


def test_swapping_corpora_swaps_one_sided_sets(pair):
    ms = match_corpora(pair.a, pair.b)

    forward = diff_links(pair.a, pair.b, ms)
    backward = diff_links(pair.b, pair.a, ms.inverted())

    assert backward.shared == forward.shared
    assert backward.only_a == forward.only_b
    assert backward.only_b == forward.only_a
    assert backward.classified_only_a == forward.classified_only_b


def test_discrepancy_worksheet(linked):
    a, b, ms = linked
    diff = diff_links(a, b, ms)

    sheet = sample_discrepancies(diff, a, b, ms, n=1, seed=3)
    again = sample_discrepancies(diff, a, b, ms, n=1, seed=3)

    assert list(sheet.columns) == discrepancy_columns()
    assert sheet["direction"].tolist() == ["only_a", "only_b"]
    assert sheet.equals(again)
    last = sheet.iloc[-1]
    assert (last["citing_b_record_id"], last["citing_a_record_id"]) == ("B3", "A3")
    assert last["missing_detail"] == "empty"
    assert last["cited_score"] == 55.0


def test_discrepancy_worksheet_empty_when_nothing_differs():
    diff = diff_links(Corpus("a"), Corpus("b"), MatchSet())
    sheet = sample_discrepancies(diff, Corpus("a"), Corpus("b"), MatchSet())
    assert sheet.empty
    assert list(sheet.columns) == discrepancy_columns()
