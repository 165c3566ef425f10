# tests/conftest.py

"""Shared fixtures: record builders and a seeded synthetic corpus pair.

`synthetic_pair(seed, ...)` builds corpus A and a corrupted copy B:
  - a share of A documents reappears in B with corruptions touching every
    attribute (DOI dropped or recased, title typos, diacritics on author
    names, page moved to article number, volume/issue noise, ISSN dropped)
  - the rest of B is unrelated documents
  - citation links of A are carried over to B for the shared documents,
    with some B documents losing their reference list entirely

The true correspondence is returned so tests can reason about recall.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from biblink.model import AuthorName, Corpus, DocumentRecord, SourceDescriptor

WORDS = [
    "citation", "analysis", "bibliometric", "coverage", "journal", "network", "scholarly",
    "database", "comparison", "indicator", "impact", "research", "evaluation", "science",
    "metrics", "publication", "open", "access", "repository", "disciplinary", "mapping",
    "collaboration", "productivity", "altmetrics", "patterns", "model", "growth", "retrieval",
]
SURNAMES = ["García", "Müller", "Nowak", "Smith", "Jensen", "Øster", "Lévy", "Kowalski", "Brown", "Żak"]
GIVEN = ["Ana", "Jan", "Lena", "Mark", "Olga", "Pere", "Rui", "Sven"]
JOURNALS = [("Journal of Informetrics", "1751-1577"), ("Scientometrics", "0138-9130"),
            ("Quantitative Science Studies", "2641-3337"), ("Research Policy", "0048-7333")]
DOCTYPES = ["article", "review", "letter", "conference paper"]
DISCIPLINES = ["information science", "computer science", "sociology", "economics"]


def rec(record_id: str, **fields) -> DocumentRecord:
    """Build a record with keyword shortcuts: `author="Last, First"`, `issn=`, `journal=`."""
    author = fields.pop("author", None)
    if author is not None:
        fields["authors"] = (AuthorName(full_name=author),)
    issn = fields.pop("issn", None)
    journal = fields.pop("journal", None)
    if issn is not None or journal is not None:
        fields["source"] = SourceDescriptor(
            issns=(issn,) if issn else (), title_variants=(journal,) if journal else ()
        )
    return DocumentRecord(record_id=record_id, **fields)


@dataclass
class SyntheticPair:
    a: Corpus
    b: Corpus
    truth: dict[str, str]


def _typo(rng: np.random.Generator, text: str) -> str:
    if len(text) < 4:
        return text
    i = int(rng.integers(1, len(text) - 1))
    return text[:i] + text[i + 1:]


def synthetic_pair(
    seed: int,
    n: int = 200,
    shared: float = 0.7,
    corruption: float = 0.3,
    links_per_doc: int = 3,
    doi_share: float = 0.9,
) -> SyntheticPair:
    """Seeded pair of corpora with a known correspondence (see module docstring)."""
    rng = np.random.default_rng(seed)

    a_docs: list[dict] = []
    for i in range(n):
        journal, issn = JOURNALS[int(rng.integers(len(JOURNALS)))]
        begin = int(rng.integers(1, 900))
        a_docs.append({
            "record_id": f"A{i:04d}",
            "doi": f"10.1000/x.{seed}.{i}" if rng.random() < doi_share else None,
            "authors": (AuthorName(
                last_name=SURNAMES[int(rng.integers(len(SURNAMES)))],
                first_name=GIVEN[int(rng.integers(len(GIVEN)))],
            ),),
            "title": " ".join(rng.choice(WORDS, size=int(rng.integers(4, 9)), replace=False)).capitalize(),
            "source": SourceDescriptor(issns=(issn,), title_variants=(journal,)),
            "publication_year": str(int(rng.integers(2010, 2016))),
            "volume": str(int(rng.integers(1, 40))),
            "issue": str(int(rng.integers(1, 12))),
            "begin_page": str(begin),
            "end_page": str(begin + int(rng.integers(5, 30))),
            "document_type": DOCTYPES[int(rng.integers(len(DOCTYPES)))],
            "language": "en" if rng.random() < 0.8 else "de",
            "discipline_labels": tuple(
                str(x) for x in rng.choice(DISCIPLINES, size=int(rng.integers(0, 3)), replace=False)
            ),
        })

    ids_a = [d["record_id"] for d in a_docs]
    refs_a = {
        rid: tuple(sorted({str(x) for x in rng.choice(ids_a, size=links_per_doc)} - {rid}))
        for rid in ids_a
    }
    for d in a_docs:
        d["references"] = refs_a[d["record_id"]]
        d["reference_count"] = len(d["references"]) + int(rng.integers(0, 5))

    truth: dict[str, str] = {}
    b_docs: list[dict] = []
    for d in a_docs:
        if rng.random() >= shared:
            continue
        bid = f"B{len(b_docs):04d}"
        truth[d["record_id"]] = bid
        e = dict(d, record_id=bid)
        if rng.random() < corruption:
            e["doi"] = None if rng.random() < 0.5 else (d["doi"].upper() if d["doi"] else None)
        if rng.random() < corruption:
            e["title"] = _typo(rng, d["title"])
        if rng.random() < corruption:
            au = d["authors"][0]
            e["authors"] = (AuthorName(full_name=f"{au.first_name} {au.last_name.upper()}"),)
        if rng.random() < corruption:
            e["article_number"], e["begin_page"], e["end_page"] = d["begin_page"], None, None
        if rng.random() < corruption:
            e["volume"] = f"Vol. {d['volume']}"
        if rng.random() < corruption:
            e["issue"] = None
        if rng.random() < corruption:
            e["source"] = SourceDescriptor(title_variants=d["source"].title_variants)
        b_docs.append(e)

    for _ in range(n // 4):
        bid = f"B{len(b_docs):04d}"
        journal, issn = JOURNALS[int(rng.integers(len(JOURNALS)))]
        b_docs.append({
            "record_id": bid,
            "doi": f"10.2000/y.{seed}.{bid}",
            "authors": (AuthorName(full_name=f"{GIVEN[0]} {SURNAMES[int(rng.integers(len(SURNAMES)))]}"),),
            "title": " ".join(rng.choice(WORDS, size=5, replace=False)),
            "source": SourceDescriptor(issns=(issn,), title_variants=(journal,)),
            "publication_year": str(int(rng.integers(2010, 2016))),
            "volume": str(int(rng.integers(1, 40))),
            "begin_page": str(int(rng.integers(1, 900))),
        })

    for e in b_docs:
        refs = tuple(sorted(truth[r] for r in e.get("references", ()) if r in truth and rng.random() < 0.9))
        if rng.random() < 0.1:
            e["references"], e["reference_count"] = (), (None if rng.random() < 0.5 else 0)
        else:
            e["references"], e["reference_count"] = refs, len(refs)

    a = Corpus("a", tuple(DocumentRecord(**d) for d in a_docs))
    b = Corpus("b", tuple(DocumentRecord(**e) for e in b_docs))
    return SyntheticPair(a, b, truth)


@pytest.fixture
def pair() -> SyntheticPair:
    return synthetic_pair(seed=11)


@pytest.fixture
def make_rec():
    """The `rec` builder as a fixture."""
    return rec


@pytest.fixture
def synthetic():
    """The `synthetic_pair` factory as a fixture."""
    return synthetic_pair
