# src/biblink/harvest.py

"""
Crossref works harvester producing an NDJSON corpus.

Pages through `https://api.crossref.org/works` with cursor pagination and
maps every work to a `DocumentRecord`:

  - record_id and doi: the lowercased DOI
  - authors: family/given names (or `name` for organisations)
  - title, container titles (full and short) as source title variants,
    ISSN / ISBN, year from `issued`, volume, issue, pages, article number
  - document type, language, subjects as discipline labels
  - references: the DOIs in the open reference list; `reference_count` is the
    length of that list, and absent when Crossref has no open references

Works of the excluded content types (book parts, datasets, peer reviews,
posted content, ...) and works without a DOI are skipped.

Requests go through one `requests.Session` with a urllib3 `Retry`
(exponential backoff on 429/5xx, honouring `Retry-After`) and a polite-pool
`mailto`. Requests are paced from the `X-Rate-Limit-*` response headers.

The cursor is saved to `<output>.cursor` after every page; a rerun with the
cursor file present appends from there. When the last page is in, a final
pass drops duplicate records and references to DOIs outside the harvest.
"""

from __future__ import annotations

import re
import time
from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import requests
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from requests.adapters import HTTPAdapter
from urllib3.util.retry import Retry

from . import __version__
from .errors import HarvestError, InputError
from .io_ndjson import ingest_corpus, record_line, write_corpus
from .model import AuthorName, Corpus, DocumentRecord, SourceDescriptor
from .normalize import normalize_doi

CROSSREF_WORKS = "https://api.crossref.org/works"

EXCLUDED_TYPES = frozenset({
    "book-part", "book-section", "component", "dataset", "journal-issue",
    "peer-review", "posted-content", "proceedings", "proceedings-series",
    "report-series", "standard",
})

_DATE = re.compile(r"^\d{4}(-\d{2}(-\d{2})?)?$")
_INTERVAL = re.compile(r"^(\d+(?:\.\d+)?)s$")


class CrossrefFilter(BaseModel):
    """Which works to harvest: a publication-date range and/or a DOI prefix."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    from_date: str | None = None
    until_date: str | None = None
    prefix: str | None = None
    rows: int = Field(default=500, ge=1, le=1000)

    @field_validator("from_date", "until_date")
    @classmethod
    def _date_shape(cls, value: str | None) -> str | None:
        if value is not None and not _DATE.match(value):
            raise ValueError(f"dates must look like YYYY[-MM[-DD]], got {value!r}")
        return value

    def params(self) -> dict[str, Any]:
        parts = [
            f"{key}:{value}"
            for key, value in (("from-pub-date", self.from_date), ("until-pub-date", self.until_date))
            if value is not None
        ]
        if self.prefix:
            parts.append(f"prefix:{self.prefix}")
        params: dict[str, Any] = {"rows": self.rows}
        if parts:
            params["filter"] = ",".join(parts)
        return params


@dataclass
class HarvestSummary:
    pages: int = 0
    works_seen: int = 0
    written: int = 0
    skipped: Counter[str] = field(default_factory=Counter)
    resumed: bool = False


def make_session(mailto: str, retries: int = 5, backoff: float = 1.0) -> requests.Session:
    """Session with retries on rate limiting and server errors, identified for the polite pool."""
    retry = Retry(
        total=retries,
        backoff_factor=backoff,
        status_forcelist=(429, 500, 502, 503, 504),
        allowed_methods=frozenset({"GET"}),
        respect_retry_after_header=True,
        raise_on_status=False,
    )
    session = requests.Session()
    session.mount("https://", HTTPAdapter(max_retries=retry))
    session.mount("http://", HTTPAdapter(max_retries=retry))
    session.headers["User-Agent"] = f"biblink/{__version__} (mailto:{mailto})"
    return session


# -----------------------
# Work mapping
# -----------------------

def _first(values: Any) -> str | None:
    if isinstance(values, list) and values:
        return str(values[0]).strip() or None
    return None


def _year(work: dict[str, Any]) -> str | None:
    for key in ("issued", "published-print", "published-online", "published"):
        parts = (work.get(key) or {}).get("date-parts") or []
        if parts and parts[0] and parts[0][0] is not None:
            return str(parts[0][0])
    return None


def _authors(work: dict[str, Any]) -> tuple[AuthorName, ...]:
    out = []
    for au in work.get("author") or []:
        family, given, name = au.get("family"), au.get("given"), au.get("name")
        try:
            if family:
                out.append(AuthorName(last_name=family, first_name=given))
            elif name:
                out.append(AuthorName(full_name=name))
        except ValidationError:
            continue
    return tuple(out)


def _pages(page: str | None) -> tuple[str | None, str | None]:
    if not page:
        return None, None
    begin, _, end = page.partition("-")
    return begin.strip() or None, end.strip() or None


def map_work(work: dict[str, Any]) -> DocumentRecord | None:
    """Map one Crossref work to a record; None for excluded types and works without DOI."""
    doi = normalize_doi(work.get("DOI"))
    if doi is None or work.get("type") in EXCLUDED_TYPES:
        return None

    references: tuple[str, ...] = ()
    reference_count = None
    if isinstance(work.get("reference"), list):
        reference_count = len(work["reference"])
        cited = (normalize_doi(ref.get("DOI")) for ref in work["reference"] if isinstance(ref, dict))
        references = tuple(dict.fromkeys(c for c in cited if c and c != doi))

    begin, end = _pages(work.get("page"))
    return DocumentRecord(
        record_id=doi,
        doi=doi,
        authors=_authors(work),
        title=_first(work.get("title")),
        source=SourceDescriptor(
            issns=tuple(work.get("ISSN") or ()),
            isbns=tuple(work.get("ISBN") or ()),
            title_variants=tuple((work.get("container-title") or []) + (work.get("short-container-title") or [])),
        ),
        publication_year=_year(work),
        volume=work.get("volume"),
        issue=work.get("issue"),
        begin_page=begin,
        end_page=end,
        article_number=work.get("article-number"),
        document_type=work.get("type"),
        language=work.get("language"),
        discipline_labels=tuple(work.get("subject") or ()),
        reference_count=reference_count,
        references=references,
    )


# -----------------------
# Paging
# -----------------------

def pace_seconds(headers: Any) -> float:
    """Delay between requests implied by `X-Rate-Limit-Limit` / `X-Rate-Limit-Interval`.

    Example:
        >>> pace_seconds({"X-Rate-Limit-Limit": "50", "X-Rate-Limit-Interval": "1s"})
        0.02
    """
    try:
        limit = int(headers.get("X-Rate-Limit-Limit", 0))
        interval = _INTERVAL.match(str(headers.get("X-Rate-Limit-Interval", "")).strip())
    except (TypeError, ValueError):
        return 0.0
    if limit <= 0 or interval is None:
        return 0.0
    return float(interval.group(1)) / limit


def _fetch_page(
    session: requests.Session,
    params: dict[str, Any],
    timeout: float,
    cursor_file: Path | None = None,
) -> requests.Response:
    """GET one page; `cursor_file` names the saved cursor when resuming from it."""
    try:
        resp = session.get(CROSSREF_WORKS, params=params, timeout=timeout)
    except requests.RequestException as exc:
        raise HarvestError(f"Crossref request failed: {exc}") from exc
    if cursor_file is not None and 400 <= resp.status_code < 500:
        raise HarvestError(
            f"Crossref rejected the saved cursor in {cursor_file} (HTTP {resp.status_code}); "
            "cursors expire a few minutes after the last request, delete the file to restart the harvest"
        )
    if resp.status_code != 200:
        raise HarvestError(f"Crossref returned HTTP {resp.status_code}: {resp.text[:200]}")
    return resp


def prune_harvest(output: Path) -> Corpus:
    """Rewrite a harvested file without duplicate ids or references leaving the harvest."""
    corpus = ingest_corpus(output, max_malformed_fraction=0.0)
    known = set(corpus.by_id)
    kept = tuple(
        rec.model_copy(update={"references": tuple(r for r in rec.references if r in known)})
        for rec in corpus.by_id.values()
    )
    pruned = Corpus(corpus.corpus_id, kept)
    write_corpus(pruned, output)
    logger.info("{}: {} records after pruning", output, len(pruned))
    return pruned


def harvest_crossref(
    flt: CrossrefFilter,
    output: str | Path,
    *,
    mailto: str,
    session: requests.Session | None = None,
    max_pages: int | None = None,
    timeout: float = 60.0,
    sleep: Callable[[float], None] = time.sleep,
) -> HarvestSummary:
    """Harvest Crossref works matching `flt` into an NDJSON corpus file.

    Args:
        flt: Date range / DOI prefix and page size.
        output: NDJSON file to write (appended to when resuming).
        mailto: Contact address for the polite pool.
        session: HTTP session; defaults to `make_session(mailto)`.
        max_pages: Stop after this many pages (the cursor stays for resuming).
        timeout: Per-request timeout in seconds.
        sleep: Called with the pacing delay between pages.

    Returns:
        `HarvestSummary` with page, work and skip counts.

    Raises:
        HarvestError: a request still fails after the session's retries.
        InputError: the output or cursor file cannot be written.
    """
    output = Path(output)
    cursor_path = output.with_name(output.name + ".cursor")
    session = session or make_session(mailto)
    summary = HarvestSummary()

    cursor = "*"
    if cursor_path.exists():
        cursor = cursor_path.read_text(encoding="utf-8").strip() or "*"
        summary.resumed = True
        logger.info("resuming harvest into {} from saved cursor", output)

    base = {**flt.params(), "mailto": mailto}
    try:
        output.parent.mkdir(parents=True, exist_ok=True)
        with output.open("a" if summary.resumed else "w", encoding="utf-8", newline="\n") as fh:
            while max_pages is None or summary.pages < max_pages:
                saved = cursor_path if summary.resumed and summary.pages == 0 else None
                resp = _fetch_page(session, {**base, "cursor": cursor}, timeout, saved)
                message = resp.json().get("message", {})
                items = message.get("items") or []
                summary.pages += 1
                logger.debug("page {}: {} works", summary.pages, len(items))

                for work in items:
                    summary.works_seen += 1
                    rec = map_work(work)
                    if rec is None:
                        summary.skipped[work.get("type") or "no-doi"] += 1
                        continue
                    fh.write(record_line(rec) + "\n")
                    summary.written += 1
                fh.flush()

                next_cursor = message.get("next-cursor")
                if not items or not next_cursor:
                    cursor_path.unlink(missing_ok=True)
                    break
                cursor = next_cursor
                cursor_path.write_text(cursor, encoding="utf-8")

                delay = pace_seconds(resp.headers)
                if delay > 0:
                    sleep(delay)
    except OSError as exc:
        raise InputError(f"cannot write harvest output {output}: {exc}") from exc

    if not cursor_path.exists():
        prune_harvest(output)
    logger.info("harvest: {} pages, {} works, {} written, skipped {}",
                summary.pages, summary.works_seen, summary.written, dict(summary.skipped))
    return summary
