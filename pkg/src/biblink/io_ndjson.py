# src/biblink/io_ndjson.py

"""
NDJSON corpus ingestion and writing, and reloading of match checkpoints.

Corpus files hold one `DocumentRecord` per line, as a JSON object whose keys
are exactly the model's field names plus `schema_version`. The schema ships
as `biblink/schema/document_record.schema.json`.

Ingestion is tolerant: a line that is not valid JSON or does not validate is
collected as a `LineError` (with its 1-based line number) and skipped. The run
aborts only when the malformed share exceeds `max_malformed_fraction`
(default 1%). Blank lines are ignored. A line that declares a different
`schema_version` stops ingestion immediately.

Typical usage:
    >>> from biblink.io_ndjson import ingest_corpus
    >>> corpus = ingest_corpus("data/scopus.ndjson")
    >>> len(corpus)
    3
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd
from loguru import logger
from pydantic import ValidationError

from .errors import InputError, MalformedInputError, SchemaVersionError
from .matcher import MATCH_COLUMNS, NEAR_MISS_COLUMNS, MatchedPair, MatchSet, NearMiss
from .model import Corpus, DocumentRecord
from .similarity import ScoreBreakdown

SCHEMA_VERSION = 1
DEFAULT_MAX_MALFORMED = 0.01

SCHEMA_PATH = Path(__file__).resolve().parent / "schema" / "document_record.schema.json"


@dataclass(frozen=True)
class LineError:
    line_no: int
    message: str


@dataclass
class IngestReport:
    """A parsed corpus and the lines that had to be skipped."""

    corpus: Corpus
    errors: list[LineError] = field(default_factory=list)
    lines: int = 0

    @property
    def malformed_fraction(self) -> float:
        return len(self.errors) / self.lines if self.lines else 0.0

    def errors_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(e.line_no, e.message) for e in self.errors], columns=["line_no", "message"]
        )


def _parse_line(text: str, line_no: int, path: Path) -> DocumentRecord:
    obj = json.loads(text)
    if not isinstance(obj, dict):
        raise ValueError(f"expected a JSON object, got {type(obj).__name__}")
    version = obj.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"{path}:{line_no}: schema_version {version!r} is not supported (expected {SCHEMA_VERSION})"
        )
    return DocumentRecord.model_validate(obj)


def _short(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        return "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<record>'}: {err['msg']}" for err in exc.errors()
        )
    return str(exc)


def read_ingest_report(
    path: str | Path,
    corpus_id: str | None = None,
    max_malformed_fraction: float = DEFAULT_MAX_MALFORMED,
) -> IngestReport:
    """Parse an NDJSON corpus, keeping track of malformed lines.

    Args:
        path: NDJSON file.
        corpus_id: Name of the corpus; defaults to the file stem.
        max_malformed_fraction: Abort when more than this share of the
            non-blank lines is malformed.

    Returns:
        `IngestReport` with the corpus (records in file order) and line errors.

    Raises:
        InputError: the file cannot be read.
        SchemaVersionError: a line declares another schema version.
        MalformedInputError: the malformed share exceeds the limit.
    """
    path = Path(path)
    records: list[DocumentRecord] = []
    errors: list[LineError] = []
    lines = 0

    try:
        with path.open(encoding="utf-8") as fh:
            for line_no, text in enumerate(fh, start=1):
                if not text.strip():
                    continue
                lines += 1
                try:
                    records.append(_parse_line(text, line_no, path))
                except SchemaVersionError:
                    raise
                except (ValueError, ValidationError) as exc:
                    errors.append(LineError(line_no, _short(exc)))
                    logger.warning("{}:{}: skipping malformed line: {}", path, line_no, errors[-1].message)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read corpus {path}: {exc}") from exc

    report = IngestReport(Corpus(corpus_id or path.stem, tuple(records)), errors, lines)
    if report.malformed_fraction > max_malformed_fraction:
        raise MalformedInputError(
            f"{path}: {len(errors)} of {lines} lines malformed "
            f"({report.malformed_fraction:.2%} > {max_malformed_fraction:.2%})",
            errors,
            report.malformed_fraction,
        )
    logger.info("{}: {} records ingested, {} lines skipped", path, len(records), len(errors))
    return report


def ingest_corpus(
    path: str | Path,
    corpus_id: str | None = None,
    max_malformed_fraction: float = DEFAULT_MAX_MALFORMED,
) -> Corpus:
    """Parse an NDJSON corpus file; see `read_ingest_report` for the rules."""
    return read_ingest_report(path, corpus_id, max_malformed_fraction).corpus


def record_line(rec: DocumentRecord) -> str:
    """One NDJSON line (without newline) for a record, keys sorted."""
    body = rec.model_dump(mode="json", exclude_defaults=True)
    return json.dumps({"schema_version": SCHEMA_VERSION, **body}, sort_keys=True, ensure_ascii=False)


def write_corpus(corpus: Corpus, path: str | Path) -> Path:
    """Write every record of `corpus`, duplicates included, as NDJSON."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for rec in corpus.records:
                fh.write(record_line(rec) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write corpus {path}: {exc}") from exc
    return path


# -----------------------
# Match checkpoints
# -----------------------

def _read_csv(path: Path, columns: list[str]) -> pd.DataFrame:
    try:
        # record ids are opaque: "NA", "null" or "" must survive as strings
        df = pd.read_csv(
            path,
            dtype={"id_a": str, "id_b": str, "record_id": str, "other_id": str, "side": str},
            keep_default_na=False,
            na_filter=False,
        )
    except (OSError, pd.errors.EmptyDataError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise InputError(f"{path}: missing required columns: {missing}")
    return df


def _breakdown(row) -> ScoreBreakdown:
    return ScoreBreakdown(
        float(row.m_doi), float(row.m_first_author), float(row.m_title),
        float(row.m_source), float(row.m_other), float(row.total),
    )


def read_match_table(
    path: str | Path,
    a: Corpus,
    b: Corpus,
    near_misses_path: str | Path | None = None,
) -> MatchSet:
    """Rebuild a `MatchSet` from a `matches.csv` written by the `match` verb.

    Per-step candidate statistics are not part of the table, so
    `step_stats` is empty. Near misses are reloaded when their CSV is given.

    Raises:
        InputError: unreadable file, missing columns, or ids that are not in
            the corpora.
    """
    df = _read_csv(Path(path), MATCH_COLUMNS)
    pairs = tuple(sorted(
        (MatchedPair(row.id_a, row.id_b, int(row.step), _breakdown(row)) for row in df.itertuples(index=False)),
        key=lambda p: (p.id_a, p.id_b),
    ))

    ids_a, ids_b = set(a.by_id), set(b.by_id)
    unknown = [p.id_a for p in pairs if p.id_a not in ids_a] + [p.id_b for p in pairs if p.id_b not in ids_b]
    if unknown:
        raise InputError(f"{path}: {len(unknown)} matched ids not in the corpora, e.g. {unknown[0]!r}")

    near_a: dict[str, NearMiss] = {}
    near_b: dict[str, NearMiss] = {}
    if near_misses_path is not None:
        nm = _read_csv(Path(near_misses_path), NEAR_MISS_COLUMNS)
        for row in nm.sort_values(["side", "record_id"], kind="mergesort").itertuples(index=False):
            book = near_a if row.side == "a" else near_b
            book[row.record_id] = NearMiss(row.record_id, row.other_id, int(row.step), _breakdown(row))

    return MatchSet(
        pairs=pairs,
        unmatched_a=frozenset(ids_a - {p.id_a for p in pairs}),
        unmatched_b=frozenset(ids_b - {p.id_b for p in pairs}),
        near_misses_a=near_a,
        near_misses_b=near_b,
    )
