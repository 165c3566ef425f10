# src/biblink/report.py

"""
Running the full comparison and writing every output file.

`analyze` runs matching, coverage, citation comparison, the review
worksheets and the threshold check for two corpora; `emit_reports` writes
the results to one directory:

  - matches.csv / matches.parquet, step_summary.csv, near_misses.csv
  - overlap.json, breakdown_<name>.csv
  - linkdiff.json, discrepancy_worksheet.csv
  - unmatched_worksheet_a.csv, unmatched_worksheet_b.csv, matched_worksheet.csv
  - threshold_sensitivity.csv
  - report.html (+ styles.css), rendered with Jinja2
  - manifest.json: config echo, input hashes, output hashes

CSV files are UTF-8 with a header row, JSON files are indented with sorted
keys, and nothing depends on the clock, so the same inputs and config give
byte-identical files.

Typical usage:
    >>> from biblink.report import analyze, emit_reports
    >>> results = analyze(corpus_a, corpus_b, cfg)       # doctest: +SKIP
    >>> emit_reports(results, Path("out/"))              # doctest: +SKIP
"""

from __future__ import annotations

import hashlib
import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd
from jinja2 import Environment, FileSystemLoader, select_autoescape
from loguru import logger

from . import __version__
from .citations import LinkDiff, diff_links, sample_discrepancies
from .config import RunConfig
from .coverage import OverlapSummary, build_coverage
from .errors import InputError
from .io_ndjson import SCHEMA_VERSION
from .matcher import MatchSet, match_corpora, threshold_sensitivity
from .model import Corpus
from .sampling import sample_matched, sample_unmatched

TEMPLATE_DIR = Path(__file__).resolve().parent / "templates"


@dataclass
class AnalysisResults:
    """Everything one run produced, ready to be written out."""

    config: RunConfig
    corpus_a: Corpus
    corpus_b: Corpus
    matches: MatchSet
    coverage: OverlapSummary | None = None
    link_diff: LinkDiff | None = None
    worksheets: dict[str, pd.DataFrame] = field(default_factory=dict)
    sensitivity: pd.DataFrame | None = None
    inputs: dict[str, Path] = field(default_factory=dict)


def analyze(a: Corpus, b: Corpus, cfg: RunConfig, inputs: dict[str, Path] | None = None) -> AnalysisResults:
    """Run every analysis on two corpora with one configuration.

    Args:
        a: Corpus A (the baseline).
        b: Corpus B.
        cfg: Run configuration.
        inputs: Input files by role, hashed into the manifest.
    """
    w = cfg.effective_weights
    match_kwargs = {"key_cap": cfg.key_cap, "n_jobs": cfg.n_jobs, "resolution": cfg.resolution}

    ms = match_corpora(a, b, w, **match_kwargs)
    diff = diff_links(a, b, ms)
    results = AnalysisResults(
        config=cfg,
        corpus_a=a,
        corpus_b=b,
        matches=ms,
        coverage=build_coverage(ms, a, b, reference_bins=cfg.reference_bins, citation_bins=cfg.citation_bins),
        link_diff=diff,
        worksheets={
            "unmatched_worksheet_a": sample_unmatched(ms, a, b, "a", cfg.unmatched_sample, cfg.seed),
            "unmatched_worksheet_b": sample_unmatched(ms, a, b, "b", cfg.unmatched_sample, cfg.seed),
            "matched_worksheet": sample_matched(ms, a, b, cfg.matched_sample, cfg.seed),
            "discrepancy_worksheet": sample_discrepancies(diff, a, b, ms, cfg.discrepancy_sample, cfg.seed),
        },
        sensitivity=threshold_sensitivity(a, b, w, cfg.sensitivity_thresholds, **match_kwargs),
        inputs=dict(inputs or {}),
    )
    return results


# -----------------------
# Writers
# -----------------------

def prepare_out_dir(out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out_dir}: {exc}") from exc
    return out_dir


def write_csv(df: pd.DataFrame, path: Path) -> Path:
    try:
        df.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote {} ({} rows)", path, len(df))
    return path


def write_json(obj: Any, path: Path) -> Path:
    try:
        path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote {}", path)
    return path


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_match_outputs(ms: MatchSet, out_dir: Path) -> list[Path]:
    """matches.csv, matches.parquet, step_summary.csv and near_misses.csv."""
    table = ms.to_frame()
    parquet = out_dir / "matches.parquet"
    try:
        table.to_parquet(parquet, index=False)
    except OSError as exc:
        raise InputError(f"cannot write {parquet}: {exc}") from exc
    return [
        write_csv(table, out_dir / "matches.csv"),
        parquet,
        write_csv(ms.step_summary(), out_dir / "step_summary.csv"),
        write_csv(ms.near_miss_frame(), out_dir / "near_misses.csv"),
    ]


def write_coverage(summary: OverlapSummary, out_dir: Path) -> list[Path]:
    """overlap.json and one breakdown_<name>.csv per breakdown."""
    paths = [write_json(summary.to_dict(), out_dir / "overlap.json")]
    for name, table in sorted(summary.breakdowns.items()):
        paths.append(write_csv(table, out_dir / f"breakdown_{name}.csv"))
    return paths


def write_link_diff(diff: LinkDiff, out_dir: Path) -> list[Path]:
    return [write_json(diff.summary(), out_dir / "linkdiff.json")]


def write_worksheets(worksheets: dict[str, pd.DataFrame], out_dir: Path) -> list[Path]:
    return [write_csv(sheet, out_dir / f"{name}.csv") for name, sheet in sorted(worksheets.items())]


# -----------------------
# HTML
# -----------------------

def _get_template_env() -> Environment:
    """Jinja2 environment over the package's `templates/` directory, HTML auto-escaped."""
    return Environment(
        loader=FileSystemLoader(str(TEMPLATE_DIR)),
        autoescape=select_autoescape(["html", "xml"]),
    )


def _table(df: pd.DataFrame) -> dict[str, Any]:
    return {"columns": list(df.columns), "rows": df.to_dict(orient="records")}


def build_html_report(results: AnalysisResults, out_path: Path) -> Path:
    """Render `templates/report.html` and copy `styles.css` next to it."""
    context: dict[str, Any] = {
        "version": __version__,
        "corpus_a": {"id": results.corpus_a.corpus_id, "records": len(results.corpus_a)},
        "corpus_b": {"id": results.corpus_b.corpus_id, "records": len(results.corpus_b)},
        "threshold": results.config.effective_weights.threshold,
        "steps": _table(results.matches.step_summary()),
        "overlap": results.coverage.to_dict() if results.coverage else None,
        "breakdowns": {
            name: _table(df) for name, df in sorted((results.coverage.breakdowns if results.coverage else {}).items())
        },
        "linkdiff": results.link_diff.summary() if results.link_diff else None,
        "sensitivity": _table(results.sensitivity) if results.sensitivity is not None else None,
    }
    html = _get_template_env().get_template("report.html").render(report=context)
    out_path = Path(out_path)
    try:
        out_path.write_text(html, encoding="utf-8")
        shutil.copy2(TEMPLATE_DIR / "styles.css", out_path.parent / "styles.css")
    except OSError as exc:
        raise InputError(f"cannot write {out_path}: {exc}") from exc
    logger.info("wrote {}", out_path)
    return out_path


# -----------------------
# Manifest
# -----------------------

def build_manifest(results: AnalysisResults, outputs: list[Path]) -> dict[str, Any]:
    """Config echo plus content hashes of the inputs and of every output."""
    return {
        "tool": "biblink",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config": results.config.to_manifest(),
        "inputs": {
            role: {"path": str(path), "sha256": sha256_file(path)}
            for role, path in sorted(results.inputs.items())
        },
        "corpora": {
            "a": {"corpus_id": results.corpus_a.corpus_id, "records": len(results.corpus_a)},
            "b": {"corpus_id": results.corpus_b.corpus_id, "records": len(results.corpus_b)},
        },
        "outputs": {p.name: sha256_file(p) for p in sorted(outputs)},
    }


def emit_reports(results: AnalysisResults, out_dir: Path) -> list[Path]:
    """Write every output of a run into `out_dir`, manifest last.

    Raises:
        InputError: the directory or a file cannot be written.
    """
    out_dir = prepare_out_dir(out_dir)
    paths = write_match_outputs(results.matches, out_dir)
    if results.coverage is not None:
        paths += write_coverage(results.coverage, out_dir)
    if results.link_diff is not None:
        paths += write_link_diff(results.link_diff, out_dir)
    paths += write_worksheets(results.worksheets, out_dir)
    if results.sensitivity is not None:
        paths.append(write_csv(results.sensitivity, out_dir / "threshold_sensitivity.csv"))
    paths.append(build_html_report(results, out_dir / "report.html"))
    paths.append(out_dir / "styles.css")

    paths.append(write_json(build_manifest(results, paths), out_dir / "manifest.json"))
    return paths
