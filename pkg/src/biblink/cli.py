# src/biblink/cli.py


"""Command-line entrypoints for the biblink pipeline.

Each verb reads and writes plain files, so long runs can stop and resume
between phases:

  validate   one corpus           -> issues.csv, ingest_errors.csv
  match      two corpora          -> matches.csv/.parquet, step_summary.csv, near_misses.csv
  coverage   corpora + matches    -> overlap.json, breakdown_*.csv
  citediff   corpora + matches    -> linkdiff.json, discrepancy_worksheet.csv
  sample     corpora + matches    -> unmatched_worksheet_{a,b}.csv, matched_worksheet.csv
  harvest    Crossref REST API    -> corpus NDJSON (+ .cursor while incomplete)
  report     two corpora          -> all of the above + report.html, manifest.json

Exit codes: 0 success, 1 validation failure (`validate --strict`), 2 input or
output failure, 3 invalid configuration.

Usage (examples):
    biblink match --corpus-a data/scopus.ndjson --corpus-b data/wos.ndjson --out out/
    biblink report --config out/manifest.json --out rerun/
    biblink harvest --output data/crossref.ndjson --mailto me@example.org --from-date 2017-01-01
"""


from __future__ import annotations

import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any, Optional

import pandas as pd
import typer
from loguru import logger

from .citations import diff_links, sample_discrepancies
from .config import RunConfig
from .coverage import build_coverage
from .errors import BiblinkError, ConfigError, ValidationFailed
from .harvest import CrossrefFilter, harvest_crossref, make_session
from .io_ndjson import read_ingest_report, read_match_table
from .matcher import match_corpora
from .model import Corpus, validate_corpus
from .report import (
    analyze,
    emit_reports,
    prepare_out_dir,
    write_coverage,
    write_csv,
    write_link_diff,
    write_match_outputs,
)
from .sampling import sample_matched, sample_unmatched

app = typer.Typer(add_completion=False, help="Match and compare bibliographic databases.")


def exit_code(exc: BiblinkError) -> int:
    """1 for validation failures, 3 for configuration errors, 2 for everything else."""
    if isinstance(exc, ValidationFailed):
        return 1
    if isinstance(exc, ConfigError):
        return 3
    return 2


@contextmanager
def _exit_on_error() -> Iterator[None]:
    try:
        yield
    except BiblinkError as exc:
        logger.error("{}", exc)
        raise typer.Exit(code=exit_code(exc)) from exc


# --- Shared options ---

CorpusA = Annotated[Optional[Path], typer.Option("--corpus-a", help="NDJSON corpus A", dir_okay=False)]
CorpusB = Annotated[Optional[Path], typer.Option("--corpus-b", help="NDJSON corpus B", dir_okay=False)]
OutDir = Annotated[Optional[Path], typer.Option("--out", "-o", help="Output dir", file_okay=False)]
ConfigFile = Annotated[
    Optional[Path],
    typer.Option("--config", help="JSON config or run manifest", exists=True, dir_okay=False),
]
Threshold = Annotated[Optional[float], typer.Option(help="Match threshold (strict >)")]
Seed = Annotated[Optional[int], typer.Option(help="Sampling seed")]
MatchesFile = Annotated[
    Path, typer.Option("--matches", help="matches.csv from `biblink match`", exists=True, dir_okay=False)
]


def _load_config(config: Path | None, **overrides: Any) -> RunConfig:
    """Config file (if any), then CLI values that were actually given."""
    given = {k: v for k, v in overrides.items() if v is not None}
    threshold = given.pop("threshold", None)
    cfg = RunConfig.from_file(config, **given) if config else RunConfig.build(**given)
    if threshold is not None:
        weights = {**cfg.weights.model_dump(), "threshold": threshold}
        cfg = RunConfig.build(**{**cfg.model_dump(), "weights": weights})
    return cfg


def _load_pair(cfg: RunConfig) -> tuple[Corpus, Corpus, dict[str, Path]]:
    """Read both corpora; `baseline="b"` makes the second input corpus A."""
    if cfg.path_a is None or cfg.path_b is None:
        raise ConfigError("both --corpus-a and --corpus-b (or path_a/path_b in the config) are required")
    first = read_ingest_report(cfg.path_a, max_malformed_fraction=cfg.max_malformed_fraction).corpus
    second = read_ingest_report(cfg.path_b, max_malformed_fraction=cfg.max_malformed_fraction).corpus
    if cfg.baseline == "b":
        return second, first, {"a": cfg.path_b, "b": cfg.path_a}
    return first, second, {"a": cfg.path_a, "b": cfg.path_b}


@app.callback()
def main(
    log_level: Annotated[str, typer.Option("--log-level", help="DEBUG|INFO|WARNING|ERROR")] = "INFO",
) -> None:
    """Install the single stderr log sink."""
    logger.remove()
    logger.add(sys.stderr, level=log_level.upper(), format="{time:HH:mm:ss} | {level: <7} | {message}")


@app.command()
def validate(
    corpus: Annotated[Path, typer.Option("--corpus", help="NDJSON corpus", exists=True, dir_okay=False)],
    out: OutDir = Path("out"),
    strict: Annotated[bool, typer.Option(help="Exit 1 when any issue is found")] = False,
    max_malformed: Annotated[float, typer.Option(min=0.0, max=1.0, help="Tolerated malformed-line share")] = 0.01,
) -> None:
    """Check one corpus: malformed lines, duplicate ids, dangling references, count mismatches."""
    with _exit_on_error():
        report = read_ingest_report(corpus, max_malformed_fraction=max_malformed)
        issues = validate_corpus(report.corpus)
        out = prepare_out_dir(out)
        write_csv(pd.DataFrame(issues, columns=["kind", "record_id", "detail"]), out / "issues.csv")
        write_csv(report.errors_frame(), out / "ingest_errors.csv")
        typer.echo(f"{len(report.corpus)} records, {len(report.errors)} malformed lines, {len(issues)} issues")
        if strict and (issues or report.errors):
            raise ValidationFailed(f"{corpus}: {len(issues)} issues, {len(report.errors)} malformed lines")


@app.command()
def match(
    corpus_a: CorpusA = None,
    corpus_b: CorpusB = None,
    out: OutDir = None,
    config: ConfigFile = None,
    threshold: Threshold = None,
    key_cap: Annotated[Optional[int], typer.Option(help="Blocking key-explosion cap")] = None,
    n_jobs: Annotated[Optional[int], typer.Option(help="Scoring workers")] = None,
    resolution: Annotated[Optional[str], typer.Option(help="greedy|optimal")] = None,
    legacy_first_author: Annotated[Optional[bool], typer.Option(help="Legacy first-author formula")] = None,
    baseline: Annotated[Optional[str], typer.Option(help="Which input is corpus A: a|b")] = None,
) -> None:
    """Match two corpora with the six blocking steps."""
    with _exit_on_error():
        cfg = _load_config(
            config, path_a=corpus_a, path_b=corpus_b, out_dir=out, threshold=threshold, key_cap=key_cap,
            n_jobs=n_jobs, resolution=resolution, legacy_first_author=legacy_first_author, baseline=baseline,
        )
        a, b, _ = _load_pair(cfg)
        ms = match_corpora(
            a, b, cfg.effective_weights, key_cap=cfg.key_cap, n_jobs=cfg.n_jobs, resolution=cfg.resolution
        )
        write_match_outputs(ms, prepare_out_dir(cfg.out_dir))
        typer.echo(f"{len(ms)} matches written to {cfg.out_dir / 'matches.csv'}")


@app.command()
def coverage(
    matches: MatchesFile,
    corpus_a: CorpusA = None,
    corpus_b: CorpusB = None,
    out: OutDir = None,
    config: ConfigFile = None,
    baseline: Annotated[Optional[str], typer.Option(help="Which input is corpus A: a|b")] = None,
) -> None:
    """Overlap summary and breakdowns from an existing match table."""
    with _exit_on_error():
        cfg = _load_config(config, path_a=corpus_a, path_b=corpus_b, out_dir=out, baseline=baseline)
        a, b, _ = _load_pair(cfg)
        ms = read_match_table(matches, a, b)
        summary = build_coverage(ms, a, b, reference_bins=cfg.reference_bins, citation_bins=cfg.citation_bins)
        write_coverage(summary, prepare_out_dir(cfg.out_dir))
        typer.echo(f"overlap {summary.overlap}: {summary.share_a_pct}% of A, {summary.share_b_pct}% of B")


@app.command()
def citediff(
    matches: MatchesFile,
    corpus_a: CorpusA = None,
    corpus_b: CorpusB = None,
    out: OutDir = None,
    config: ConfigFile = None,
    n: Annotated[Optional[int], typer.Option(help="Sampled links per direction")] = None,
    seed: Seed = None,
    baseline: Annotated[Optional[str], typer.Option(help="Which input is corpus A: a|b")] = None,
) -> None:
    """Compare citation links between co-covered documents."""
    with _exit_on_error():
        cfg = _load_config(
            config, path_a=corpus_a, path_b=corpus_b, out_dir=out, discrepancy_sample=n, seed=seed,
            baseline=baseline,
        )
        a, b, _ = _load_pair(cfg)
        ms = read_match_table(matches, a, b)
        diff = diff_links(a, b, ms)
        out_dir = prepare_out_dir(cfg.out_dir)
        write_link_diff(diff, out_dir)
        sheet = sample_discrepancies(diff, a, b, ms, cfg.discrepancy_sample, cfg.seed)
        write_csv(sheet, out_dir / "discrepancy_worksheet.csv")
        typer.echo(f"shared {diff.shared}, only in A {len(diff.only_a)}, only in B {len(diff.only_b)}")


@app.command()
def sample(
    matches: MatchesFile,
    corpus_a: CorpusA = None,
    corpus_b: CorpusB = None,
    near_misses: Annotated[
        Optional[Path], typer.Option(help="near_misses.csv from `biblink match`", exists=True, dir_okay=False)
    ] = None,
    out: OutDir = None,
    config: ConfigFile = None,
    n: Annotated[Optional[int], typer.Option(help="Unmatched documents per side")] = None,
    n_matched: Annotated[Optional[int], typer.Option(help="Matched pairs for the precision check")] = None,
    seed: Seed = None,
    baseline: Annotated[Optional[str], typer.Option(help="Which input is corpus A: a|b")] = None,
) -> None:
    """Seeded review worksheets of unmatched documents and matched pairs."""
    with _exit_on_error():
        cfg = _load_config(
            config, path_a=corpus_a, path_b=corpus_b, out_dir=out, unmatched_sample=n,
            matched_sample=n_matched, seed=seed, baseline=baseline,
        )
        a, b, _ = _load_pair(cfg)
        if near_misses is None and (matches.parent / "near_misses.csv").exists():
            near_misses = matches.parent / "near_misses.csv"
        ms = read_match_table(matches, a, b, near_misses)
        out_dir = prepare_out_dir(cfg.out_dir)
        for side in ("a", "b"):
            sheet = sample_unmatched(ms, a, b, side, cfg.unmatched_sample, cfg.seed)
            write_csv(sheet, out_dir / f"unmatched_worksheet_{side}.csv")
        write_csv(sample_matched(ms, a, b, cfg.matched_sample, cfg.seed), out_dir / "matched_worksheet.csv")
        typer.echo(f"worksheets written to {out_dir}")


@app.command()
def harvest(
    output: Annotated[Path, typer.Option("--output", help="NDJSON file to write", dir_okay=False)],
    mailto: Annotated[str, typer.Option(help="Contact address for the Crossref polite pool")],
    from_date: Annotated[Optional[str], typer.Option(help="from-pub-date, YYYY[-MM[-DD]]")] = None,
    until_date: Annotated[Optional[str], typer.Option(help="until-pub-date, YYYY[-MM[-DD]]")] = None,
    prefix: Annotated[Optional[str], typer.Option(help="DOI prefix, e.g. 10.1007")] = None,
    rows: Annotated[int, typer.Option(min=1, max=1000, help="Works per page")] = 500,
    max_pages: Annotated[Optional[int], typer.Option(min=1, help="Stop after N pages (resumable)")] = None,
    retries: Annotated[int, typer.Option(min=0, help="HTTP retries per request")] = 5,
) -> None:
    """Harvest Crossref works into an NDJSON corpus; reruns resume from the saved cursor."""
    with _exit_on_error():
        try:
            flt = CrossrefFilter(from_date=from_date, until_date=until_date, prefix=prefix, rows=rows)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        summary = harvest_crossref(
            flt, output, mailto=mailto, session=make_session(mailto, retries=retries), max_pages=max_pages
        )
        typer.echo(f"{summary.written} records written to {output} ({summary.pages} pages)")


@app.command()
def report(
    corpus_a: CorpusA = None,
    corpus_b: CorpusB = None,
    out: OutDir = None,
    config: ConfigFile = None,
    threshold: Threshold = None,
    seed: Seed = None,
    n_jobs: Annotated[Optional[int], typer.Option(help="Scoring workers")] = None,
    legacy_first_author: Annotated[Optional[bool], typer.Option(help="Legacy first-author formula")] = None,
    baseline: Annotated[Optional[str], typer.Option(help="Which input is corpus A: a|b")] = None,
) -> None:
    """Run every analysis and write all outputs, the HTML report and a manifest."""
    with _exit_on_error():
        cfg = _load_config(
            config, path_a=corpus_a, path_b=corpus_b, out_dir=out, threshold=threshold, seed=seed,
            n_jobs=n_jobs, legacy_first_author=legacy_first_author, baseline=baseline,
        )
        a, b, inputs = _load_pair(cfg)
        results = analyze(a, b, cfg, inputs)
        emit_reports(results, cfg.out_dir)
        typer.echo(f"Report written to {cfg.out_dir / 'report.html'}")


def run():
    """Console-script entrypoint."""
    app()

if __name__ == "__main__":
    run()
