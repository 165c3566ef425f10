# tests/integration/test_report.py

"""Integration test: full analysis of two corpora and every output file.

This verifies the pipeline can:
  1) ingest two NDJSON corpora,
  2) match, compute coverage, compare citation links and draw worksheets,
  3) write all outputs plus the HTML report and the manifest,
  4) produce byte-identical files when run twice with the same inputs.

Run all integration tests:
    pytest tests/integration -q
Run only this file:
    pytest tests/integration/test_report.py -q
"""

import json
from pathlib import Path

import pandas as pd

from biblink.config import RunConfig
from biblink.io_ndjson import ingest_corpus, write_corpus
from biblink.model import Corpus
from biblink.report import analyze, emit_reports, sha256_file

EXPECTED_FILES = {
    "matches.csv", "matches.parquet", "step_summary.csv", "near_misses.csv",
    "overlap.json", "linkdiff.json", "threshold_sensitivity.csv",
    "unmatched_worksheet_a.csv", "unmatched_worksheet_b.csv", "matched_worksheet.csv",
    "discrepancy_worksheet.csv", "report.html", "styles.css", "manifest.json",
    "breakdown_year.csv",
} | {
    f"breakdown_{name}_{side}.csv"
    for side in "ab"
    for name in ("doctype", "discipline", "references", "citations", "language", "language_rollup")
}


def _run(tmp_path: Path, pair, out_name: str) -> Path:
    path_a, path_b = tmp_path / "a.ndjson", tmp_path / "b.ndjson"
    if not path_a.exists():
        write_corpus(pair.a, path_a)
        write_corpus(pair.b, path_b)
    cfg = RunConfig.build(path_a=path_a, path_b=path_b, seed=4)
    a, b = ingest_corpus(path_a, "a"), ingest_corpus(path_b, "b")
    out_dir = tmp_path / out_name
    emit_reports(analyze(a, b, cfg, {"a": path_a, "b": path_b}), out_dir)
    return out_dir


def test_report_writes_every_output(tmp_path: Path, pair):
    """End-to-end run on the seeded synthetic pair."""

    # ---------- Act ----------
    out_dir = _run(tmp_path, pair, "out")

    # ---------- Assert ----------
    # 1) Every documented file is there, nothing else.
    assert {p.name for p in out_dir.iterdir()} == EXPECTED_FILES

    # 2) The match table agrees with overlap.json and the Parquet copy.
    matches = pd.read_csv(out_dir / "matches.csv", dtype={"id_a": str, "id_b": str})
    overlap = json.loads((out_dir / "overlap.json").read_text(encoding="utf-8"))
    assert overlap["overlap"] == len(matches)
    assert (overlap["total_a"], overlap["total_b"]) == (len(pair.a), len(pair.b))
    assert pd.read_parquet(out_dir / "matches.parquet")["id_a"].tolist() == matches["id_a"].tolist()

    # 3) Step summary and link summary have their documented shape.
    steps = pd.read_csv(out_dir / "step_summary.csv")
    assert steps["step"].tolist() == [1, 2, 3, 4, 5, 6]
    assert steps["matches"].sum() == len(matches)
    linkdiff = json.loads((out_dir / "linkdiff.json").read_text(encoding="utf-8"))
    assert linkdiff["shared"] + linkdiff["only_a"] == linkdiff["co_covered_a"]

    # 4) Worksheets honour the configured sizes.
    assert len(pd.read_csv(out_dir / "matched_worksheet.csv")) == 30
    assert len(pd.read_csv(out_dir / "unmatched_worksheet_b.csv")) == 30

    # 5) The HTML report links the stylesheet and names both corpora.
    html = (out_dir / "report.html").read_text(encoding="utf-8")
    assert "styles.css" in html
    assert "<h1>a vs b</h1>" in html
    assert "<h2>Matches per blocking step</h2>" in html
    assert "Breakdown: year" in html


def test_manifest_hashes_inputs_and_outputs(tmp_path: Path, pair):
    # ---------- Act ----------
    out_dir = _run(tmp_path, pair, "out")
    manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))

    # ---------- Assert ----------
    assert manifest["tool"] == "biblink"
    assert manifest["schema_version"] == 1
    assert manifest["inputs"]["a"]["sha256"] == sha256_file(tmp_path / "a.ndjson")
    assert set(manifest["outputs"]) == EXPECTED_FILES - {"manifest.json"}
    for name, digest in manifest["outputs"].items():
        assert sha256_file(out_dir / name) == digest
    rerun = RunConfig.build(path_a=tmp_path / "a.ndjson", path_b=tmp_path / "b.ndjson", seed=4)
    assert RunConfig.from_file(out_dir / "manifest.json") == rerun
    assert manifest["config"]["seed"] == 4


def test_two_runs_are_byte_identical(tmp_path: Path, pair):
    """Same inputs and config, separate output directories."""

    # ---------- Act ----------
    first = _run(tmp_path, pair, "run1")
    second = _run(tmp_path, pair, "run2")

    # ---------- Assert ----------
    for path in sorted(first.iterdir()):
        assert path.read_bytes() == (second / path.name).read_bytes(), path.name


def test_empty_corpora_give_header_only_outputs(tmp_path: Path):
    # ---------- Arrange ----------
    cfg = RunConfig.build()
    empty_a, empty_b = Corpus("a"), Corpus("b")

    # ---------- Act ----------
    out_dir = tmp_path / "out"
    emit_reports(analyze(empty_a, empty_b, cfg), out_dir)

    # ---------- Assert ----------
    assert {p.name for p in out_dir.iterdir()} == EXPECTED_FILES
    assert (out_dir / "matches.csv").read_text(encoding="utf-8").count("\n") == 1
    assert pd.read_csv(out_dir / "matched_worksheet.csv").empty
    overlap = json.loads((out_dir / "overlap.json").read_text(encoding="utf-8"))
    assert overlap == {"overlap": 0, "share_a_pct": 0.0, "share_b_pct": 0.0, "total_a": 0, "total_b": 0}
