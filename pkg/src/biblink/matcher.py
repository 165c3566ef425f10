# src/biblink/matcher.py

"""
One-to-one document matching between a baseline corpus A and a corpus B.

`match_corpora` runs the six blocking steps in order. Within a step every
candidate pair is scored (`similarity.matching_score`), pairs at or below the
threshold are dropped, and the survivors are resolved one-to-one:

  - greedy (default): repeatedly accept the highest-scoring pair whose two
    records are both still free; ties go to the lower (id_a, id_b)
  - optimal: maximise the summed score per connected group of candidates
    (`scipy.optimize.linear_sum_assignment`); for experiments only

Records matched in a step are excluded from all later steps. A pair that lost
out in resolution leaves its records free for later steps.

Scoring may run on several workers (`n_jobs`); resolution is sequential over
a canonically sorted list, so the result does not depend on `n_jobs` or on the
order of the input records.

Example
-------
>>> ms = match_corpora(corpus_a, corpus_b)
>>> ms.step_summary()            # candidates / matches / share per step
>>> ms.to_frame().head()         # id_a, id_b, step, total, five components
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from loguru import logger
from scipy.optimize import linear_sum_assignment
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .blocking import DEFAULT_KEY_CAP, STEPS, CandidatePair, generate_candidates
from .model import Corpus
from .normalize import NormalizedRecord, normalize_corpus
from .similarity import ScoreBreakdown, ScoreWeights, matching_score

Resolution = Literal["greedy", "optimal"]

# below this many candidates a step is scored in-process
PARALLEL_MIN_CANDIDATES = 2_000

MATCH_COLUMNS = [
    "id_a", "id_b", "step", "total",
    "m_doi", "m_first_author", "m_title", "m_source", "m_other",
]
NEAR_MISS_COLUMNS = [
    "side", "record_id", "other_id", "step", "total",
    "m_doi", "m_first_author", "m_title", "m_source", "m_other",
]


@dataclass(frozen=True)
class MatchedPair:
    id_a: str
    id_b: str
    step: int
    breakdown: ScoreBreakdown

    @property
    def total(self) -> float:
        return self.breakdown.total


@dataclass(frozen=True)
class NearMiss:
    """Best rejected candidate of a record that ended up unmatched."""

    record_id: str
    other_id: str
    step: int
    breakdown: ScoreBreakdown


@dataclass(frozen=True)
class StepStats:
    step: int
    candidates: int
    above_threshold: int
    matches: int
    skipped_keys: int


@dataclass(frozen=True)
class MatchSet:
    """Final one-to-one mapping between corpus A and corpus B.

    `pairs` is sorted by (id_a, id_b). Matched and unmatched ids partition the
    distinct record ids of each corpus.
    """

    pairs: tuple[MatchedPair, ...] = ()
    unmatched_a: frozenset[str] = frozenset()
    unmatched_b: frozenset[str] = frozenset()
    step_stats: tuple[StepStats, ...] = ()
    near_misses_a: Mapping[str, NearMiss] = field(default_factory=dict)
    near_misses_b: Mapping[str, NearMiss] = field(default_factory=dict)

    @cached_property
    def a_to_b(self) -> dict[str, str]:
        return {p.id_a: p.id_b for p in self.pairs}

    @cached_property
    def b_to_a(self) -> dict[str, str]:
        return {p.id_b: p.id_a for p in self.pairs}

    @cached_property
    def by_id_a(self) -> dict[str, MatchedPair]:
        return {p.id_a: p for p in self.pairs}

    def __len__(self) -> int:
        return len(self.pairs)

    def step_counts(self) -> dict[int, int]:
        counts = {step: 0 for step in STEPS}
        for p in self.pairs:
            counts[p.step] += 1
        return counts

    def step_summary(self) -> pd.DataFrame:
        """Per-step candidates, matches and share of all matches (in %)."""
        total = len(self.pairs)
        rows = [
            {
                "step": s.step,
                "candidates": s.candidates,
                "above_threshold": s.above_threshold,
                "matches": s.matches,
                "share_pct": round(100.0 * s.matches / total, 3) if total else 0.0,
                "skipped_keys": s.skipped_keys,
            }
            for s in self.step_stats
        ]
        return pd.DataFrame(
            rows,
            columns=["step", "candidates", "above_threshold", "matches", "share_pct", "skipped_keys"],
        )

    def to_frame(self) -> pd.DataFrame:
        """The match table: one row per pair, score components included."""
        rows = [
            (
                p.id_a, p.id_b, p.step, p.breakdown.total,
                p.breakdown.m_doi, p.breakdown.m_first_author, p.breakdown.m_title,
                p.breakdown.m_source, p.breakdown.m_other,
            )
            for p in self.pairs
        ]
        return pd.DataFrame(rows, columns=MATCH_COLUMNS)

    def near_miss_frame(self) -> pd.DataFrame:
        """Best rejected candidate of every unmatched record, both sides."""
        rows = [
            (
                side, nm.record_id, nm.other_id, nm.step, nm.breakdown.total,
                nm.breakdown.m_doi, nm.breakdown.m_first_author, nm.breakdown.m_title,
                nm.breakdown.m_source, nm.breakdown.m_other,
            )
            for side, book in (("a", self.near_misses_a), ("b", self.near_misses_b))
            for nm in sorted(book.values(), key=lambda nm: nm.record_id)
        ]
        return pd.DataFrame(rows, columns=NEAR_MISS_COLUMNS)

    def inverted(self) -> "MatchSet":
        """The same matches seen from corpus B (sides swapped)."""
        pairs = sorted(
            (MatchedPair(p.id_b, p.id_a, p.step, p.breakdown) for p in self.pairs),
            key=lambda p: (p.id_a, p.id_b),
        )
        return MatchSet(
            pairs=tuple(pairs),
            unmatched_a=self.unmatched_b,
            unmatched_b=self.unmatched_a,
            step_stats=self.step_stats,
            near_misses_a=self.near_misses_b,
            near_misses_b=self.near_misses_a,
        )


@dataclass
class MatcherState:
    """Mutable bookkeeping while the steps run."""

    unmatched_a: dict[str, NormalizedRecord]
    unmatched_b: dict[str, NormalizedRecord]
    pairs: list[MatchedPair] = field(default_factory=list)
    stats: list[StepStats] = field(default_factory=list)
    near_a: dict[str, NearMiss] = field(default_factory=dict)
    near_b: dict[str, NearMiss] = field(default_factory=dict)

    @classmethod
    def start(
        cls, norm_a: Mapping[str, NormalizedRecord], norm_b: Mapping[str, NormalizedRecord]
    ) -> "MatcherState":
        return cls(dict(norm_a), dict(norm_b))

    def freeze(self) -> MatchSet:
        return MatchSet(
            pairs=tuple(sorted(self.pairs, key=lambda p: (p.id_a, p.id_b))),
            unmatched_a=frozenset(self.unmatched_a),
            unmatched_b=frozenset(self.unmatched_b),
            step_stats=tuple(self.stats),
            near_misses_a={k: v for k, v in sorted(self.near_a.items()) if k in self.unmatched_a},
            near_misses_b={k: v for k, v in sorted(self.near_b.items()) if k in self.unmatched_b},
        )


# -----------------------
# Scoring
# -----------------------

def _score_chunk(
    chunk: Sequence[tuple[NormalizedRecord, NormalizedRecord]], w: ScoreWeights
) -> list[ScoreBreakdown]:
    return [matching_score(a, b, w) for a, b in chunk]


def _score_candidates(
    candidates: Sequence[CandidatePair], state: MatcherState, w: ScoreWeights, n_jobs: int
) -> list[ScoreBreakdown]:
    work = [(state.unmatched_a[c.id_a], state.unmatched_b[c.id_b]) for c in candidates]
    if n_jobs == 1 or len(work) < PARALLEL_MIN_CANDIDATES:
        return _score_chunk(work, w)

    # joblib keeps task order, so results line up with `candidates`
    n_chunks = max(1, min(len(work), abs(n_jobs) * 4))
    bounds = np.linspace(0, len(work), n_chunks + 1, dtype=int)
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_score_chunk)(work[lo:hi], w) for lo, hi in zip(bounds[:-1], bounds[1:])
    )
    return [bd for part in parts for bd in part]


# -----------------------
# Resolution
# -----------------------

def _greedy(survivors: list[tuple[CandidatePair, ScoreBreakdown]]) -> list[tuple[CandidatePair, ScoreBreakdown]]:
    ranked = sorted(survivors, key=lambda it: (-it[1].total, it[0].id_a, it[0].id_b))
    taken_a: set[str] = set()
    taken_b: set[str] = set()
    accepted = []
    for cand, bd in ranked:
        if cand.id_a in taken_a or cand.id_b in taken_b:
            continue
        taken_a.add(cand.id_a)
        taken_b.add(cand.id_b)
        accepted.append((cand, bd))
    return accepted


def _optimal(survivors: list[tuple[CandidatePair, ScoreBreakdown]]) -> list[tuple[CandidatePair, ScoreBreakdown]]:
    if not survivors:
        return []
    ids_a = sorted({c.id_a for c, _ in survivors})
    ids_b = sorted({c.id_b for c, _ in survivors})
    ia = {rid: i for i, rid in enumerate(ids_a)}
    ib = {rid: j for j, rid in enumerate(ids_b)}
    rows = np.array([ia[c.id_a] for c, _ in survivors])
    cols = np.array([ib[c.id_b] for c, _ in survivors]) + len(ids_a)
    n = len(ids_a) + len(ids_b)
    graph = coo_matrix((np.ones(len(survivors)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)

    groups: dict[int, list[tuple[CandidatePair, ScoreBreakdown]]] = {}
    for (cand, bd), r in zip(survivors, rows):
        groups.setdefault(int(labels[r]), []).append((cand, bd))

    accepted = []
    for label in sorted(groups):
        edges = groups[label]
        ga = sorted({c.id_a for c, _ in edges})
        gb = sorted({c.id_b for c, _ in edges})
        pa = {rid: i for i, rid in enumerate(ga)}
        pb = {rid: j for j, rid in enumerate(gb)}
        # non-edges score 0, below every surviving pair
        weight = np.zeros((len(ga), len(gb)))
        lookup = {}
        for cand, bd in edges:
            weight[pa[cand.id_a], pb[cand.id_b]] = bd.total
            lookup[(cand.id_a, cand.id_b)] = (cand, bd)
        r_idx, c_idx = linear_sum_assignment(weight, maximize=True)
        for r, c in zip(r_idx, c_idx):
            hit = lookup.get((ga[r], gb[c]))
            if hit is not None:
                accepted.append(hit)
    return accepted


def _note_near_miss(book: dict[str, NearMiss], rid: str, other: str, step: int, bd: ScoreBreakdown) -> None:
    best = book.get(rid)
    if best is None or (bd.total, best.other_id) > (best.breakdown.total, other):
        book[rid] = NearMiss(rid, other, step, bd)


def run_step(
    step: int,
    state: MatcherState,
    w: ScoreWeights,
    *,
    key_cap: int = DEFAULT_KEY_CAP,
    n_jobs: int = 1,
    resolution: Resolution = "greedy",
) -> MatcherState:
    """Run one blocking step: generate, score, threshold, resolve, exclude.

    Args:
        step: Blocking step, 1..6.
        state: Unmatched records and matches so far; updated in place.
        w: Weights and threshold.
        key_cap: Blocking key-explosion cap.
        n_jobs: Workers used for scoring (joblib semantics).
        resolution: "greedy" or "optimal".

    Returns:
        The updated `state`.
    """
    blocked = generate_candidates(step, state.unmatched_a, state.unmatched_b, key_cap=key_cap)
    scores = _score_candidates(blocked.pairs, state, w, n_jobs)
    survivors = [(c, bd) for c, bd in zip(blocked.pairs, scores) if w.accepts(bd.total)]

    accepted = _optimal(survivors) if resolution == "optimal" else _greedy(survivors)
    accepted_keys = {(c.id_a, c.id_b) for c, _ in accepted}

    for cand, bd in accepted:
        state.pairs.append(MatchedPair(cand.id_a, cand.id_b, step, bd))
        del state.unmatched_a[cand.id_a]
        del state.unmatched_b[cand.id_b]

    for cand, bd in zip(blocked.pairs, scores):
        if (cand.id_a, cand.id_b) not in accepted_keys:
            _note_near_miss(state.near_a, cand.id_a, cand.id_b, step, bd)
            _note_near_miss(state.near_b, cand.id_b, cand.id_a, step, bd)

    state.stats.append(StepStats(step, len(blocked.pairs), len(survivors), len(accepted), len(blocked.skipped_keys)))
    logger.info(
        "step {}: {} candidates, {} above threshold, {} matched",
        step, len(blocked.pairs), len(survivors), len(accepted),
    )
    return state


def match_normalized(
    norm_a: Mapping[str, NormalizedRecord],
    norm_b: Mapping[str, NormalizedRecord],
    w: ScoreWeights | None = None,
    *,
    key_cap: int = DEFAULT_KEY_CAP,
    n_jobs: int = 1,
    resolution: Resolution = "greedy",
    steps: Iterable[int] = STEPS,
) -> MatchSet:
    """`match_corpora` on records that are already normalized."""
    w = w or ScoreWeights()
    state = MatcherState.start(norm_a, norm_b)
    for step in steps:
        run_step(step, state, w, key_cap=key_cap, n_jobs=n_jobs, resolution=resolution)
    return state.freeze()


def match_corpora(
    corpus_a: Corpus,
    corpus_b: Corpus,
    w: ScoreWeights | None = None,
    *,
    key_cap: int = DEFAULT_KEY_CAP,
    n_jobs: int = 1,
    resolution: Resolution = "greedy",
) -> MatchSet:
    """Match two corpora with the six-step procedure.

    Args:
        corpus_a: Baseline corpus (supplies the step-6 title words).
        corpus_b: The corpus compared against the baseline.
        w: Weights and threshold; defaults to 15/7/14/5/14 with threshold 30.
        key_cap: Blocking key-explosion cap.
        n_jobs: Scoring workers.
        resolution: One-to-one resolution strategy.

    Returns:
        The final `MatchSet`, with per-step statistics and near misses.
    """
    logger.info("matching {} ({} records) against {} ({} records)",
                corpus_a.corpus_id, len(corpus_a), corpus_b.corpus_id, len(corpus_b))
    return match_normalized(
        normalize_corpus(corpus_a),
        normalize_corpus(corpus_b),
        w,
        key_cap=key_cap,
        n_jobs=n_jobs,
        resolution=resolution,
    )


def threshold_sensitivity(
    corpus_a: Corpus,
    corpus_b: Corpus,
    w: ScoreWeights | None = None,
    thresholds: Sequence[float] = (25.0,),
    **match_kwargs,
) -> pd.DataFrame:
    """Match count at alternative thresholds relative to the configured one.

    Returns:
        DataFrame with `threshold`, `matches`, `change_pct` (relative to the
        configured threshold), one row per threshold, configured one first.
    """
    w = w or ScoreWeights()
    norm_a, norm_b = normalize_corpus(corpus_a), normalize_corpus(corpus_b)

    rows = []
    base = None
    for t in [w.threshold, *[t for t in thresholds if t != w.threshold]]:
        n = len(match_normalized(norm_a, norm_b, w.model_copy(update={"threshold": t}), **match_kwargs))
        base = n if base is None else base
        change = round(100.0 * (n - base) / base, 3) if base else 0.0
        rows.append({"threshold": float(t), "matches": n, "change_pct": change})
    return pd.DataFrame(rows, columns=["threshold", "matches", "change_pct"])
