# src/biblink/config.py

"""
Run configuration.

`RunConfig` collects every tunable of a run. Defaults: weights 15/7/14/5/14,
threshold 30, key cap 10 000, 1% malformed lines tolerated. A config can come
from CLI options or from a JSON file; the `config` block of a run manifest is
itself a valid config file.

Out-of-range values raise `errors.ConfigError`.

Example:
    >>> cfg = RunConfig.build(seed=7)
    >>> cfg.effective_weights.threshold
    30.0
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError
from .similarity import ScoreWeights


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    path_a: Path | None = None
    path_b: Path | None = None
    # which input plays corpus A (the step-6 baseline)
    baseline: Literal["a", "b"] = "a"

    weights: ScoreWeights = ScoreWeights()
    legacy_first_author: bool = False
    resolution: Literal["greedy", "optimal"] = "greedy"
    key_cap: int = Field(default=10_000, ge=1)
    n_jobs: int = Field(default=1)

    reference_bins: tuple[int, ...] = (0, 10, 50)
    citation_bins: tuple[int, ...] = (0, 5, 25)
    sensitivity_thresholds: tuple[float, ...] = (25.0,)

    seed: int = Field(default=0, ge=0)
    unmatched_sample: int = Field(default=30, ge=0)
    matched_sample: int = Field(default=30, ge=0)
    discrepancy_sample: int = Field(default=15, ge=0)

    max_malformed_fraction: float = Field(default=0.01, ge=0.0, le=1.0)
    out_dir: Path = Path("out")

    @field_validator("reference_bins", "citation_bins")
    @classmethod
    def _increasing(cls, edges: tuple[int, ...]) -> tuple[int, ...]:
        if not edges:
            raise ValueError("at least one bin edge is required")
        if edges[0] < 0 or any(lo >= hi for lo, hi in zip(edges, edges[1:])):
            raise ValueError(f"bin edges must be non-negative and strictly increasing, got {edges}")
        return edges

    @field_validator("n_jobs")
    @classmethod
    def _jobs(cls, n: int) -> int:
        if n == 0:
            raise ValueError("n_jobs must be a positive count or negative (joblib style), not 0")
        return n

    @property
    def effective_weights(self) -> ScoreWeights:
        """`weights` with the legacy first-author formula switched on by `legacy_first_author`."""
        if self.legacy_first_author and not self.weights.legacy_first_author:
            return self.weights.model_copy(update={"legacy_first_author": True})
        return self.weights

    @classmethod
    def build(cls, **values: Any) -> "RunConfig":
        """Validate `values` into a config, raising `ConfigError` on failure."""
        try:
            return cls.model_validate(values)
        except ValidationError as exc:
            raise ConfigError(_describe(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path, **overrides: Any) -> "RunConfig":
        """Load a JSON config (or a run manifest) and apply `overrides` on top."""
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load config {path}: {exc}") from exc
        if isinstance(data, dict) and isinstance(data.get("config"), dict):
            data = data["config"]
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.build(**{**data, **overrides})

    def to_manifest(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def _describe(exc: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
    )
