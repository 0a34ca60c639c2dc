"""Run configuration: a JSON file describing a full analysis run.

Every field is validated at load time and the file form round-trips
losslessly (load(save(cfg)) == cfg).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from scalemine.errors import ConfigError
from scalemine.experiments import DEFAULT_SWEEP_GRID, MethodVariant, parse_method_spec

DEFAULT_METHODS = ["sornette", "scholtes"]


@dataclass
class RunConfig:
    """Knobs for mine/analyze/sweep/compare/report runs.

    measure "" means each method's conventional measure (file edits
    for the per-period method, edit distance for the whole-history
    one). p_threshold None disables the per-period significance
    filter everywhere.
    """

    manifests: list[str] = field(default_factory=list)
    records_dir: str = "records"
    measure: str = ""
    methods: list[str] = field(default_factory=lambda: list(DEFAULT_METHODS))
    p_threshold: float | None = 0.01
    front_load_grid: list[int] = field(default_factory=lambda: list(DEFAULT_SWEEP_GRID))
    outlier_fraction: float | None = None
    filter_one_timers: bool = False
    out_dir: str = "out"
    jobs: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.measure not in ("", "file_edits", "levenshtein"):
            raise ConfigError(f"unknown measure {self.measure!r}")
        if not self.methods:
            raise ConfigError("methods list is empty")
        for spec in self.methods:
            self._parse(spec)
        if self.p_threshold is not None and not 0.0 < self.p_threshold <= 1.0:
            raise ConfigError(f"p_threshold {self.p_threshold!r} out of (0, 1]")
        if not self.front_load_grid:
            raise ConfigError("front_load_grid is empty")
        if any(not isinstance(d, int) or d < 0 for d in self.front_load_grid):
            raise ConfigError("front_load_grid values must be non-negative integers")
        if self.front_load_grid != sorted(self.front_load_grid):
            raise ConfigError("front_load_grid must be ascending")
        if self.outlier_fraction is not None and not 0.0 <= self.outlier_fraction < 0.5:
            raise ConfigError(f"outlier_fraction {self.outlier_fraction!r} out of [0, 0.5)")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError(f"jobs must be a positive integer, got {self.jobs!r}")

    def _parse(self, spec: str) -> MethodVariant:
        return parse_method_spec(
            spec,
            measure=self.measure,
            p_threshold=self.p_threshold,
            outlier_fraction=self.outlier_fraction,
            filter_one_timers=self.filter_one_timers,
        )

    def variants(self) -> list[MethodVariant]:
        """Method specs resolved against the config-wide defaults."""
        return [self._parse(spec) for spec in self.methods]

    def to_dict(self) -> dict:
        return {
            "manifests": list(self.manifests),
            "records_dir": self.records_dir,
            "measure": self.measure,
            "methods": list(self.methods),
            "p_threshold": self.p_threshold,
            "front_load_grid": list(self.front_load_grid),
            "outlier_fraction": self.outlier_fraction,
            "filter_one_timers": self.filter_one_timers,
            "out_dir": self.out_dir,
            "jobs": self.jobs,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        known = {
            "manifests",
            "records_dir",
            "measure",
            "methods",
            "p_threshold",
            "front_load_grid",
            "outlier_fraction",
            "filter_one_timers",
            "out_dir",
            "jobs",
        }
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigError(f"bad config: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            with Path(path).open("r", encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(obj)

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
