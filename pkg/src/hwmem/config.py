"""Experiment configuration and result records.

One flat configuration dataclass covers all experiment kinds; sweeps name
fields and list the values to scan.  Configs round-trip losslessly through
JSON, CLI flags override file values, and each result record carries the
derived seed needed to reproduce it in isolation.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError

FORMATS = ("csv", "json", "both")
EXPERIMENTS = ("ventral", "mtl", "equiv")


@dataclass
class ExperimentConfig:
    experiment: str = "ventral"
    seed: int = 0
    reps: int = 1
    out_dir: str | None = None
    format: str = "both"

    # Module settings shared by all experiments.
    backend: str = "svd"
    pooling: str = "max"
    similarity: str = "dot"
    sigmoid_gain: float = 1.0
    rank: int = 8
    oja_epochs: int = 5
    oja_eta0: float = 0.1
    oja_tau: float = 1000.0
    rp_dim: int = 64
    rp_eps: float = 0.25
    rp_constant: float = 8.0
    rp_augment: str = "never"
    share_projection: bool = True
    n_hashes: int = 8
    bands_per_hash: int = 2
    window: int = 4

    # Identity dataset (ventral).
    n_train: int = 64
    n_test: int = 16
    dim: int = 256
    orbit_degree: int | None = None
    noise: float = 0.2
    smoothness: float = 1.0
    n_calib_pairs: int = 200
    n_test_pairs: int = 200

    # Association dataset (mtl).
    dim_a: int = 32
    dim_b: int = 32
    n_dev: int = 16
    n_study: int = 16
    study_views: int = 4
    heldout_views: int = 2
    n_fonts: int = 2
    font_scale: float = 0.3
    hippocampus_backend: str = "wta"
    dev_noise: float = 0.0

    # Backend-equivalence grids (equiv).
    equiv_dims: list = field(default_factory=lambda: [8, 16])
    equiv_n_templates: int = 12
    equiv_n_queries: int = 20
    equiv_ranks: list = field(default_factory=lambda: [1, 2, 4, 8])
    equiv_rp_dims: list = field(default_factory=lambda: [2, 4, 8])
    equiv_hash_grid: list = field(default_factory=lambda: [[4, 1, 2], [8, 2, 4], [16, 2, 4]])

    # Sweep axes: field name -> list of values.
    sweep: dict = field(default_factory=dict)

    def validate(self) -> "ExperimentConfig":
        problems = []
        if self.experiment not in EXPERIMENTS:
            problems.append(f"experiment: must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.format not in FORMATS:
            problems.append(f"format: must be one of {FORMATS}, got {self.format!r}")
        if self.backend not in ("exact", "svd", "oja", "rp", "wta"):
            problems.append(f"backend: unknown backend {self.backend!r}")
        if self.pooling not in ("max", "sum"):
            problems.append(f"pooling: must be max or sum, got {self.pooling!r}")
        if self.similarity not in ("dot", "sigmoid"):
            problems.append(f"similarity: must be dot or sigmoid, got {self.similarity!r}")
        if self.reps < 1:
            problems.append(f"reps: must be >= 1, got {self.reps}")
        if self.rank < 1:
            problems.append(f"rank: must be >= 1, got {self.rank}")
        if not 0.0 < self.rp_eps < 1.0:
            problems.append(f"rp_eps: must be in (0, 1), got {self.rp_eps}")
        if self.rp_augment not in ("never", "always", "jl"):
            problems.append(f"rp_augment: unknown policy {self.rp_augment!r}")
        if self.n_hashes < 1 or self.bands_per_hash < 1:
            problems.append("n_hashes/bands_per_hash: must be >= 1")
        if self.window < 2:
            problems.append(f"window: must be >= 2, got {self.window}")
        if self.experiment == "ventral":
            if self.n_train < 2:
                problems.append(f"n_train: need >= 2 identities for different-pairs, got {self.n_train}")
            if self.n_test < 2:
                problems.append(f"n_test: need >= 2 identities for different-pairs, got {self.n_test}")
            if self.dim < 2:
                problems.append(f"dim: must be >= 2, got {self.dim}")
            if self.orbit_degree is not None and not 1 <= self.orbit_degree <= self.dim:
                problems.append(f"orbit_degree: must be in [1, {self.dim}]")
            if self.noise < 0:
                problems.append(f"noise: must be >= 0, got {self.noise}")
            if self.smoothness < 0:
                problems.append(f"smoothness: must be >= 0, got {self.smoothness}")
            if self.n_calib_pairs < 2 or self.n_test_pairs < 2:
                problems.append("n_calib_pairs/n_test_pairs: must be >= 2")
        if self.experiment == "mtl":
            if self.n_dev < 1:
                problems.append(f"n_dev: must be >= 1, got {self.n_dev}")
            if self.n_study < 1:
                problems.append(f"n_study: must be >= 1, got {self.n_study}")
            if self.study_views < 1:
                problems.append(f"study_views: must be >= 1, got {self.study_views}")
            if self.heldout_views < 0:
                problems.append(f"heldout_views: must be >= 0, got {self.heldout_views}")
            if min(self.dim_a, self.dim_b) < self.study_views + self.heldout_views:
                problems.append("dim_a/dim_b: too small for requested distinct view positions")
            if self.hippocampus_backend not in ("exact", "wta", "rp"):
                problems.append(f"hippocampus_backend: unknown {self.hippocampus_backend!r}")
        for name, values in self.sweep.items():
            if not hasattr(self, name):
                problems.append(f"sweep: unknown field {name!r}")
            elif not isinstance(values, (list, tuple)) or len(values) == 0:
                problems.append(f"sweep: {name} must list at least one value")
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(doc)

    def to_file(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def replaced(self, **overrides) -> "ExperimentConfig":
        return dataclasses.replace(self, **overrides)


@dataclass
class ResultRecord:
    """One metric value, self-describing enough to reproduce in isolation.

    ``rep`` is -1 for summary rows aggregated across repetitions; ``seed``
    is the derived per-run seed actually used, not the top-level one.
    """

    experiment: str
    metric: str
    value: float
    rep: int
    seed: int
    params: dict = field(default_factory=dict)


def nearest_rank_percentile(values, q: float) -> float:
    """Nearest-rank percentile: the ceil(q/100 * n)-th smallest value."""
    data = sorted(float(v) for v in values)
    if not data:
        raise ValueError("no values")
    if not 0 < q <= 100:
        raise ValueError(f"q must be in (0, 100], got {q}")
    rank = int(np.ceil(q / 100.0 * len(data)))
    return data[rank - 1]


def summarize(records, experiment: str) -> list:
    """Median and 25/75-percentile summary rows per (metric, params) cell."""
    cells: dict = {}
    for rec in records:
        if rec.rep < 0:
            continue
        key = (rec.metric, tuple(sorted(rec.params.items())))
        cells.setdefault(key, []).append(rec.value)
    out = []
    for (metric, params_items), values in cells.items():
        params = dict(params_items)
        for suffix, q in (("q25", 25.0), ("q50", 50.0), ("q75", 75.0)):
            out.append(ResultRecord(
                experiment=experiment, metric=f"{metric}_{suffix}",
                value=nearest_rank_percentile(values, q), rep=-1, seed=-1,
                params=params,
            ))
    return out


def flatten_params(records) -> list:
    """Union of parameter names across records, in first-seen order."""
    names: list = []
    for rec in records:
        for name in rec.params:
            if name not in names:
                names.append(name)
    return names


def write_csv(records, path) -> None:
    """Flat CSV: one row per record, sweep parameters as trailing columns."""
    names = flatten_params(records)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "metric", "value", "rep", "seed", *names])
        for rec in records:
            writer.writerow([
                rec.experiment, rec.metric, repr(rec.value), rec.rep, rec.seed,
                *[rec.params.get(n, "") for n in names],
            ])


def write_json(config: ExperimentConfig, records, path) -> None:
    """Nested JSON: the full config plus every record, same data as the CSV."""
    doc = {
        "config": config.to_dict(),
        "records": [dataclasses.asdict(rec) for rec in records],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_csv_records(path) -> list:
    """Inverse of write_csv, for cross-format consistency checks."""
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names = header[5:]
        for row in reader:
            params = {}
            for name, cell in zip(names, row[5:]):
                if cell != "":
                    params[name] = json.loads(cell) if cell[0] in "[{" else type_guess(cell)
            out.append(ResultRecord(
                experiment=row[0], metric=row[1], value=float(row[2]),
                rep=int(row[3]), seed=int(row[4]), params=params,
            ))
    return out


def type_guess(cell: str):
    for caster in (int, float):
        try:
            return caster(cell)
        except ValueError:
            continue
    return cell
