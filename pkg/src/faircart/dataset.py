"""Tabular data model, CSV ingestion and seeded holdout splits."""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError

log = logging.getLogger(__name__)

KINDS = ("numeric", "categorical", "target", "sensitive", "drop")
MISSING = frozenset({"", "na", "nan", "null", "?"})


@dataclass(frozen=True, eq=False)
class Dataset:
    """Encoded features plus a binary sensitive attribute and a binary target.

    ``row_ids`` maps each unit back to its position in the source (data rows of
    the CSV, or generation order); it travels through every split.
    """

    features: np.ndarray
    feature_names: tuple[str, ...]
    sensitive: np.ndarray
    target: np.ndarray
    row_ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        X = np.ascontiguousarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        n = X.shape[0]
        s = np.ascontiguousarray(self.sensitive, dtype=np.int64)
        y = np.ascontiguousarray(self.target, dtype=np.int64)
        names = tuple(str(c) for c in self.feature_names)
        if s.shape != (n,) or y.shape != (n,):
            raise DataError(f"sensitive/target must have {n} entries")
        if len(names) != X.shape[1]:
            raise DataError(f"{len(names)} feature names for {X.shape[1]} columns")
        if len(set(names)) != len(names):
            raise DataError("feature names must be unique")
        for name, v in (("sensitive", s), ("target", y)):
            if n and not np.isin(v, (0, 1)).all():
                raise DataError(f"{name} entries must be 0 or 1")
        ids = np.arange(n, dtype=np.int64) if self.row_ids is None else np.asarray(self.row_ids, dtype=np.int64)
        if ids.shape != (n,):
            raise DataError("row_ids must have one entry per unit")
        for a in (X, s, y, ids):
            a.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "sensitive", s)
        object.__setattr__(self, "target", y)
        object.__setattr__(self, "row_ids", ids)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.features[idx], self.feature_names, self.sensitive[idx],
                       self.target[idx], self.row_ids[idx])

    @staticmethod
    def concat(parts: Sequence["Dataset"]) -> "Dataset":
        names = parts[0].feature_names
        if any(p.feature_names != names for p in parts):
            raise DataError("cannot concatenate datasets with different feature schemas")
        return Dataset(np.vstack([p.features for p in parts]), names,
                       np.concatenate([p.sensitive for p in parts]),
                       np.concatenate([p.target for p in parts]),
                       np.concatenate([p.row_ids for p in parts]))


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    positive_label: str | None = None
    privileged_label: str | None = None
    pass_threshold: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"column {self.name!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class HoldoutPlan:
    train_fraction: float = 0.7
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")


def parse_column_specs(doc: dict) -> list[ColumnSpec]:
    """Column specs from a parsed config document ``{"columns": [...]}``."""
    if not isinstance(doc, dict) or not isinstance(doc.get("columns"), list):
        raise ConfigError("config must be an object with a 'columns' list")
    specs = []
    for entry in doc["columns"]:
        if not isinstance(entry, dict) or "name" not in entry or "kind" not in entry:
            raise ConfigError(f"bad column entry: {entry!r}")
        thr = entry.get("pass_threshold")
        specs.append(ColumnSpec(
            name=str(entry["name"]),
            kind=str(entry["kind"]),
            positive_label=None if entry.get("positive_label") is None else str(entry["positive_label"]),
            privileged_label=None if entry.get("privileged_label") is None else str(entry["privileged_label"]),
            pass_threshold=None if thr is None else float(thr),
        ))
    validate_specs(specs)
    return specs


def load_column_specs(path) -> list[ColumnSpec]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return parse_column_specs(doc)


def specs_to_doc(specs: Sequence[ColumnSpec]) -> dict:
    cols = []
    for sp in specs:
        d = {"name": sp.name, "kind": sp.kind}
        for key in ("positive_label", "privileged_label", "pass_threshold"):
            if getattr(sp, key) is not None:
                d[key] = getattr(sp, key)
        cols.append(d)
    return {"columns": cols}


def validate_specs(specs: Sequence[ColumnSpec]) -> None:
    names = [sp.name for sp in specs]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate column names in config")
    for kind in ("target", "sensitive"):
        k = sum(sp.kind == kind for sp in specs)
        if k != 1:
            raise ConfigError(f"exactly one {kind} column required, found {k}")


def _is_missing(v: str) -> bool:
    return v.strip().lower() in MISSING


def _to_binary(values: list[str], sp: ColumnSpec, label: str | None) -> np.ndarray:
    if label is not None:
        return np.array([v.strip() == label for v in values], dtype=np.int64)
    if sp.pass_threshold is not None:
        try:
            nums = [float(v) for v in values]
        except ValueError as exc:
            raise DataError(f"column {sp.name!r}: non-numeric value with pass_threshold") from exc
        return np.array([x >= sp.pass_threshold for x in nums], dtype=np.int64)
    out = []
    for v in values:
        try:
            x = float(v)
        except ValueError:
            x = math.nan
        if x not in (0.0, 1.0):
            raise DataError(f"column {sp.name!r} is not binary after mapping (value {v!r}); "
                            "set a label or pass_threshold")
        out.append(int(x))
    return np.array(out, dtype=np.int64)


def load_csv(path, specs: Sequence[ColumnSpec], feature_names: Sequence[str] | None = None) -> Dataset:
    """Read a comma-separated UTF-8 file with a header row into a :class:`Dataset`.

    Categorical columns become indicator columns ``<col>=<level>`` (levels in
    sorted order). Passing ``feature_names`` aligns the encoding to an existing
    schema instead; levels absent from it encode as all zeros. Rows with a
    missing value in any used column are dropped and counted in the log.
    CSV columns not named in ``specs`` are ignored.
    """
    validate_specs(specs)
    return _read(path, specs, feature_names, labels=True)


def load_features(path, specs: Sequence[ColumnSpec],
                  feature_names: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix and source row ids of an unlabeled CSV, aligned to ``feature_names``.

    Target and sensitive columns are not read. Rows with missing features are an error.
    """
    d = _read(path, [sp for sp in specs if sp.kind in ("numeric", "categorical", "drop")],
              feature_names, labels=False)
    return d.features, d.row_ids


def _read(path, specs: Sequence[ColumnSpec], feature_names, labels: bool) -> Dataset:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"data file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        rows = [r for r in reader if r]
    unknown = [sp.name for sp in specs if sp.name not in header]
    if unknown:
        raise ConfigError(f"columns not found in {path.name}: {', '.join(unknown)}")
    pos = {h: i for i, h in enumerate(header)}
    used = [sp for sp in specs if sp.kind != "drop"]

    kept_rows, kept_ids = [], []
    for i, r in enumerate(rows):
        if len(r) != len(header):
            raise DataError(f"{path.name}: row {i + 1} has {len(r)} fields, expected {len(header)}")
        if any(_is_missing(r[pos[sp.name]]) for sp in used):
            continue
        kept_rows.append(r)
        kept_ids.append(i)
    dropped = len(rows) - len(kept_rows)
    if dropped and not labels:
        raise DataError(f"{path.name}: {dropped} rows have missing feature values")
    if dropped:
        log.warning("dropped %d of %d rows with missing values", dropped, len(rows))
    if not kept_rows:
        raise DataError(f"{path.name}: no rows left after dropping missing values")

    def column(name):
        return [r[pos[name]].strip() for r in kept_rows]

    blocks, names = [], []
    target = sensitive = None
    for sp in specs:
        if sp.kind == "target":
            target = _to_binary(column(sp.name), sp, sp.positive_label)
        elif sp.kind == "sensitive":
            sensitive = _to_binary(column(sp.name), sp, sp.privileged_label)
        elif sp.kind == "numeric":
            try:
                blocks.append(np.array([float(v) for v in column(sp.name)])[:, None])
            except ValueError as exc:
                raise DataError(f"column {sp.name!r}: {exc}") from exc
            names.append(sp.name)
        elif sp.kind == "categorical":
            vals = column(sp.name)
            if feature_names is None:
                levels = sorted(set(vals))
            else:
                prefix = sp.name + "="
                levels = [f[len(prefix):] for f in feature_names if f.startswith(prefix)]
            arr = np.array(vals, dtype=object)
            blocks.append(np.column_stack([(arr == lv).astype(np.float64) for lv in levels])
                          if levels else np.empty((len(vals), 0)))
            names.extend(f"{sp.name}={lv}" for lv in levels)

    if not labels:
        target = sensitive = np.zeros(len(kept_rows), dtype=np.int64)
    X = np.hstack(blocks) if blocks else np.empty((len(kept_rows), 0))
    if feature_names is not None:
        if set(names) != set(feature_names):
            missing = sorted(set(feature_names) - set(names))
            raise DataError(f"data does not provide model features: {missing}")
        col = {nm: i for i, nm in enumerate(names)}
        X = X[:, [col[nm] for nm in feature_names]]
        names = list(feature_names)
    return Dataset(X, tuple(names), sensitive, target, np.asarray(kept_ids, dtype=np.int64))


def _allocate(counts: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder allocation of ``total`` across cells of size ``counts``."""
    exact = counts * (total / counts.sum())
    alloc = np.floor(exact).astype(np.int64)
    rest = total - int(alloc.sum())
    if rest > 0:
        frac = exact - alloc
        order = np.lexsort((np.arange(len(counts)), -frac))
        alloc[order[:rest]] += 1
    return np.minimum(alloc, counts)


def holdout_indices(data: Dataset, plan: HoldoutPlan) -> tuple[np.ndarray, np.ndarray]:
    """Row positions of the two parts; both are sorted ascending."""
    n = data.n
    if n < 10:
        raise DataError(f"need at least 10 rows to split, got {n}")
    n_train = int(round(plan.train_fraction * n))
    if n_train < 1 or n_train > n - 1:
        raise DataError(f"train_fraction {plan.train_fraction} leaves an empty part for n={n}")
    rng = np.random.Generator(np.random.PCG64(plan.seed))
    if plan.stratified:
        cell = 2 * data.target + data.sensitive
        members = [np.flatnonzero(cell == c) for c in range(4)]
        counts = np.array([m.size for m in members], dtype=np.int64)
        take = _allocate(counts, n_train)
        train = []
        for m, k in zip(members, take):
            train.append(rng.permutation(m)[:k])
        train = np.concatenate(train)
    else:
        train = rng.permutation(n)[:n_train]
    mask = np.zeros(n, dtype=bool)
    mask[train] = True
    return np.flatnonzero(mask), np.flatnonzero(~mask)


def holdout_split(data: Dataset, plan: HoldoutPlan) -> tuple[Dataset, Dataset]:
    """Seeded two-way partition; stratified on the joint (target, sensitive) cells."""
    tr, te = holdout_indices(data, plan)
    return data.subset(tr), data.subset(te)


def write_rows(src, dest, row_ids) -> None:
    """Copy the data rows ``row_ids`` (0-based, header excluded) of ``src`` to ``dest``."""
    wanted = set(int(i) for i in row_ids)
    with open(src, newline="", encoding="utf-8") as fin, \
            open(dest, "w", newline="", encoding="utf-8") as fout:
        reader = csv.reader(fin)
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(next(reader))
        for i, r in enumerate(row for row in reader if row):
            if i in wanted:
                writer.writerow(r)
