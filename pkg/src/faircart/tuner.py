"""Data-driven choice of the fairness/accuracy trade-off parameter.

The data are split 70/30 into train and test, and the train part again
70/30 into an inner train and a validation part (inner seed = seed + 1).
One tree per grid value is grown on the inner part and scored on
validation. The chosen lambda is refitted on the whole train part and
scored once on test, next to a plain CART of the same depth.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, HoldoutPlan, holdout_indices
from .errors import ConfigError, DataError
from .fairmetrics import DEFAULT_ALPHA, FairnessReport, accuracy, statistical_parity
from .splitter import DEFAULT_MIN_LEAF
from .tree import DEFAULT_MIN_SPLIT, GrowConfig, TreeModel, grow, predict

DEFAULT_GRID = tuple(round(0.05 * i, 2) for i in range(21))
DEFAULT_EPSILON = 0.01
CURVE_HEADER = ("lambda", "val_accuracy", "val_delta", "ci_lower", "ci_upper", "significant")


@dataclass(frozen=True)
class CurvePoint:
    lambda_: float
    val_accuracy: float
    val_delta: float
    val_ci: tuple[float, float]
    val_significant: bool


@dataclass(frozen=True)
class Evaluation:
    accuracy: float
    fairness: FairnessReport

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, **self.fairness.to_dict()}


def evaluate(model: TreeModel, data: Dataset, alpha: float = DEFAULT_ALPHA) -> Evaluation:
    pred = predict(model, data.features)
    return Evaluation(accuracy(pred, data.target), statistical_parity(pred, data.sensitive, alpha))


@dataclass(frozen=True, eq=False)
class TuneResult:
    curve: list[CurvePoint]
    lambda_star: float
    final_model: TreeModel
    test_report: Evaluation
    baseline_model: TreeModel
    baseline_report: Evaluation
    train_report: Evaluation
    baseline_train_report: Evaluation
    sample_report: FairnessReport
    partition: dict = field(repr=False)


def select_lambda(curve: list[CurvePoint], epsilon: float = DEFAULT_EPSILON) -> float:
    """Pick lambda from a validation curve.

    Points whose parity interval covers zero win outright (best accuracy,
    then larger lambda). Otherwise, among points within ``epsilon`` of the
    best accuracy, the smallest |delta| wins (then larger lambda).
    """
    if not curve:
        raise ConfigError("empty trade-off curve")
    if epsilon < 0:
        raise ConfigError("epsilon must be non-negative")
    fair = [p for p in curve if not p.val_significant]
    if fair:
        return max(fair, key=lambda p: (p.val_accuracy, p.lambda_)).lambda_
    top = max(p.val_accuracy for p in curve)
    window = [p for p in curve if p.val_accuracy >= top - epsilon]
    return min(window, key=lambda p: (abs(p.val_delta), -p.lambda_)).lambda_


def _check_grid(grid) -> list[float]:
    values = sorted(float(x) for x in grid)
    if not values:
        raise ConfigError("lambda grid is empty")
    if any(not 0.0 <= x <= 1.0 or math.isnan(x) for x in values):
        raise ConfigError("lambda grid values must lie in [0, 1]")
    if len(set(values)) != len(values):
        raise ConfigError("lambda grid has duplicate values")
    return values


def trade_off_curve(inner: Dataset, val: Dataset, grid, depth: int,
                    alpha: float = DEFAULT_ALPHA, **grow_kw) -> list[CurvePoint]:
    points = []
    for lam in _check_grid(grid):
        model = grow(inner, GrowConfig(max_depth=depth, lambda_=lam, alpha=alpha, **grow_kw))
        ev = evaluate(model, val, alpha)
        f = ev.fairness
        points.append(CurvePoint(lam, ev.accuracy, f.delta, (f.ci_lower, f.ci_upper), f.significant))
    return points


def tune_partitioned(train: Dataset, test: Dataset, grid=DEFAULT_GRID, depth: int = 3,
                     alpha: float = DEFAULT_ALPHA, seed: int = 0, epsilon: float = DEFAULT_EPSILON,
                     train_fraction: float = 0.7, stratified: bool = True,
                     min_leaf: int = DEFAULT_MIN_LEAF, min_split: int = DEFAULT_MIN_SPLIT,
                     parity_scope: str = "node", sample: Dataset | None = None) -> TuneResult:
    """Tune on an existing train/test partition; ``test`` is only read at the end."""
    try:
        inner_idx, val_idx = holdout_indices(train, HoldoutPlan(train_fraction, seed + 1, stratified))
    except DataError as exc:
        raise DataError(f"training part too small for a validation split: {exc}") from exc
    inner, val = train.subset(inner_idx), train.subset(val_idx)
    kw = dict(min_leaf=min_leaf, min_split=min_split, parity_scope=parity_scope)
    curve = trade_off_curve(inner, val, grid, depth, alpha, **kw)
    lam = select_lambda(curve, epsilon)

    final = grow(train, GrowConfig(max_depth=depth, lambda_=lam, alpha=alpha, **kw))
    baseline = grow(train, GrowConfig(max_depth=depth, alpha=alpha, fairness_enabled=False, **kw))
    whole = sample if sample is not None else Dataset.concat([train, test])
    return TuneResult(
        curve=curve,
        lambda_star=lam,
        final_model=final,
        test_report=evaluate(final, test, alpha),
        baseline_model=baseline,
        baseline_report=evaluate(baseline, test, alpha),
        train_report=evaluate(final, train, alpha),
        baseline_train_report=evaluate(baseline, train, alpha),
        sample_report=statistical_parity(whole.target, whole.sensitive, alpha),
        partition={"inner": inner.row_ids, "val": val.row_ids, "train": train.row_ids,
                   "test": test.row_ids},
    )


def tune(data: Dataset, grid=DEFAULT_GRID, depth: int = 3, alpha: float = DEFAULT_ALPHA,
         seed: int = 0, epsilon: float = DEFAULT_EPSILON, train_fraction: float = 0.7,
         stratified: bool = True, **kw) -> TuneResult:
    """Full lambda search: outer split with ``seed``, validation split with ``seed + 1``."""
    _check_grid(grid)
    try:
        tr, te = holdout_indices(data, HoldoutPlan(train_fraction, seed, stratified))
    except DataError as exc:
        raise DataError(f"dataset too small to tune: {exc}") from exc
    return tune_partitioned(data.subset(tr), data.subset(te), grid, depth, alpha, seed, epsilon,
                            train_fraction, stratified, sample=data, **kw)


def write_curve(curve: list[CurvePoint], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for p in sorted(curve, key=lambda p: p.lambda_):
            w.writerow([repr(p.lambda_), repr(p.val_accuracy), repr(p.val_delta),
                        repr(p.val_ci[0]), repr(p.val_ci[1]), str(p.val_significant).lower()])


def read_curve(path) -> list[CurvePoint]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [CurvePoint(float(r["lambda"]), float(r["val_accuracy"]), float(r["val_delta"]),
                       (float(r["ci_lower"]), float(r["ci_upper"])), r["significant"] == "true")
            for r in rows]


def _row(algorithm: str, depth: int, lam, train_ev: Evaluation, test_ev: Evaluation) -> dict:
    def block(ev: Evaluation) -> dict:
        f = ev.fairness
        return {"delta": f.delta, "ci": [f.ci_lower, f.ci_upper], "significant": f.significant,
                "accuracy": ev.accuracy}
    return {"algorithm": algorithm, "d": depth, "lambda": lam,
            "train": block(train_ev), "test": block(test_ev)}


def summary(result: TuneResult) -> dict:
    """Table-style rows (sample, CART, Fair-CART) for JSON output."""
    depth = result.final_model.config.max_depth
    s = result.sample_report
    sample_block = {"delta": s.delta, "ci": [s.ci_lower, s.ci_upper], "significant": s.significant,
                    "accuracy": None}
    return {
        "lambda_star": result.lambda_star,
        "rows": [
            {"algorithm": "sample", "d": None, "lambda": None, "train": sample_block,
             "test": sample_block},
            _row("CART", depth, None, result.baseline_train_report, result.baseline_report),
            _row("Fair-CART", depth, result.lambda_star, result.train_report, result.test_report),
        ],
    }


def format_table(result: TuneResult) -> str:
    """Human comparison table; |delta| shown, interval signs kept, 6 significant digits."""
    lines = [f"{'alg':<10}{'d':>3}{'lambda':>8}  {'train |D|':>10} {'train CI':>22} {'acc':>8}"
             f"  {'test |D|':>10} {'test CI':>22} {'acc':>8}"]
    for row in summary(result)["rows"]:
        def cell(b):
            ci = f"({b['ci'][0]:.6g}, {b['ci'][1]:.6g})" + ("" if b["significant"] else "*")
            acc = "-" if b["accuracy"] is None else f"{b['accuracy']:.6g}"
            return f"{abs(b['delta']):>10.6g} {ci:>22} {acc:>8}"
        d = "-" if row["d"] is None else str(row["d"])
        lam = "-" if row["lambda"] is None else f"{row['lambda']:g}"
        lines.append(f"{row['algorithm']:<10}{d:>3}{lam:>8}  {cell(row['train'])}  {cell(row['test'])}")
    lines.append("* interval covers zero")
    return "\n".join(lines)
