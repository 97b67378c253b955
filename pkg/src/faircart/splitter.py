"""Split search with the fairness-penalised information gain.

A split is scored by its Gini information gain. When the Wald interval for
the statistical parity of the node's post-split predictions excludes zero,
the gain is scaled by ``lambda * (1 - phi)``, where ``phi`` is the distance
of the interval from zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dataset import Dataset
from .fairmetrics import DEFAULT_ALPHA, FairnessReport, normal_quantile, parity_from_counts

DEFAULT_MIN_LEAF = 5


@dataclass(frozen=True, eq=False)
class NodeView:
    data: Dataset
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 1 or rows.size == 0:
            raise ValueError("a node needs at least one unit")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def root(cls, data: Dataset) -> "NodeView":
        return cls(data, np.arange(data.n, dtype=np.int64))

    @property
    def n_v(self) -> int:
        return int(self.rows.size)

    @property
    def p1v(self) -> float:
        return int(self.data.target[self.rows].sum()) / self.n_v


@dataclass(frozen=True)
class SplitCandidate:
    feature_index: int
    threshold: float
    n_left: int
    n_right: int
    ig: float
    fairness: FairnessReport
    ig_fair: float
    lambda_: float


def _check_lambda(lam: float) -> None:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")


def gini(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"proportion out of range: {p!r}")
    return 2.0 * p * (1.0 - p)


def _left_mask(node: NodeView, j: int, t: float) -> np.ndarray:
    left = node.data.features[node.rows, j] <= t
    k = int(left.sum())
    if k == 0 or k == node.n_v:
        raise ValueError(f"degenerate split on feature {j} at {t!r}: a child is empty")
    return left


def information_gain(node: NodeView, j: int, t: float) -> float:
    """Gini reduction when rows with ``x_j <= t`` go left."""
    left = _left_mask(node, j, t)
    y = node.data.target[node.rows]
    return _kernels.gain_from_counts(node.n_v, int(y.sum()), int(left.sum()), int(y[left].sum()))


def node_parity_after_split(node: NodeView, j: int, t: float, alpha: float = DEFAULT_ALPHA,
                            context: tuple[int, int, int, int] | None = None) -> FairnessReport:
    """Parity of the node's units when each is labelled with its child's majority class.

    ``context`` (see :func:`faircart._kernels.sweep`) folds in the predictions
    of units outside the node so parity is measured over a wider population.
    """
    left = _left_mask(node, j, t)
    y = node.data.target[node.rows]
    s = node.data.sensitive[node.rows]
    pred = np.empty(node.n_v, dtype=np.int64)
    for side in (left, ~left):
        pred[side] = 1 if 2 * int(y[side].sum()) >= int(side.sum()) else 0
    n1 = int(s.sum())
    n11, n10, n0 = int(pred[s == 1].sum()), int(pred[s == 0].sum()), node.n_v - n1
    if context is not None:
        off11, off10, n1, n0 = context
        n11 += off11
        n10 += off10
    return parity_from_counts(n11, n1, n10, n0, alpha)


def penalized_gain(ig: float, fairness: FairnessReport, lambda_: float) -> float:
    _check_lambda(lambda_)
    if ig < 0.0:
        raise ValueError(f"gain must be non-negative, got {ig!r}")
    if not fairness.significant:
        return ig
    return lambda_ * (1.0 - fairness.phi) * ig


def candidates(node: NodeView, lambda_: float, alpha: float = DEFAULT_ALPHA,
               min_leaf: int = DEFAULT_MIN_LEAF, fairness_enabled: bool = True,
               context: tuple[int, int, int, int] | None = None) -> _kernels.Candidates:
    """Score every admissible (feature, midpoint) split of ``node``."""
    _check_lambda(lambda_)
    z = normal_quantile(alpha)
    d = node.data
    return _kernels.sweep(d.features, d.target, d.sensitive, node.rows, z, lambda_,
                          fairness_enabled, max(int(min_leaf), 1), context)


def candidate_at(node: NodeView, table: _kernels.Candidates, i: int, lambda_: float,
                 alpha: float, context: tuple[int, int, int, int] | None = None) -> SplitCandidate:
    """Materialise row ``i`` of a candidate table as a :class:`SplitCandidate`."""
    nl = int(table.n_left[i])
    report = node_parity_after_split(node, int(table.feature[i]), float(table.threshold[i]),
                                     alpha, context)
    return SplitCandidate(
        feature_index=int(table.feature[i]),
        threshold=float(table.threshold[i]),
        n_left=nl,
        n_right=node.n_v - nl,
        ig=float(table.ig[i]),
        fairness=report,
        ig_fair=float(table.ig_fair[i]),
        lambda_=lambda_,
    )


def best_split(node: NodeView, lambda_: float, alpha: float = DEFAULT_ALPHA,
               min_leaf: int = DEFAULT_MIN_LEAF, fairness_enabled: bool = True,
               context: tuple[int, int, int, int] | None = None) -> SplitCandidate | None:
    """Highest-scoring split, or None when nothing has a positive (penalised) gain.

    Equal scores resolve to the lowest feature index and then the lowest threshold.
    """
    if node.n_v < 2 * min_leaf:
        return None
    table = candidates(node, lambda_, alpha, min_leaf, fairness_enabled, context)
    i = _kernels.best_index(table)
    if i < 0:
        return None
    return candidate_at(node, table, i, lambda_, alpha, context)
