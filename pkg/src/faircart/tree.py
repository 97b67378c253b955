"""Recursive tree growth, prediction, depth selection and JSON documents."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset
from .errors import ConfigError, DataError, SchemaError
from .fairmetrics import DEFAULT_ALPHA, FairnessReport, accuracy
from .splitter import DEFAULT_MIN_LEAF, NodeView, best_split

SCHEMA_VERSION = 1
DEFAULT_MIN_SPLIT = 10
PARITY_SCOPES = ("node", "tree")


@dataclass(frozen=True)
class GrowConfig:
    max_depth: int
    lambda_: float = 1.0
    alpha: float = DEFAULT_ALPHA
    min_leaf: int = DEFAULT_MIN_LEAF
    min_split: int = DEFAULT_MIN_SPLIT
    fairness_enabled: bool = True
    parity_scope: str = "node"

    def __post_init__(self):
        if int(self.max_depth) < 1:
            raise ConfigError("max_depth must be at least 1")
        if not 0.0 <= self.lambda_ <= 1.0:
            raise ConfigError(f"lambda must lie in [0, 1], got {self.lambda_}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.min_leaf < 1:
            raise ConfigError("min_leaf must be at least 1")
        if self.min_split < 2 * self.min_leaf:
            raise ConfigError("min_split must be at least 2 * min_leaf")
        if self.parity_scope not in PARITY_SCOPES:
            raise ConfigError(f"parity_scope must be one of {PARITY_SCOPES}, got {self.parity_scope!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "GrowConfig":
        try:
            return cls(max_depth=int(doc["max_depth"]), lambda_=float(doc["lambda"]),
                       alpha=float(doc["alpha"]), min_leaf=int(doc["min_leaf"]),
                       min_split=int(doc["min_split"]),
                       fairness_enabled=bool(doc["fairness_enabled"]),
                       parity_scope=str(doc.get("parity_scope", "node")))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad config block: {exc}") from exc


@dataclass(frozen=True)
class TreeNode:
    """A leaf (``feature`` is None) or a binary split ``x[feature] <= threshold``."""

    n: int
    p1: float
    depth: int
    label: int | None = None
    feature: int | None = None
    threshold: float | None = None
    fairness: FairnessReport | None = None
    ig: float | None = None
    ig_fair: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def iter_nodes(self):
        yield self
        if not self.is_leaf:
            yield from self.left.iter_nodes()
            yield from self.right.iter_nodes()


@dataclass(frozen=True)
class TreeModel:
    root: TreeNode
    config: GrowConfig
    feature_names: tuple[str, ...]

    @property
    def depth(self) -> int:
        return max(node.depth for node in self.root.iter_nodes())

    @property
    def n_leaves(self) -> int:
        return sum(node.is_leaf for node in self.root.iter_nodes())

    def predict(self, rows) -> np.ndarray:
        return predict(self, rows)


def _leaf(n: int, n_pos: int, depth: int) -> TreeNode:
    return TreeNode(n=n, p1=n_pos / n, depth=depth, label=1 if 2 * n_pos >= n else 0)


def grow(train: Dataset, config: GrowConfig) -> TreeModel:
    """Grow a tree depth-first, scoring splits with the penalised gain.

    With ``fairness_enabled=False`` the penalty is skipped and the tree is an
    ordinary Gini CART.

    ``parity_scope="node"`` measures a candidate's parity on the node's units.
    ``"tree"`` measures it on the whole training set, every unit carrying the
    prediction of the partially grown tree with the candidate split applied.
    """
    if train.n == 0:
        raise DataError("cannot grow a tree on an empty training set")
    s = train.sensitive
    tree_scope = config.parity_scope == "tree"
    # current prediction of every training unit, kept for tree-scope parity
    pred = np.full(train.n, 1 if 2 * int(train.target.sum()) >= train.n else 0, dtype=np.int64)
    n1_all = int(s.sum())
    n0_all = train.n - n1_all

    def context_for(rows: np.ndarray):
        if not tree_scope:
            return None
        outside = np.ones(train.n, dtype=bool)
        outside[rows] = False
        return (int(pred[outside & (s == 1)].sum()), int(pred[outside & (s == 0)].sum()),
                n1_all, n0_all)

    def build(rows: np.ndarray, depth: int) -> TreeNode:
        n = rows.size
        n_pos = int(train.target[rows].sum())
        if depth >= config.max_depth or n < config.min_split or n_pos in (0, n):
            return _leaf(n, n_pos, depth)
        node = NodeView(train, rows)
        split = best_split(node, config.lambda_, config.alpha, config.min_leaf,
                           config.fairness_enabled, context_for(rows))
        if split is None:
            return _leaf(n, n_pos, depth)
        go_left = train.features[rows, split.feature_index] <= split.threshold
        for child in (rows[go_left], rows[~go_left]):
            pred[child] = 1 if 2 * int(train.target[child].sum()) >= child.size else 0
        return TreeNode(
            n=n, p1=n_pos / n, depth=depth,
            feature=split.feature_index, threshold=split.threshold,
            fairness=split.fairness, ig=split.ig, ig_fair=split.ig_fair,
            left=build(rows[go_left], depth + 1),
            right=build(rows[~go_left], depth + 1),
        )

    root = build(np.arange(train.n, dtype=np.int64), 0)
    return TreeModel(root, config, tuple(train.feature_names))


def predict(model: TreeModel, rows) -> np.ndarray:
    X = np.asarray(rows, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != len(model.feature_names):
        raise DataError(f"expected {len(model.feature_names)} feature columns, got shape {X.shape}")
    out = np.empty(X.shape[0], dtype=np.int64)

    def route(node: TreeNode, idx: np.ndarray) -> None:
        if idx.size == 0:
            return
        if node.is_leaf:
            out[idx] = node.label
            return
        go_left = X[idx, node.feature] <= node.threshold
        route(node.left, idx[go_left])
        route(node.right, idx[~go_left])

    route(model.root, np.arange(X.shape[0]))
    return out


def select_baseline_depth(train: Dataset, val: Dataset, depth_grid: Sequence[int],
                          alpha: float = DEFAULT_ALPHA, min_leaf: int = DEFAULT_MIN_LEAF,
                          min_split: int = DEFAULT_MIN_SPLIT) -> int:
    """Smallest depth whose plain CART reaches the best validation accuracy."""
    if not depth_grid:
        raise ConfigError("depth grid is empty")
    best_depth, best_acc = None, -1.0
    for d in sorted(set(int(d) for d in depth_grid)):
        cfg = GrowConfig(max_depth=d, alpha=alpha, min_leaf=min_leaf, min_split=min_split,
                         fairness_enabled=False)
        acc = accuracy(predict(grow(train, cfg), val.features), val.target)
        if acc > best_acc:
            best_depth, best_acc = d, acc
    return best_depth


# ----------------------------------------------------------------------------
# serialisation
# ----------------------------------------------------------------------------

def _node_doc(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"kind": "leaf", "label": node.label, "n": node.n, "p1": node.p1}
    f = node.fairness
    return {
        "kind": "split",
        "feature": node.feature,
        "threshold": node.threshold,
        "n": node.n,
        "p1": node.p1,
        "ig": node.ig,
        "ig_fair": node.ig_fair,
        "fairness": {
            "delta": f.delta, "ci": [f.ci_lower, f.ci_upper], "phi": f.phi,
            "significant": f.significant, "defined": f.defined,
            "n_priv": f.n_priv, "n_unpriv": f.n_unpriv,
            "p_priv": f.p_priv, "p_unpriv": f.p_unpriv, "alpha": f.alpha,
        },
        "left": _node_doc(node.left),
        "right": _node_doc(node.right),
    }


def serialize(model: TreeModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": model.config.to_dict(),
        "feature_names": list(model.feature_names),
        "root": _node_doc(model.root),
    }


def _parse_node(doc, depth: int, n_features: int) -> TreeNode:
    if not isinstance(doc, dict):
        raise SchemaError(f"node at depth {depth} is not an object")
    try:
        kind = doc["kind"]
        n, p1 = int(doc["n"]), float(doc["p1"])
        if kind == "leaf":
            label = int(doc["label"])
            if label not in (0, 1):
                raise SchemaError(f"leaf label must be 0 or 1, got {label}")
            return TreeNode(n=n, p1=p1, depth=depth, label=label)
        if kind != "split":
            raise SchemaError(f"unknown node kind {kind!r}")
        feature = int(doc["feature"])
        if not 0 <= feature < n_features:
            raise SchemaError(f"feature index {feature} out of range")
        fd = doc["fairness"]
        lo, hi = fd["ci"]
        fairness = FairnessReport(
            delta=float(fd["delta"]), ci_lower=float(lo), ci_upper=float(hi),
            phi=float(fd["phi"]), significant=bool(fd["significant"]),
            n_priv=int(fd["n_priv"]), n_unpriv=int(fd["n_unpriv"]),
            p_priv=float(fd["p_priv"]), p_unpriv=float(fd["p_unpriv"]),
            alpha=float(fd["alpha"]), defined=bool(fd["defined"]),
        )
        return TreeNode(
            n=n, p1=p1, depth=depth, feature=feature, threshold=float(doc["threshold"]),
            fairness=fairness, ig=float(doc["ig"]), ig_fair=float(doc["ig_fair"]),
            left=_parse_node(doc["left"], depth + 1, n_features),
            right=_parse_node(doc["right"], depth + 1, n_features),
        )
    except KeyError as exc:
        raise SchemaError(f"node at depth {depth} is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"bad node at depth {depth}: {exc}") from exc


def deserialize(doc: dict) -> TreeModel:
    if not isinstance(doc, dict):
        raise SchemaError("model document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    for key in ("config", "feature_names", "root"):
        if key not in doc:
            raise SchemaError(f"model document is missing {key!r}")
    names = tuple(str(x) for x in doc["feature_names"])
    config = GrowConfig.from_dict(doc["config"])
    return TreeModel(_parse_node(doc["root"], 0, len(names)), config, names)


def save_model(model: TreeModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(serialize(model), fh, indent=1)
        fh.write("\n")


def load_model(path) -> TreeModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise DataError(f"model file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model file is not valid JSON: {exc}") from exc
    return deserialize(doc)
