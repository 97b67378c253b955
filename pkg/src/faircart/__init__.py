"""Classification trees whose splits are penalised for significant statistical disparity."""
from ._kernels import backend_name
from .dataset import ColumnSpec, Dataset, HoldoutPlan, holdout_split, load_csv
from .fairmetrics import FairnessReport, accuracy, normal_quantile, statistical_parity
from .splitter import NodeView, SplitCandidate, best_split, gini, information_gain, penalized_gain
from .synthdata import SynthConfig, generate
from .tree import GrowConfig, TreeModel, TreeNode, deserialize, grow, predict, serialize

__version__ = "0.1.0"

__all__ = [
    "ColumnSpec", "Dataset", "FairnessReport", "GrowConfig", "HoldoutPlan", "NodeView",
    "SplitCandidate", "SynthConfig", "TreeModel", "TreeNode", "accuracy", "backend_name",
    "best_split", "deserialize", "generate", "gini", "grow", "holdout_split",
    "information_gain", "load_csv", "normal_quantile", "penalized_gain", "predict",
    "serialize", "statistical_parity",
]
