"""Statistical parity with its Wald interval, and plain accuracy."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from statistics import NormalDist

import numpy as np

from . import _kernels

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class FairnessReport:
    """Statistical parity of a prediction vector with respect to a binary group.

    ``delta`` is the signed difference of positive-prediction rates
    (privileged minus unprivileged). ``phi`` is the distance of the nearest
    interval end from zero, and is zero whenever the interval covers zero.
    When a group is empty the parity is undefined: ``defined`` is False and
    every numeric field is zero.
    """

    delta: float
    ci_lower: float
    ci_upper: float
    phi: float
    significant: bool
    n_priv: int
    n_unpriv: int
    p_priv: float
    p_unpriv: float
    alpha: float
    defined: bool = True

    @property
    def ci(self) -> tuple[float, float]:
        return (self.ci_lower, self.ci_upper)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "FairnessReport":
        return cls(
            delta=float(doc["delta"]),
            ci_lower=float(doc["ci_lower"]),
            ci_upper=float(doc["ci_upper"]),
            phi=float(doc["phi"]),
            significant=bool(doc["significant"]),
            n_priv=int(doc["n_priv"]),
            n_unpriv=int(doc["n_unpriv"]),
            p_priv=float(doc["p_priv"]),
            p_unpriv=float(doc["p_unpriv"]),
            alpha=float(doc["alpha"]),
            defined=bool(doc.get("defined", True)),
        )


def normal_quantile(alpha: float) -> float:
    """Upper ``alpha/2`` point of the standard normal distribution."""
    if not 0.0 < alpha <= 1.0 or math.isnan(alpha):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if alpha == 1.0:
        return 0.0
    return NormalDist().inv_cdf(1.0 - alpha / 2.0)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def parity_from_counts(n11: int, n1: int, n10: int, n0: int, alpha: float = DEFAULT_ALPHA,
                       z: float | None = None) -> FairnessReport:
    """Build a report from positive-prediction counts per group.

    ``n11`` of ``n1`` privileged units and ``n10`` of ``n0`` unprivileged
    units received a positive prediction.
    """
    _check_alpha(alpha)
    if n1 == 0 or n0 == 0:
        return FairnessReport(0.0, 0.0, 0.0, 0.0, False, int(n1), int(n0), 0.0, 0.0, alpha, False)
    if z is None:
        z = normal_quantile(alpha)
    delta, lo, hi = _kernels.wald_interval(int(n11), int(n1), int(n10), int(n0), z)
    significant, phi = _kernels.ci_distance(lo, hi)
    return FairnessReport(
        delta=delta,
        ci_lower=lo,
        ci_upper=hi,
        phi=phi,
        significant=significant,
        n_priv=int(n1),
        n_unpriv=int(n0),
        p_priv=int(n11) / int(n1),
        p_unpriv=int(n10) / int(n0),
        alpha=alpha,
    )


def _binary(v, name: str) -> np.ndarray:
    a = np.asarray(v)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if a.size and not np.isin(a, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return a.astype(np.int64, copy=False)


def statistical_parity(predictions, sensitive, alpha: float = DEFAULT_ALPHA) -> FairnessReport:
    """Statistical parity of ``predictions`` between ``sensitive == 1`` and ``== 0``."""
    pred = _binary(predictions, "predictions")
    sens = _binary(sensitive, "sensitive")
    if pred.shape != sens.shape:
        raise ValueError(f"length mismatch: {pred.size} predictions vs {sens.size} sensitive")
    if pred.size == 0:
        raise ValueError("empty input")
    _check_alpha(alpha)
    n1 = int(sens.sum())
    n0 = sens.size - n1
    n11 = int(pred[sens == 1].sum())
    n10 = int(pred[sens == 0].sum())
    return parity_from_counts(n11, n1, n10, n0, alpha)


def accuracy(predictions, target) -> float:
    pred = np.asarray(predictions)
    y = np.asarray(target)
    if pred.shape != y.shape or pred.ndim != 1:
        raise ValueError(f"length mismatch: {pred.shape} vs {y.shape}")
    if pred.size == 0:
        raise ValueError("empty input")
    return float(np.count_nonzero(pred == y)) / pred.size


def format_report(report: FairnessReport, acc: float | None = None) -> str:
    """One-line human summary; |delta| is shown, the interval keeps its sign."""
    if not report.defined:
        text = "delta=undefined (single group)"
    else:
        star = "" if report.significant else "*"
        text = (f"|delta|={abs(report.delta):.6g} "
                f"CI=({report.ci_lower:.6g}, {report.ci_upper:.6g}){star}")
    if acc is not None:
        text += f" acc={acc:.6g}"
    return text
