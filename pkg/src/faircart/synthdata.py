"""Synthetic data in which the sensitive attribute acts only through the features.

    S   ~ Bernoulli(0.5)
    X_k ~ Normal(-1 + 1.1 c(S), 1),             k = 1, 2, 3
    Y   ~ Bernoulli(expit(-1 + 0.8 X_1^2 + 0.8 sin(X_2 + X_3)))

``c(S)`` is the numeric code of the group inside the mean. With the default
``"factor"`` coding the groups enter as levels 1 and 2 (``c(S) = S + 1``, the
integer codes of an R factor), which puts the observed-outcome parity near
+0.16. ``"binary"`` uses ``c(S) = S``; under it the unprivileged group has the
larger ``E[X_1^2]`` and the observed parity is about -0.05.

Each column draws from its own PCG64 stream spawned from one SeedSequence,
so a seed reproduces the same data on every platform.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dataset import ColumnSpec, Dataset

S_PROB = 0.5
X_MEAN_BASE = -1.0
X_MEAN_SHIFT = 1.1
X_SD = 1.0
ETA_INTERCEPT = -1.0
ETA_X1SQ = 0.8
ETA_SIN = 0.8

S_CODINGS = ("factor", "binary")
FEATURES = ("x1", "x2", "x3")
CSV_HEADER = ("x1", "x2", "x3", "s", "y")


@dataclass(frozen=True)
class SynthConfig:
    n: int = 2000
    seed: int = 0
    include_sensitive: bool = False
    s_coding: str = "factor"

    def __post_init__(self):
        if self.s_coding not in S_CODINGS:
            raise ValueError(f"s_coding must be one of {S_CODINGS}, got {self.s_coding!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def linear_predictor(x1, x2, x3):
    return ETA_INTERCEPT + ETA_X1SQ * x1 ** 2 + ETA_SIN * np.sin(x2 + x3)


def _sample_response(eta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # reads eta only: Y is independent of S given the features
    prob = 1.0 / (1.0 + np.exp(-eta))
    return (rng.random(eta.shape[0]) < prob).astype(np.int64)


def draw(n: int, seed: int, s_coding: str = "factor") -> dict[str, np.ndarray]:
    """Raw columns ``x1, x2, x3, s, y`` of one sample."""
    s_rng, x1_rng, x2_rng, x3_rng, y_rng = (
        np.random.Generator(np.random.PCG64(ss)) for ss in np.random.SeedSequence(seed).spawn(5)
    )
    s = (s_rng.random(n) < S_PROB).astype(np.int64)
    code = s + 1 if s_coding == "factor" else s
    mean = X_MEAN_BASE + X_MEAN_SHIFT * code
    x1 = x1_rng.normal(mean, X_SD)
    x2 = x2_rng.normal(mean, X_SD)
    x3 = x3_rng.normal(mean, X_SD)
    y = _sample_response(linear_predictor(x1, x2, x3), y_rng)
    return {"x1": x1, "x2": x2, "x3": x3, "s": s, "y": y}


def generate(config: SynthConfig = SynthConfig()) -> Dataset:
    cols = draw(config.n, config.seed, config.s_coding)
    names = list(FEATURES)
    X = [cols[c] for c in FEATURES]
    if config.include_sensitive:
        names.append("s")
        X.append(cols["s"].astype(np.float64))
    return Dataset(np.column_stack(X), tuple(names), cols["s"], cols["y"])


def column_specs() -> list[ColumnSpec]:
    """Column specs matching :func:`write_csv` output."""
    specs = [ColumnSpec(c, "numeric") for c in FEATURES]
    specs.append(ColumnSpec("s", "sensitive", privileged_label="1"))
    specs.append(ColumnSpec("y", "target", positive_label="1"))
    return specs


def write_csv(config: SynthConfig, path) -> None:
    cols = draw(config.n, config.seed, config.s_coding)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for i in range(config.n):
            w.writerow([repr(float(cols["x1"][i])), repr(float(cols["x2"][i])),
                        repr(float(cols["x3"][i])), int(cols["s"][i]), int(cols["y"][i])])
