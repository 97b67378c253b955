"""Hot loops for split search.

Two interchangeable backends produce the same candidate table bit for bit:

* ``numba``: an ``@njit`` sorted sweep over each feature.
* ``numpy``: the same sweep written with vectorised cumulative sums.

The backend is chosen once at import time. Set ``FAIRCART_DISABLE_NUMBA=1``
to force the numpy path (numba is also skipped when it cannot be imported).
Both implementations stay importable so they can be compared directly.
"""
from __future__ import annotations

import math
import os
from typing import NamedTuple

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

_DISABLED = os.environ.get("FAIRCART_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = HAS_NUMBA and not _DISABLED

# above this node size the exact int64 gain numerator could overflow
_EXACT_GAIN_MAX_N = 50_000


def _jit(fn):
    if HAS_NUMBA:
        return njit(cache=True)(fn)
    return fn


# ----------------------------------------------------------------------------
# scalar cores, shared by every code path
# ----------------------------------------------------------------------------

def gain_from_counts(n, n_pos, n_left, n_left_pos):
    """Gini information gain of a binary split from integer class counts.

    The numerator is accumulated in integers so that a split with no
    impurity reduction yields exactly 0.0.
    """
    n_right = n - n_left
    n_right_pos = n_pos - n_left_pos
    if n <= _EXACT_GAIN_MAX_N:
        num = (n_pos * (n - n_pos) * n_left * n_right
               - n_left_pos * (n_left - n_left_pos) * n * n_right
               - n_right_pos * (n_right - n_right_pos) * n * n_left)
        if num <= 0:
            return 0.0
        return 2.0 * num / (float(n) * n * n_left * n_right)
    fn = float(n)
    g = (2.0 * n_pos * (n - n_pos) / (fn * fn)
         - 2.0 * n_left_pos * (n_left - n_left_pos) / (fn * n_left)
         - 2.0 * n_right_pos * (n_right - n_right_pos) / (fn * n_right))
    return g if g > 0.0 else 0.0


def wald_interval(n11, n1, n10, n0, z):
    """Return ``(delta, lower, upper)`` for two groups with positive counts."""
    p1 = n11 / n1
    p0 = n10 / n0
    delta = p1 - p0
    se = math.sqrt(p1 * (1.0 - p1) / n1 + p0 * (1.0 - p0) / n0)
    return delta, delta - z * se, delta + z * se


def ci_distance(lower, upper):
    """Return ``(significant, phi)`` for an interval: phi is 0 when it covers 0."""
    if lower > 0.0 or upper < 0.0:
        phi = min(abs(lower), abs(upper))
        if phi > 1.0:
            phi = 1.0
        return True, phi
    return False, 0.0


def midpoint(a, b):
    """Threshold between consecutive distinct values ``a < b``; always ``a <= t < b``."""
    t = (a + b) / 2.0
    if not (a <= t < b):
        t = a
    return t


_gain_nb = _jit(gain_from_counts)
_wald_nb = _jit(wald_interval)
_dist_nb = _jit(ci_distance)
_mid_nb = _jit(midpoint)


# ----------------------------------------------------------------------------
# candidate table
# ----------------------------------------------------------------------------

class Candidates(NamedTuple):
    """Every admissible split of one node, one entry per (feature, threshold)."""

    feature: np.ndarray
    threshold: np.ndarray
    n_left: np.ndarray
    ig: np.ndarray
    ig_fair: np.ndarray
    delta: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    defined: np.ndarray
    significant: np.ndarray
    phi: np.ndarray

    def __len__(self) -> int:  # type: ignore[override]
        return int(self.feature.shape[0])


def _sweep_loop(X, y, s, rows, z, lam, penalize, min_leaf, off11, off10, tot1, tot0):
    n = rows.shape[0]
    p = X.shape[1]
    cap = p * (n - 1) if n > 1 else 0
    feat = np.empty(cap, np.int64)
    thr = np.empty(cap, np.float64)
    nleft = np.empty(cap, np.int64)
    ig = np.empty(cap, np.float64)
    igf = np.empty(cap, np.float64)
    dl = np.empty(cap, np.float64)
    lo = np.empty(cap, np.float64)
    hi = np.empty(cap, np.float64)
    dfn = np.empty(cap, np.bool_)
    sig = np.empty(cap, np.bool_)
    phi = np.empty(cap, np.float64)

    n_pos = 0
    n_s1 = 0
    for i in range(n):
        n_pos += y[rows[i]]
        n_s1 += s[rows[i]]
    n_s0 = n - n_s1
    if tot1 < 0:
        tot1 = n_s1
        tot0 = n_s0
    both_groups = tot1 > 0 and tot0 > 0

    xs = np.empty(n, np.float64)
    k = 0
    for j in range(p):
        for i in range(n):
            xs[i] = X[rows[i], j]
        order = np.argsort(xs, kind="mergesort")
        yl = 0
        s1l = 0
        for i in range(n - 1):
            r = rows[order[i]]
            yl += y[r]
            s1l += s[r]
            nl = i + 1
            nr = n - nl
            if nr < min_leaf:
                break
            if nl < min_leaf:
                continue
            a = xs[order[i]]
            b = xs[order[i + 1]]
            if a == b:
                continue
            g = _gain_nb(n, n_pos, nl, yl)
            lab_l = 1 if 2 * yl >= nl else 0
            lab_r = 1 if 2 * (n_pos - yl) >= nr else 0
            if both_groups:
                n11 = off11 + lab_l * s1l + lab_r * (n_s1 - s1l)
                n10 = off10 + lab_l * (nl - s1l) + lab_r * (n_s0 - (nl - s1l))
                d, l, h = _wald_nb(n11, tot1, n10, tot0, z)
                sg, ph = _dist_nb(l, h)
            else:
                d = 0.0
                l = 0.0
                h = 0.0
                sg = False
                ph = 0.0
            feat[k] = j
            thr[k] = _mid_nb(a, b)
            nleft[k] = nl
            ig[k] = g
            igf[k] = lam * (1.0 - ph) * g if (penalize and sg) else g
            dl[k] = d
            lo[k] = l
            hi[k] = h
            dfn[k] = both_groups
            sig[k] = sg
            phi[k] = ph
            k += 1
    return (feat[:k], thr[:k], nleft[:k], ig[:k], igf[:k], dl[:k], lo[:k],
            hi[:k], dfn[:k], sig[:k], phi[:k])


_sweep_loop_nb = _jit(_sweep_loop)


def _vector_gain(n, n_pos, nl, yl):
    nr = n - nl
    yr = n_pos - yl
    if n <= _EXACT_GAIN_MAX_N:
        num = (n_pos * (n - n_pos) * nl * nr
               - yl * (nl - yl) * n * nr
               - yr * (nr - yr) * n * nl)
        g = 2.0 * num / (float(n) * n * nl * nr)
        return np.where(num > 0, g, 0.0)
    fn = float(n)
    g = (2.0 * n_pos * (n - n_pos) / (fn * fn)
         - 2.0 * yl * (nl - yl) / (fn * nl)
         - 2.0 * yr * (nr - yr) / (fn * nr))
    return np.where(g > 0.0, g, 0.0)


def _sweep_numpy(X, y, s, rows, z, lam, penalize, min_leaf, off11, off10, tot1, tot0):
    n = rows.shape[0]
    Xn = X[rows]
    yn = y[rows]
    sn = s[rows]
    n_pos = int(yn.sum())
    n_s1 = int(sn.sum())
    n_s0 = n - n_s1
    if tot1 < 0:
        tot1, tot0 = n_s1, n_s0
    both_groups = tot1 > 0 and tot0 > 0

    parts = []
    for j in range(X.shape[1]):
        order = np.argsort(Xn[:, j], kind="mergesort")
        xs = Xn[order, j]
        nl = np.arange(1, n, dtype=np.int64)
        keep = (xs[:-1] != xs[1:]) & (nl >= min_leaf) & (n - nl >= min_leaf)
        idx = np.flatnonzero(keep)
        if idx.size == 0:
            continue
        yl = np.cumsum(yn[order])[:-1][idx]
        s1l = np.cumsum(sn[order])[:-1][idx]
        nl = nl[idx]
        nr = n - nl
        a = xs[:-1][idx]
        b = xs[1:][idx]
        t = (a + b) / 2.0
        t = np.where((a <= t) & (t < b), t, a)
        g = _vector_gain(n, n_pos, nl, yl)
        m = idx.size
        if both_groups:
            lab_l = (2 * yl >= nl).astype(np.int64)
            lab_r = (2 * (n_pos - yl) >= nr).astype(np.int64)
            n11 = off11 + lab_l * s1l + lab_r * (n_s1 - s1l)
            n10 = off10 + lab_l * (nl - s1l) + lab_r * (n_s0 - (nl - s1l))
            p1 = n11 / tot1
            p0 = n10 / tot0
            d = p1 - p0
            se = np.sqrt(p1 * (1.0 - p1) / tot1 + p0 * (1.0 - p0) / tot0)
            lo = d - z * se
            hi = d + z * se
            sg = (lo > 0.0) | (hi < 0.0)
            ph = np.where(sg, np.minimum(np.minimum(np.abs(lo), np.abs(hi)), 1.0), 0.0)
        else:
            d = np.zeros(m)
            lo = np.zeros(m)
            hi = np.zeros(m)
            sg = np.zeros(m, dtype=bool)
            ph = np.zeros(m)
        gf = np.where(sg, lam * (1.0 - ph) * g, g) if penalize else g.copy()
        parts.append((np.full(m, j, dtype=np.int64), t, nl, g, gf, d, lo, hi,
                      np.full(m, both_groups), sg, ph))

    if not parts:
        return _empty_candidates()
    return Candidates(*(np.concatenate(cols) for cols in zip(*parts)))


def _empty_candidates() -> Candidates:
    f = np.empty(0, np.float64)
    i = np.empty(0, np.int64)
    b = np.empty(0, np.bool_)
    return Candidates(i, f, i.copy(), f.copy(), f.copy(), f.copy(), f.copy(),
                      f.copy(), b, b.copy(), f.copy())


def sweep_numba(X, y, s, rows, z, lam, penalize, min_leaf, context=None) -> Candidates:
    off11, off10, tot1, tot0 = context if context is not None else (0, 0, -1, -1)
    out = _sweep_loop_nb(X, y, s, rows, float(z), float(lam), bool(penalize), int(min_leaf),
                         int(off11), int(off10), int(tot1), int(tot0))
    return Candidates(*out)


def sweep_numpy(X, y, s, rows, z, lam, penalize, min_leaf, context=None) -> Candidates:
    off11, off10, tot1, tot0 = context if context is not None else (0, 0, -1, -1)
    return _sweep_numpy(X, y, s, rows, float(z), float(lam), bool(penalize), int(min_leaf),
                        int(off11), int(off10), int(tot1), int(tot0))


def sweep(X, y, s, rows, z, lam, penalize, min_leaf, context=None) -> Candidates:
    """Enumerate all admissible splits of the node ``rows`` with the active backend.

    ``X`` is float64 (n, p); ``y`` and ``s`` are int64 0/1 vectors; ``rows``
    is an int64 index array of the node's units.

    By default parity is measured on the node's units alone. ``context`` =
    ``(off11, off10, tot1, tot0)`` widens it to a larger population: the
    positive predictions already held by units outside the node in each group,
    and the group sizes of the whole population.
    """
    if USE_NUMBA:
        return sweep_numba(X, y, s, rows, z, lam, penalize, min_leaf, context)
    return sweep_numpy(X, y, s, rows, z, lam, penalize, min_leaf, context)


def best_index(cand: Candidates) -> int:
    """Index of the winning candidate, or -1 when no candidate has positive gain.

    Ties on ``ig_fair`` go to the lower feature index, then the lower threshold,
    independently of the order of the table.
    """
    if len(cand) == 0:
        return -1
    order = np.lexsort((cand.threshold, cand.feature, -cand.ig_fair))
    i = int(order[0])
    if not cand.ig_fair[i] > 0.0:
        return -1
    return i


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
