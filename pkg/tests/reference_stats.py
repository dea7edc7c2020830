"""Independent statistical reference implementations for tests.

Kept deliberately close to textbook definitions: ROC area by the trapezoid
rule over explicit curve points, gradients by central finite differences,
chi-square and KS statistics by direct tabulation.
"""

from __future__ import annotations

import numpy as np


def trapezoid_auroc(scores, positive) -> float:
    """Area under the ROC curve built point-by-point over thresholds."""
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(positive, dtype=bool)
    n_pos = int(positive.sum())
    n_neg = int((~positive).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("need both classes")
    points = [(0.0, 0.0)]
    for t in sorted(set(scores.tolist()), reverse=True):
        sel = scores >= t
        tpr = float(np.sum(sel & positive)) / n_pos
        fpr = float(np.sum(sel & ~positive)) / n_neg
        points.append((fpr, tpr))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def central_difference_gradient(f, theta, h=1e-6) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.zeros_like(theta)
    for i in range(len(theta)):
        step = h * max(1.0, abs(theta[i]))
        up = theta.copy()
        up[i] += step
        down = theta.copy()
        down[i] -= step
        grad[i] = (f(up) - f(down)) / (2.0 * step)
    return grad


def chi2_class_sum_statistic(values, is_pos) -> float:
    """Feature-selection chi-square: observed per-class sums of a
    nonnegative feature against expectation proportional to class counts.
    """
    values = np.asarray(values, dtype=np.float64)
    is_pos = np.asarray(is_pos, dtype=bool)
    total = values.sum()
    if total == 0:
        return 0.0
    n = len(values)
    observed = np.array([values[is_pos].sum(), values[~is_pos].sum()])
    expected = total * np.array([is_pos.sum() / n, (~is_pos).sum() / n])
    stat = 0.0
    for o, e in zip(observed, expected):
        if e > 0:
            stat += (o - e) ** 2 / e
    return stat


def kolmogorov_sf_series(x: float, terms: int = 100) -> float:
    """Survival function of the Kolmogorov distribution, by its alternating
    series 2 * sum_k (-1)^(k-1) exp(-2 k^2 x^2).
    """
    if x <= 0:
        return 1.0
    total = 0.0
    for k in range(1, terms + 1):
        total += (-1) ** (k - 1) * np.exp(-2.0 * k * k * x * x)
    return float(min(1.0, max(0.0, 2.0 * total)))


def ks_statistic(a, b) -> float:
    """sup |ECDF_a - ECDF_b| evaluated on the pooled support."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    support = np.concatenate([a, b])
    best = 0.0
    for x in support:
        fa = np.searchsorted(a, x, side="right") / len(a)
        fb = np.searchsorted(b, x, side="right") / len(b)
        best = max(best, abs(fa - fb))
    return best
