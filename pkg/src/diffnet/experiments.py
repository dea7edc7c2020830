"""Experiment drivers: size partitions, bias-restricted training, layer
ablation, chi-square / KS feature analyses, temporal sweep, and the
single-layer baseline.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import kolmogorov

from .features import FEATURE_NAMES, assemble_vector, extract_layer_features
from .ingest import ArticleCascade
from .model import (
    EvaluationReport,
    LabeledSample,
    evaluate_split,
    fold_seed_sequences,
    stratified_shuffle_cv,
    stratified_test_indices,
)
from .netbuild import (
    LAYER_KINDS,
    aggregate_layer,
    aggregate_user_count,
    build_network,
    truncate_by_lifetime,
)

LIFETIME_LADDER = (
    3600,  # 1h
    6 * 3600,
    12 * 3600,
    86400,  # 1d
    2 * 86400,
    3 * 86400,
    7 * 86400,
)

SINGLE_LAYER_FEATURE_NAMES = tuple(
    f"ALL_{name.split('_', 1)[1]}" for name in FEATURE_NAMES[:9]
) + ("T", "U")


@dataclass(frozen=True)
class ExperimentConfig:
    """Echo of everything that determines an experiment cell's output."""

    dataset: str = ""
    size_class: str = "all"
    bias_train_filter: str = "all"
    layers: tuple[str, ...] = LAYER_KINDS
    lifetime: Optional[int] = None
    folds: int = 10
    test_fraction: float = 0.2
    seed: int = 0
    C: float = 1.0
    excluded_sources: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "dataset": self.dataset,
            "size_class": self.size_class,
            "bias_train_filter": self.bias_train_filter,
            "layers": list(self.layers),
            "lifetime": self.lifetime,
            "folds": self.folds,
            "test_fraction": self.test_fraction,
            "seed": self.seed,
            "C": self.C,
            "excluded_sources": list(self.excluded_sources),
        }
        out.update(self.extra)
        return out


def partition_by_size(samples: Sequence[LabeledSample]) -> dict[str, list[LabeledSample]]:
    """Bin samples by aggregate user count; the full set is the bins' union."""
    out: dict[str, list[LabeledSample]] = {}
    for s in samples:
        out.setdefault(s.size_class, []).append(s)
    return out


def layer_feature_indices(layer: str) -> list[int]:
    """Positions of one layer's nine metrics inside the 38-entry vector."""
    if layer not in LAYER_KINDS:
        raise ValueError(f"unknown layer {layer!r}; expected one of {LAYER_KINDS}")
    offset = LAYER_KINDS.index(layer) * 9
    return list(range(offset, offset + 9))


def layer_ablation(
    samples: Sequence[LabeledSample],
    layer: str,
    folds: int = 10,
    test_fraction: float = 0.2,
    seed: int = 0,
    C: float = 1.0,
) -> EvaluationReport:
    """Cross-validate on a single layer's nine features; T and U excluded."""
    return stratified_shuffle_cv(
        samples,
        folds=folds,
        test_fraction=test_fraction,
        seed=seed,
        C=C,
        feature_indices=layer_feature_indices(layer),
    )


def bias_restricted_eval(
    samples: Sequence[LabeledSample],
    train_bias: str,
    folds: int = 10,
    train_fraction: float = 0.8,
    seed: int = 0,
    C: float = 1.0,
    excluded_sources: Sequence[str] = (),
) -> EvaluationReport:
    """Train only on networks of one political bias, test on the rest.

    Per fold, a stratified random train_fraction of the biased subset is
    used for training (class-weighted model); every sample not trained on,
    of any bias, lands in the test set. Excluded sources are removed from
    the whole pool before anything else.
    """
    if train_bias not in ("left", "right"):
        raise ValueError("train_bias must be 'left' or 'right'")
    excluded = set(excluded_sources)
    pool = [s for s in samples if s.source not in excluded]
    biased_pos = [i for i, s in enumerate(pool) if s.bias == train_bias]
    if not biased_pos:
        raise ValueError(f"no samples with bias {train_bias!r}")
    labels = [pool[i].label for i in biased_pos]
    if len(set(labels)) < 2:
        raise ValueError(f"bias {train_bias!r} subset contains one class")
    results = []
    for fold, ss in enumerate(fold_seed_sequences(seed, folds), start=1):
        rng = np.random.default_rng(ss)
        held = stratified_test_indices(labels, 1.0 - train_fraction, rng)
        train_pos = {biased_pos[i] for i in range(len(biased_pos))} - {
            biased_pos[i] for i in held
        }
        train = [pool[i] for i in sorted(train_pos)]
        test = [s for i, s in enumerate(pool) if i not in train_pos]
        results.append(
            evaluate_split(fold, train, test, C=C, class_weights="balanced")
        )
    return EvaluationReport(folds=tuple(results))


def minmax_scale_columns(X: np.ndarray) -> np.ndarray:
    """Per-column (x - min)/(max - min); constant columns map to 0."""
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = hi - lo
    safe = np.where(span == 0.0, 1.0, span)
    Z = (X - lo) / safe
    return np.where(span == 0.0, 0.0, Z)


def chi2_scores(X: np.ndarray, positive: np.ndarray) -> np.ndarray:
    """Feature-selection chi-square of nonnegative features vs the class.

    Observed: per-class column sums. Expected: column total split by class
    frequency. Columns with zero total mass score 0.
    """
    if np.any(X < 0):
        raise ValueError("chi2 requires nonnegative features")
    n = X.shape[0]
    frac_pos = positive.sum() / n
    obs_pos = X[positive].sum(axis=0)
    obs_neg = X[~positive].sum(axis=0)
    total = obs_pos + obs_neg
    exp_pos = total * frac_pos
    exp_neg = total * (1.0 - frac_pos)
    with np.errstate(invalid="ignore", divide="ignore"):
        stat = np.where(exp_pos > 0, (obs_pos - exp_pos) ** 2 / exp_pos, 0.0)
        stat = stat + np.where(exp_neg > 0, (obs_neg - exp_neg) ** 2 / exp_neg, 0.0)
    return stat


def chi2_ranking(
    samples: Sequence[LabeledSample],
    folds: int = 10,
    test_fraction: float = 0.2,
    seed: int = 0,
    feature_names: Sequence[str] = FEATURE_NAMES,
) -> list[tuple[str, float]]:
    """Rank features by mean chi-square over CV folds, best first.

    Each fold min-max scales its training portion and scores features
    there; the held-out part plays no role in the statistic.
    """
    X = np.stack([s.vector for s in samples]).astype(np.float64)
    if X.shape[1] != len(feature_names):
        raise ValueError("feature_names does not match vector width")
    y_pos = np.array([s.label == "D" for s in samples])
    labels = [s.label for s in samples]
    accum = np.zeros(X.shape[1])
    for ss in fold_seed_sequences(seed, folds):
        rng = np.random.default_rng(ss)
        test_idx = set(stratified_test_indices(labels, test_fraction, rng).tolist())
        train_mask = np.array([i not in test_idx for i in range(len(samples))])
        Z = minmax_scale_columns(X[train_mask])
        accum += chi2_scores(Z, y_pos[train_mask])
    means = accum / folds
    order = sorted(range(len(means)), key=lambda i: (-means[i], i))
    return [(feature_names[i], float(means[i])) for i in order]


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sample KS: (sup ECDF gap, asymptotic two-sided p-value)."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / n
    cdf_b = np.searchsorted(b, pooled, side="right") / m
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    effective = n * m / (n + m)
    p = float(kolmogorov(d * math.sqrt(effective)))
    return d, min(max(p, 0.0), 1.0)


def rank_features_ks(
    samples: Sequence[LabeledSample],
    alpha: float = 0.05,
    feature_names: Sequence[str] = FEATURE_NAMES,
) -> list[tuple[str, float, float, bool]]:
    """Per-feature KS test of class D values against class M values.

    Returns (name, D_statistic, p_value, rejected_at_alpha) sorted by
    decreasing D.
    """
    X = np.stack([s.vector for s in samples]).astype(np.float64)
    if X.shape[1] != len(feature_names):
        raise ValueError("feature_names does not match vector width")
    pos = np.array([s.label == "D" for s in samples])
    if pos.all() or (~pos).all():
        raise ValueError("need both classes")
    rows = []
    for i, name in enumerate(feature_names):
        d, p = ks_two_sample(X[pos, i], X[~pos, i])
        rows.append((name, d, p, p < alpha))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows


def _featurize_one(cascade: ArticleCascade) -> LabeledSample:
    net = build_network(cascade)
    return LabeledSample(
        article_id=cascade.article_id,
        vector=assemble_vector(net),
        label=cascade.label.class_label,
        bias=cascade.label.bias,
        n_users=aggregate_user_count(net),
        source=cascade.label.source,
    )


def featurize_cascades(
    cascades: Sequence[ArticleCascade], jobs: int = 1
) -> list[LabeledSample]:
    """38-feature samples straight from cascades (no intermediate file).

    Articles are independent, so any jobs count returns the same list in
    input order.
    """
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_featurize_one, cascades, chunksize=16))
    return [_featurize_one(cascade) for cascade in cascades]


def _temporal_cell(args) -> tuple[int, EvaluationReport]:
    cascades, lifetime, folds, test_fraction, seed, C = args
    truncated = [truncate_by_lifetime(c, lifetime) for c in cascades]
    samples = featurize_cascades(truncated)
    report = stratified_shuffle_cv(
        samples, folds=folds, test_fraction=test_fraction, seed=seed, C=C
    )
    return lifetime, report


def temporal_sweep(
    cascades: Sequence[ArticleCascade],
    lifetimes: Sequence[int] = LIFETIME_LADDER,
    folds: int = 10,
    test_fraction: float = 0.2,
    seed: int = 0,
    C: float = 1.0,
    jobs: int = 1,
) -> list[tuple[int, EvaluationReport]]:
    """Rebuild networks per lifetime truncation and cross-validate each.

    The article set never shrinks (the earliest tweet always survives) and
    every cell reuses the same master seed, so the longest lifetime on a
    fully covered corpus reproduces the untruncated report. Cells are
    independent; any jobs count gives the same series.
    """
    tasks = [
        (tuple(cascades), lifetime, folds, test_fraction, seed, C)
        for lifetime in lifetimes
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_temporal_cell, tasks))
    return [_temporal_cell(task) for task in tasks]


def single_layer_samples(cascades: Sequence[ArticleCascade]) -> list[LabeledSample]:
    """11-feature samples from the all-interactions aggregate graph."""
    out = []
    for cascade in cascades:
        net = build_network(cascade)
        merged = aggregate_layer(net)
        values = list(extract_layer_features(merged).as_tuple())
        values.append(float(net.pure_tweet_count))
        values.append(float(net.pure_tweet_users))
        out.append(
            LabeledSample(
                article_id=cascade.article_id,
                vector=np.asarray(values, dtype=np.float64),
                label=cascade.label.class_label,
                bias=cascade.label.bias,
                n_users=aggregate_user_count(net),
                source=cascade.label.source,
            )
        )
    return out


def single_layer_baseline(
    cascades: Sequence[ArticleCascade],
    folds: int = 10,
    test_fraction: float = 0.2,
    seed: int = 0,
    C: float = 1.0,
) -> EvaluationReport:
    """The comparison row: same CV protocol on the 11 aggregate features."""
    return stratified_shuffle_cv(
        single_layer_samples(cascades),
        folds=folds,
        test_fraction=test_fraction,
        seed=seed,
        C=C,
    )
