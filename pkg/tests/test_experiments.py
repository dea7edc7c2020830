import math
import random

import numpy as np
import pytest

from diffnet.experiments import (
    LIFETIME_LADDER,
    SINGLE_LAYER_FEATURE_NAMES,
    ExperimentConfig,
    bias_restricted_eval,
    chi2_ranking,
    chi2_scores,
    featurize_cascades,
    ks_two_sample,
    layer_ablation,
    layer_feature_indices,
    minmax_scale_columns,
    partition_by_size,
    rank_features_ks,
    single_layer_baseline,
    single_layer_samples,
    temporal_sweep,
)
from diffnet.features import FEATURE_NAMES
from diffnet.ingest import ArticleCascade, ArticleLabel, TweetRecord
from diffnet.model import LabeledSample, stratified_shuffle_cv
from diffnet.netbuild import truncate_by_lifetime
from reference_stats import chi2_class_sum_statistic, kolmogorov_sf_series, ks_statistic


def _sample(i, label, vector, bias="", n_users=10, source=""):
    return LabeledSample(
        article_id=f"a{i:04d}",
        vector=np.asarray(vector, dtype=np.float64),
        label=label,
        bias=bias,
        n_users=n_users,
        source=source,
    )


def _tree_cascade(article_id, label, rng, n_spreaders, depth_bias, bias="", source="x.org"):
    """Root posts, spreaders retweet an existing user; deeper with higher bias."""
    authors = [f"{article_id}_u0"]
    tweets = [TweetRecord(f"{article_id}_t0", authors[0], 1000, article_id)]
    ts = 1000
    for i in range(1, n_spreaders + 1):
        if rng.random() < depth_bias and len(authors) > 1:
            target = authors[rng.randrange(1, len(authors))]
        else:
            target = authors[0]
        author = f"{article_id}_u{i}"
        ts += rng.randint(1, 600)
        tweets.append(
            TweetRecord(f"{article_id}_t{i}", author, ts, article_id, retweet_of=target)
        )
        authors.append(author)
    return ArticleCascade.build(
        article_id, tweets, ArticleLabel(article_id, label, source, bias)
    )


def _mini_corpus(rng, n_per_class=12):
    cascades = []
    for i in range(n_per_class):
        cascades.append(
            _tree_cascade(f"d{i:03d}", "D", rng, rng.randint(20, 40), 0.8)
        )
        cascades.append(
            _tree_cascade(f"m{i:03d}", "M", rng, rng.randint(4, 10), 0.1)
        )
    return cascades


class TestPartition:
    def test_bin_boundaries(self):
        samples = [
            _sample(0, "D", [0.0], n_users=50),
            _sample(1, "D", [0.0], n_users=100),
            _sample(2, "M", [0.0], n_users=1000),
        ]
        bins = partition_by_size(samples)
        assert [s.article_id for s in bins["0-100"]] == ["a0000"]
        assert [s.article_id for s in bins["100-1000"]] == ["a0001"]
        assert [s.article_id for s in bins["1000+"]] == ["a0002"]

    def test_bins_cover_everything(self):
        rng = random.Random(0)
        samples = [
            _sample(i, "D", [0.0], n_users=rng.randint(0, 5000)) for i in range(60)
        ]
        bins = partition_by_size(samples)
        assert sum(len(v) for v in bins.values()) == 60


class TestLayerIndices:
    def test_offsets(self):
        assert layer_feature_indices("Q") == list(range(0, 9))
        assert layer_feature_indices("RT") == list(range(9, 18))
        assert layer_feature_indices("M") == list(range(18, 27))
        assert layer_feature_indices("R") == list(range(27, 36))

    def test_names_align(self):
        for kind in ("Q", "RT", "M", "R"):
            for i in layer_feature_indices(kind):
                assert FEATURE_NAMES[i].startswith(f"{kind}_")

    def test_unknown_layer(self):
        with pytest.raises(ValueError):
            layer_feature_indices("ALL")


class TestAblation:
    def _signal_samples(self, rng, layer_idx, n=60):
        samples = []
        for i in range(n):
            label = "D" if i % 2 else "M"
            vec = rng.normal(0, 1, 38)
            vec[layer_idx] += 2.5 if label == "D" else -2.5
            samples.append(_sample(i, label, vec))
        return samples

    def test_informative_layer_beats_empty_layer(self):
        rng = np.random.default_rng(10)
        samples = self._signal_samples(rng, layer_idx=9)  # RT_SCC
        for s in samples:
            s.vector[0:9] = 0.0  # Q layer empty everywhere
        rt = layer_ablation(samples, "RT", folds=5, seed=1)
        q = layer_ablation(samples, "Q", folds=5, seed=1)
        assert rt.mean("AUROC") > 0.9
        # constant features carry no ranking information: exactly the tie value
        assert q.mean("AUROC") == pytest.approx(0.5)

    def test_unknown_layer_rejected(self):
        with pytest.raises(ValueError):
            layer_ablation([], "XX")


class TestBiasRestricted:
    def _biased_samples(self, rng, n_left=25, n_right=25):
        # left sources carry a +signal, right sources an inverted one
        samples = []
        for i in range(n_left):
            label = "D" if i % 2 else "M"
            x = (1.0 if label == "D" else -1.0) + rng.normal(0, 0.2)
            samples.append(_sample(i, label, [x], bias="left", source="l.org"))
        for i in range(n_right):
            label = "D" if i % 2 else "M"
            x = (-1.0 if label == "D" else 1.0) + rng.normal(0, 0.2)
            samples.append(
                _sample(n_left + i, label, [x], bias="right", source="r.org")
            )
        return samples

    def test_training_is_restricted_to_requested_bias(self):
        # signals are inverted between biases, so a restricted model is
        # anti-correlated with the opposite-bias majority of its test pool;
        # a model trained on the union would sit near 0.5 instead
        rng = np.random.default_rng(3)
        samples = self._biased_samples(rng)
        left = bias_restricted_eval(samples, "left", folds=4, seed=7)
        right = bias_restricted_eval(samples, "right", folds=4, seed=7)
        assert left.mean("AUROC") < 0.35
        assert right.mean("AUROC") < 0.35

    def test_excluded_sources_absent_everywhere(self):
        rng = np.random.default_rng(4)
        samples = self._biased_samples(rng)
        # dropping the right-source pool flips the left-trained result
        report = bias_restricted_eval(
            samples, "left", folds=4, seed=7, excluded_sources=["r.org"]
        )
        assert report.mean("AUROC") > 0.7

    def test_missing_bias_rejected(self):
        samples = [_sample(0, "D", [0.0], bias="right"), _sample(1, "M", [0.0], bias="right")]
        with pytest.raises(ValueError):
            bias_restricted_eval(samples, "left")

    def test_single_class_bias_subset_rejected(self):
        samples = [
            _sample(0, "D", [0.0], bias="left"),
            _sample(1, "D", [1.0], bias="left"),
            _sample(2, "M", [0.0], bias="right"),
            _sample(3, "M", [1.0], bias="right"),
        ]
        with pytest.raises(ValueError):
            bias_restricted_eval(samples, "left")

    def test_bad_bias_value(self):
        with pytest.raises(ValueError):
            bias_restricted_eval([], "center")


class TestChi2:
    def test_identical_feature_scores_zero(self):
        X = np.array([[1.0], [1.0], [1.0], [1.0]])
        pos = np.array([True, True, False, False])
        assert chi2_scores(X, pos)[0] == pytest.approx(0.0)

    def test_indicator_fixture_by_hand(self):
        # observed sums: pos 2, neg 0; expected 1 and 1 -> chi2 = 2
        X = np.array([[1.0], [1.0], [0.0], [0.0]])
        pos = np.array([True, True, False, False])
        assert chi2_scores(X, pos)[0] == pytest.approx(2.0)

    def test_matches_reference_on_random_input(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(4, 30))
            X = rng.uniform(0, 3, size=(n, 4))
            pos = rng.random(n) < 0.5
            if pos.all() or (~pos).all():
                pos[0] = ~pos[0]
            got = chi2_scores(X, pos)
            for j in range(4):
                assert got[j] == pytest.approx(
                    chi2_class_sum_statistic(X[:, j], pos), abs=1e-9
                )

    def test_negative_input_rejected(self):
        with pytest.raises(ValueError):
            chi2_scores(np.array([[-1.0]]), np.array([True]))

    def test_minmax_scaling(self):
        X = np.array([[0.0, 5.0], [10.0, 5.0], [5.0, 5.0]])
        Z = minmax_scale_columns(X)
        assert Z[:, 0].tolist() == [0.0, 1.0, 0.5]
        assert np.all(Z[:, 1] == 0.0)  # constant column

    def test_ranking_indicator_on_top_and_scale_invariance(self):
        rng = np.random.default_rng(6)
        n = 40
        labels = ["D" if i % 2 else "M" for i in range(n)]
        indicator = np.array([1.0 if l == "D" else 0.0 for l in labels])
        noise = rng.uniform(0, 1, n)
        samples = [
            _sample(i, labels[i], [indicator[i], noise[i]]) for i in range(n)
        ]
        names = ("ind", "noise")
        ranking = chi2_ranking(samples, folds=5, seed=2, feature_names=names)
        assert ranking[0][0] == "ind"
        scaled = [
            _sample(i, labels[i], [indicator[i] * 1000.0, noise[i]])
            for i in range(n)
        ]
        ranking_scaled = chi2_ranking(scaled, folds=5, seed=2, feature_names=names)
        assert [r[0] for r in ranking_scaled] == [r[0] for r in ranking]
        assert ranking_scaled[0][1] == pytest.approx(ranking[0][1])

    def test_ranking_covers_all_features_sorted(self):
        rng = np.random.default_rng(7)
        samples = [
            _sample(i, "D" if i % 2 else "M", rng.uniform(0, 1, 38))
            for i in range(30)
        ]
        ranking = chi2_ranking(samples, folds=3, seed=0)
        assert len(ranking) == 38
        assert {name for name, _ in ranking} == set(FEATURE_NAMES)
        scores = [s for _, s in ranking]
        assert scores == sorted(scores, reverse=True)
        assert all(s >= 0 for s in scores)


class TestKS:
    def test_identical_samples(self):
        d, p = ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert d == 0.0
        assert p == pytest.approx(1.0)

    def test_disjoint_supports(self):
        d, _ = ks_two_sample([0.0, 0.1, 0.2], [5.0, 6.0])
        assert d == pytest.approx(1.0)

    def test_hand_tabulated_fixture(self):
        d, _ = ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0, 4.0])
        assert d == pytest.approx(0.25)

    def test_statistic_matches_reference(self):
        rng = np.random.default_rng(8)
        for _ in range(60):
            a = rng.normal(0, 1, int(rng.integers(2, 40)))
            b = rng.normal(rng.uniform(-1, 1), 1.3, int(rng.integers(2, 40)))
            d, _ = ks_two_sample(a, b)
            assert d == pytest.approx(ks_statistic(a, b), abs=1e-12)

    def test_pvalue_matches_series(self):
        rng = np.random.default_rng(9)
        for _ in range(40):
            a = rng.normal(0, 1, int(rng.integers(5, 50)))
            b = rng.normal(0.5, 1, int(rng.integers(5, 50)))
            d, p = ks_two_sample(a, b)
            x = d * math.sqrt(len(a) * len(b) / (len(a) + len(b)))
            assert p == pytest.approx(kolmogorov_sf_series(x), abs=1e-10)

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])

    def test_rank_features_ks_orders_by_statistic(self):
        rng = np.random.default_rng(10)
        n = 60
        samples = []
        for i in range(n):
            label = "D" if i % 2 else "M"
            strong = 3.0 if label == "D" else -3.0
            samples.append(
                _sample(i, label, [strong + rng.normal(0, 0.1), rng.normal()])
            )
        rows = rank_features_ks(samples, feature_names=("strong", "noise"))
        assert rows[0][0] == "strong"
        assert rows[0][1] > rows[1][1]
        assert rows[0][3] is True  # rejected at alpha
        for _, d, p, _ in rows:
            assert 0.0 <= d <= 1.0
            assert 0.0 <= p <= 1.0


class TestTemporalSweep:
    def test_ladder_and_full_lifetime_equals_untruncated(self):
        rng = random.Random(11)
        cascades = _mini_corpus(rng, n_per_class=8)
        results = temporal_sweep(cascades, folds=3, seed=5)
        assert [lt for lt, _ in results] == list(LIFETIME_LADDER)
        assert len(results) == 7
        samples = featurize_cascades(cascades)
        untruncated = stratified_shuffle_cv(samples, folds=3, seed=5)
        # max span in the mini corpus is far below 7 days
        assert results[-1][1].to_text() == untruncated.to_text()

    def test_tweet_sets_monotone_across_ladder(self):
        rng = random.Random(12)
        cascades = _mini_corpus(rng, n_per_class=3)
        for cascade in cascades:
            previous: set = set()
            for lifetime in LIFETIME_LADDER:
                ids = {t.tweet_id for t in truncate_by_lifetime(cascade, lifetime).tweets}
                assert previous <= ids
                previous = ids


class TestSingleLayer:
    def test_eleven_features_and_names(self):
        assert len(SINGLE_LAYER_FEATURE_NAMES) == 11
        assert SINGLE_LAYER_FEATURE_NAMES[0] == "ALL_SCC"
        assert SINGLE_LAYER_FEATURE_NAMES[-2:] == ("T", "U")
        rng = random.Random(13)
        cascades = _mini_corpus(rng, n_per_class=3)
        samples = single_layer_samples(cascades)
        assert all(s.vector.shape == (11,) for s in samples)

    def test_rt_only_article_matches_rt_block(self):
        rng = random.Random(14)
        cascade = _tree_cascade("d001", "D", rng, 15, 0.5)
        multi = featurize_cascades([cascade])[0]
        single = single_layer_samples([cascade])[0]
        assert np.array_equal(single.vector[0:9], multi.vector[9:18])
        assert np.array_equal(single.vector[9:], multi.vector[36:])

    def test_aggregate_node_identity(self):
        # aggregate graph nodes = all users minus those seen only in pure tweets
        tweets = [
            TweetRecord("t1", "u1", 1000, "a1"),
            TweetRecord("t2", "u2", 1001, "a1", retweet_of="u1"),
            TweetRecord("t3", "u3", 1002, "a1"),
            TweetRecord("t4", "u2", 1003, "a1"),
        ]
        cascade = ArticleCascade.build("a1", tweets, ArticleLabel("a1", "D"))
        from diffnet.netbuild import aggregate_layer, build_network

        net = build_network(cascade)
        merged = aggregate_layer(net)
        sample = single_layer_samples([cascade])[0]
        pure_only = net.pure_authors - merged.nodes()
        assert merged.node_count() == sample.n_users - len(pure_only)

    def test_baseline_report_runs(self):
        rng = random.Random(15)
        cascades = _mini_corpus(rng, n_per_class=6)
        report = single_layer_baseline(cascades, folds=3, seed=1)
        assert len(report.folds) == 3


class TestCorpusQualitative:
    def test_broader_deeper_trees_show_in_rt_features(self):
        rng = random.Random(16)
        cascades = _mini_corpus(rng, n_per_class=10)
        samples = featurize_cascades(cascades)
        rt_lwcc = FEATURE_NAMES.index("RT_LWCC")
        rt_dwcc = FEATURE_NAMES.index("RT_DWCC")
        d_mean = np.mean([s.vector[rt_lwcc] for s in samples if s.label == "D"])
        m_mean = np.mean([s.vector[rt_lwcc] for s in samples if s.label == "M"])
        assert d_mean > m_mean
        d_depth = np.mean([s.vector[rt_dwcc] for s in samples if s.label == "D"])
        m_depth = np.mean([s.vector[rt_dwcc] for s in samples if s.label == "M"])
        assert d_depth > m_depth

    def test_featurize_cascades_propagates_metadata(self):
        rng = random.Random(17)
        cascade = _tree_cascade("d001", "D", rng, 5, 0.5, bias="right", source="s.org")
        sample = featurize_cascades([cascade])[0]
        assert sample.label == "D"
        assert sample.bias == "right"
        assert sample.source == "s.org"
        assert sample.n_users == 6  # root plus 5 spreaders

    def test_experiment_config_echo(self):
        cfg = ExperimentConfig(dataset="x.csv", seed=4, excluded_sources=("b.com",))
        d = cfg.to_json_dict()
        assert d["dataset"] == "x.csv"
        assert d["seed"] == 4
        assert d["excluded_sources"] == ["b.com"]
        assert d["layers"] == ["Q", "RT", "M", "R"]
