#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "metric_oracle.hpp"
#include "godm/eval/histogram.hpp"
#include "godm/eval/runner.hpp"
#include "godm/graph/benchmark.hpp"

using namespace godm;
using namespace godm::testing;

namespace {

using Scores = std::vector<double>;
using Labels = std::vector<int>;

Graph two_group_graph() {
    // Ten nodes: four real outliers with dim-0 values 0, 1, 2, 3, six inliers at 10.
    Graph g;
    g.n = 10;
    g.d = 2;
    for (std::size_t i = 0; i < 10; ++i) {
        g.features.push_back(i < 4 ? static_cast<double>(i) : 10.0);
        g.features.push_back(0.0);
        g.labels.push_back(i < 4 ? kOutlier : kInlier);
        g.split.push_back(Split::Train);
    }
    g.num_types = 2;
    g.edges = {{0, 4}, {5, 1}, {6, 7}, {8, 9}};
    g.edge_type = {1, 2, 2, 2};
    return g;
}

}  // namespace

TEST(Auc, Examples) {
    EXPECT_EQ(auc(Scores{0.9, 0.8, 0.1, 0.2}, Labels{1, 1, 0, 0}), 1.0);
    EXPECT_EQ(auc(Scores(6, 0.3), Labels{1, 0, 1, 0, 0, 0}), 0.5);
    EXPECT_DOUBLE_EQ(auc(Scores{0.9, 0.8, 0.4, 0.2}, Labels{1, 0, 1, 0}), 0.75);
    EXPECT_THROW(auc(Scores{0.1, 0.2}, Labels{1, 1}), ConfigError);
    EXPECT_THROW(auc(Scores{0.1}, Labels{1, 0}), ConfigError);
}

TEST(AveragePrecision, Examples) {
    EXPECT_EQ(average_precision(Scores{0.9, 0.8, 0.1}, Labels{1, 1, 0}), 1.0);
    EXPECT_DOUBLE_EQ(average_precision(Scores{0.9, 0.1}, Labels{0, 1}), 0.5);
    EXPECT_DOUBLE_EQ(average_precision(Scores{0.9, 0.5, 0.4}, Labels{1, 0, 1}), 5.0 / 6.0);
    EXPECT_THROW(average_precision(Scores{0.9, 0.1}, Labels{0, 0}), ConfigError);
}

TEST(AveragePrecision, TiesFollowInputOrder) {
    EXPECT_DOUBLE_EQ(average_precision(Scores{0.5, 0.5}, Labels{1, 0}), 1.0);
    EXPECT_DOUBLE_EQ(average_precision(Scores{0.5, 0.5}, Labels{0, 1}), 0.5);
}

TEST(RecallAtK, Examples) {
    EXPECT_EQ(recall_at_k(Scores{0.9, 0.1, 0.8}, Labels{1, 0, 1}), 1.0);
    EXPECT_DOUBLE_EQ(recall_at_k(Scores{0.9, 0.8, 0.1, 0.7}, Labels{1, 0, 0, 1}, 2), 0.5);
    EXPECT_EQ(recall_at_k(Scores{0.1, 0.2, 0.3, 0.4}, Labels{1, 0, 0, 1}, 4), 1.0);
    EXPECT_THROW(recall_at_k(Scores{0.1, 0.2}, Labels{1, 0}, 0), ConfigError);
    EXPECT_THROW(recall_at_k(Scores{0.1, 0.2}, Labels{0, 0}), ConfigError);
}

TEST(Metrics, MatchBruteForceOnSmallSets) {
    Rng rng(1);
    for (std::size_t n = 2; n <= 8; ++n)
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            // Every labeling of n items, each with continuous and heavily tied scores.
            Labels y(n);
            for (std::size_t i = 0; i < n; ++i) y[i] = (mask >> i) & 1u;
            const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
            if (pos == 0) continue;
            for (int rep = 0; rep < 5; ++rep) {
                Scores s(n);
                for (auto& v : s) v = rep % 2 ? std::floor(rng.uniform() * 4.0) : rng.uniform();
                if (pos < n) {
                    ASSERT_NEAR(auc(s, y), brute_auc(s, y), 1e-12);
                }
                ASSERT_NEAR(average_precision(s, y), brute_ap(s, y), 1e-12);
                ASSERT_NEAR(recall_at_k(s, y), brute_recall(s, y, pos), 1e-12);
                const std::size_t k = 1 + rng.uniform_index(0, n - 1);
                ASSERT_NEAR(recall_at_k(s, y, k), brute_recall(s, y, k), 1e-12);
            }
        }
}

TEST(Metrics, InvariantUnderMonotoneTransform) {
    Rng rng(2);
    for (int rep = 0; rep < 50; ++rep) {
        Scores s(30);
        Labels y(30);
        for (std::size_t i = 0; i < 30; ++i) {
            s[i] = rng.normal();
            y[i] = i % 4 == 0;
        }
        Scores t(30);
        for (std::size_t i = 0; i < 30; ++i) t[i] = std::exp(3.0 * s[i]) + 7.0;
        EXPECT_EQ(auc(s, y), auc(t, y));
        EXPECT_EQ(recall_at_k(s, y), recall_at_k(t, y));
        EXPECT_NEAR(average_precision(s, y), average_precision(t, y), 1e-15);
    }
}

TEST(Histogram, DensitiesSumToOne) {
    Rng rng(3);
    const Graph g = random_graph(rng, 80, 3, 10);
    const Graph s = random_graph(rng, 25, 3, 10);
    const auto t = density_histogram(g, s, 1, 7);
    ASSERT_EQ(t.bin_edges.size(), 8u);
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < 7; ++k) {
        a += t.real[k];
        b += t.synthetic[k];
    }
    EXPECT_NEAR(a, 1.0, 1e-9);
    EXPECT_NEAR(b, 1.0, 1e-9);
}

TEST(Histogram, IdenticalGroupsGiveIdenticalDensities) {
    Rng rng(4);
    Graph g = random_graph(rng, 30, 2, 5);
    for (auto& l : g.labels) l = kOutlier;
    const auto t = density_histogram(g, g, 0, 5);
    EXPECT_EQ(t.real, t.synthetic);
    EXPECT_EQ(t.to_csv().substr(0, 25), "bin,lo,hi,real,synthetic\n");
}

TEST(Histogram, TenNodeHandCase) {
    const Graph real = two_group_graph();
    Graph synth = real;
    // Real outliers on dim 0: 0, 1, 2, 3. Synthetic: all ten nodes, six of them at 10.
    const auto t = density_histogram(real, synth, 0, 2);
    EXPECT_EQ(t.bin_edges, (std::vector<double>{0.0, 5.0, 10.0}));
    EXPECT_EQ(t.real, (std::vector<double>{1.0, 0.0}));
    EXPECT_EQ(t.synthetic, (std::vector<double>{0.4, 0.6}));
    EXPECT_THROW(density_histogram(real, synth, 2, 2), ConfigError);
}

TEST(Histogram, TypeFrequencies) {
    const Graph real = two_group_graph();
    Graph synth = real;
    synth.edge_type = {1, 1, 1, 2};
    const auto t = type_frequencies(real, synth);
    // Outlier-incident real edges: (0,4) type 1 and (5,1) type 2.
    EXPECT_EQ(t.real, (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(t.synthetic, (std::vector<double>{0.75, 0.25}));
    EXPECT_EQ(t.to_csv(), "type,real,synthetic\n1,0.5,0.75\n2,0.5,0.25\n");
}

TEST(Detector, FitsCohesiveBenchmark) {
    Rng rng(0);
    const Graph g = make_benchmark(rng, 1000, 16, 0.05, 1.0, 0, false);
    const DetectorConfig cfg;
    const auto res = train_detector(g, cfg);
    ASSERT_EQ(res.loss_history.size(), cfg.epochs);
    EXPECT_LT(res.loss_history[9], res.loss_history[0]);
    EXPECT_LT(res.loss_history.back(), res.loss_history[9]);
    const auto train = masked_labels(g, Split::Train);
    const auto scores = detector_scores(res.params, g);
    EXPECT_GT(auc(select(scores, train.index), train.labels), 0.95);
    const auto again = train_detector(g, cfg);
    EXPECT_EQ(detector_scores(again.params, g), scores);
}

TEST(Detector, SingleClassTrainingRejected) {
    Rng rng(5);
    Graph g = random_graph(rng, 20, 2, 10);
    for (auto& l : g.labels) l = kInlier;
    EXPECT_THROW(train_detector(g, {}), ConfigError);
}

TEST(Detector, IgnoresLabelsAndEdgeChannels) {
    Rng rng(6);
    const Graph g = random_graph(rng, 30, 3, 60, 2, true);
    Graph h = g;
    for (auto& l : h.labels) l = l == kOutlier ? kInlier : kOutlier;
    for (auto& t : h.edge_time) t += 100;
    Rng a(1), b(1);
    const auto p = init_detector(a, 3, 8);
    const auto q = init_detector(b, 3, 8);
    EXPECT_EQ(detector_scores(p, g), detector_scores(q, h));
}

TEST(Runner, EvaluatesOnlyRealTestNodes) {
    Rng rng(7);
    const Graph g = make_benchmark(rng, 300, 8, 0.1, 1.0, 0, false);
    Graph extra = random_graph(rng, 40, 8, 20);
    for (auto& s : extra.split) s = Split::Test;
    DetectorConfig cfg;
    cfg.epochs = 5;
    Graph train_graph = batch_graphs(g, extra);
    for (std::size_t i = g.n; i < train_graph.n; ++i) train_graph.split[i] = Split::Test;
    const auto r = evaluate_detector(g, train_graph, cfg);
    EXPECT_EQ(r.k, g.count(Split::Test, kOutlier));
}

TEST(Runner, ResultsCsvSchema) {
    std::vector<MetricsReport> rows(1);
    rows[0] = {"baseline", 3, 0.75, 0.5, 0.25, 4, 0.0, 0};
    EXPECT_EQ(results_csv(rows), "arm,seed,auc,ap,recall_at_k,k,seconds,peak_bytes\nbaseline,3,0.75,0.5,0.25,4,0,0\n");
}

TEST(Runner, Summaries) {
    std::vector<MetricsReport> rows(3);
    rows[0].ap = 1.0;
    rows[1].ap = 2.0;
    rows[2].ap = 3.0;
    const auto s = summarize(rows, [](const MetricsReport& r) { return r.ap; });
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.stdev, 1.0);
}
