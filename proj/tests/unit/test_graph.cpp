#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "godm/eval/metrics.hpp"
#include "godm/graph/batch.hpp"
#include "godm/graph/benchmark.hpp"
#include "godm/graph/io.hpp"
#include "godm/graph/partition.hpp"
#include "godm/graph/sampling.hpp"

using namespace godm;
using godm::testing::path_graph;
using godm::testing::random_graph;
using godm::testing::scratch_dir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

Graph clique_pair(std::size_t k) {
    Graph g;
    g.n = 2 * k;
    g.d = 1;
    g.features.assign(g.n, 0.0);
    g.labels.assign(g.n, kInlier);
    g.split.assign(g.n, Split::None);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                if (a != b) g.edges.push_back({c * k + a, c * k + b});
    return g;
}

}  // namespace

TEST(GraphIo, RoundTripIsExact) {
    Rng rng(1);
    const Graph g = random_graph(rng, 50, 4, 200, 3, true);
    const auto dir = scratch_dir("roundtrip");
    save_graph(g, dir);
    EXPECT_EQ(load_graph(dir), g);
}

TEST(GraphIo, RoundTripHoldsForHundredRandomGraphs) {
    const auto dir = scratch_dir("roundtrip100");
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const std::size_t n = 1 + rng.uniform_index(0, 30);
        const int P = static_cast<int>(rng.uniform_index(0, 3));
        const bool timed = rng.uniform() < 0.5;
        Graph g = random_graph(rng, n, 1 + rng.uniform_index(0, 4), rng.uniform_index(0, 60), P, timed);
        if (seed % 7 == 0) {
            g.labels[0] = kUnknown;
            g.split[0] = Split::None;
        }
        save_graph(g, dir);
        ASSERT_EQ(load_graph(dir), g) << "seed " << seed;
    }
}

TEST(GraphIo, EdgeToMissingNodeNamesRow) {
    Rng rng(2);
    const Graph g = random_graph(rng, 5, 2, 3);
    const auto dir = scratch_dir("badedge");
    save_graph(g, dir);
    write_file(dir / "edges.csv", "src,dst\n0,1\n1,5\n");
    try {
        load_graph(dir);
        FAIL();
    } catch (const IoError& e) {
        EXPECT_EQ(e.row(), 3u);
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
    }
}

TEST(GraphIo, TypedEdgesWithoutTypesRejected) {
    Rng rng(3);
    const Graph g = random_graph(rng, 5, 2, 3);
    const auto dir = scratch_dir("typed");
    save_graph(g, dir);
    write_file(dir / "edges.csv", "src,dst,type\n0,1,1\n");
    EXPECT_THROW(load_graph(dir), IoError);
}

TEST(GraphIo, MalformedInputsRejected) {
    Rng rng(4);
    const Graph g = random_graph(rng, 4, 2, 3, 2, true);
    const auto dir = scratch_dir("malformed");
    save_graph(g, dir);
    write_file(dir / "features.csv", "1,2\n3\n4,5\n6,7\n");
    EXPECT_THROW(load_graph(dir), IoError);
    save_graph(g, dir);
    write_file(dir / "edges.csv", "src,dst,time,type\n0,1,-4,1\n");
    EXPECT_THROW(load_graph(dir), IoError);
    write_file(dir / "edges.csv", "src,dst,time,type\n0,1,4,3\n");
    EXPECT_THROW(load_graph(dir), IoError);
    std::filesystem::remove(dir / "labels.csv");
    EXPECT_THROW(load_graph(dir), IoError);
}

TEST(Benchmark, OutlierCountFollowsRounding) {
    Rng rng(0);
    const Graph g = make_benchmark(rng, 1000, 16, 0.05, 1.0, 0, false);
    std::size_t out = 0;
    for (int l : g.labels) out += l == kOutlier;
    EXPECT_EQ(out, 50u);
    EXPECT_EQ(g.count(Split::Train, kOutlier), 20u);
    EXPECT_EQ(g.count(Split::Val, kOutlier), 10u);
    EXPECT_EQ(g.count(Split::Test, kOutlier), 20u);
}

TEST(Benchmark, SameSeedSameGraph) {
    BenchmarkSpec spec;
    spec.n = 300;
    spec.num_types = 3;
    spec.with_time = true;
    Rng a(9), b(9);
    EXPECT_EQ(make_benchmark(a, spec), make_benchmark(b, spec));
}

TEST(Benchmark, RejectsEmptyClass) {
    Rng rng(0);
    EXPECT_THROW(make_benchmark(rng, 10, 16, 0.01, 1.0, 0, false), ConfigError);
    EXPECT_THROW(make_benchmark(rng, 100, 16, 0.6, 1.0, 0, false), ConfigError);
}

TEST(Benchmark, CohesiveFeaturesAreLinearlySeparable) {
    Rng rng(0);
    const Graph g = make_benchmark(rng, 1000, 16, 0.05, 1.0, 0, false);
    // Logistic regression on standardized features, full-batch gradient descent on the train mask.
    std::vector<double> mean(g.d, 0.0), sd(g.d, 0.0);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.d; ++j) mean[j] += g.row(i)[j] / static_cast<double>(g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.d; ++j) sd[j] += std::pow(g.row(i)[j] - mean[j], 2) / static_cast<double>(g.n);
    for (auto& s : sd) s = std::sqrt(s);
    auto z = [&](std::size_t i, std::size_t j) { return (g.row(i)[j] - mean[j]) / sd[j]; };
    std::vector<double> w(g.d, 0.0);
    double b = 0.0;
    for (int it = 0; it < 500; ++it) {
        std::vector<double> gw(g.d, 0.0);
        double gb = 0.0, cnt = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            if (g.split[i] != Split::Train) continue;
            double s = b;
            for (std::size_t j = 0; j < g.d; ++j) s += w[j] * z(i, j);
            const double r = 1.0 / (1.0 + std::exp(-s)) - (g.labels[i] == kOutlier ? 1.0 : 0.0);
            for (std::size_t j = 0; j < g.d; ++j) gw[j] += r * z(i, j);
            gb += r;
            cnt += 1.0;
        }
        for (std::size_t j = 0; j < g.d; ++j) w[j] -= 0.5 * gw[j] / cnt;
        b -= 0.5 * gb / cnt;
    }
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < g.n; ++i) {
        if (g.split[i] != Split::Test) continue;
        double s = b;
        for (std::size_t j = 0; j < g.d; ++j) s += w[j] * z(i, j);
        scores.push_back(s);
        labels.push_back(g.labels[i]);
    }
    EXPECT_GT(auc(scores, labels), 0.9);
}

TEST(Partition, LargeTargetGivesOnePartition) {
    Rng rng(5);
    const Graph g = random_graph(rng, 40, 2, 80);
    const auto p = partition_graph(g, 40);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.members[0].size(), 40u);
    EXPECT_EQ(partition_graph(g, 1000).size(), 1u);
}

TEST(Partition, DisconnectedCliquesSplitExactly) {
    const Graph g = clique_pair(100);
    const auto p = partition_graph(g, 100);
    ASSERT_EQ(p.size(), 2u);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t k = 0; k < 100; ++k) EXPECT_EQ(p.members[c][k], c * 100 + k);
}

TEST(Partition, PathOfTenWithTargetFour) {
    const auto p = partition_graph(path_graph(10), 4);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p.members[0], (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(p.members[1], (std::vector<std::size_t>{4, 5, 6, 7}));
    EXPECT_EQ(p.members[2], (std::vector<std::size_t>{8, 9}));
}

TEST(Partition, CoverIsTotalAndDisjoint) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const Graph g = random_graph(rng, 150, 2, rng.uniform_index(0, 300));
        const auto p = partition_graph(g, 2 + rng.uniform_index(0, 60));
        std::vector<int> hits(g.n, 0);
        for (std::size_t k = 0; k < p.size(); ++k) {
            for (auto v : p.members[k]) {
                ++hits[v];
                EXPECT_EQ(p.assignment[v], k);
            }
            if (k + 1 < p.size()) {
                EXPECT_EQ(p.members[k].size(), p.target_size);
            }
        }
        for (int h : hits) EXPECT_EQ(h, 1);
    }
}

TEST(Partition, RejectsTinyTarget) { EXPECT_THROW(partition_graph(path_graph(4), 1), ConfigError); }

TEST(NegativeSampling, RatioOneDoublesEdgeSet) {
    Rng rng(6);
    const Graph g = random_graph(rng, 60, 2, 150);
    const Subgraph s = whole_graph(g, std::vector<double>(g.n, 0.0));
    const auto set = negative_sample(rng, s, 1);
    EXPECT_EQ(set.pairs.size(), 2 * s.num_edges());
    EXPECT_EQ(set.positives, s.num_edges());
    EXPECT_FALSE(set.has_warning());
}

TEST(NegativeSampling, CompleteGraphHasNoNegatives) {
    const Graph g = clique_pair(6);
    const Subgraph s = extract_subgraph(g, {0, 1, 2, 3, 4, 5}, std::vector<double>(g.n, 0.0));
    Rng rng(0);
    const auto set = negative_sample(rng, s, 1);
    EXPECT_EQ(set.negatives, 0u);
    EXPECT_EQ(set.pairs.size(), s.num_edges());
    EXPECT_TRUE(set.has_warning());
}

TEST(NegativeSampling, NegativesAreAbsentDistinctAndOffDiagonal) {
    Rng rng(7);
    const Graph g = random_graph(rng, 30, 2, 200);
    const Subgraph s = whole_graph(g, std::vector<double>(g.n, 0.0));
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t e = 0; e < s.num_edges(); ++e) edges.emplace(s.src[e], s.dst[e]);
    const auto set = negative_sample(rng, s, 2);
    std::set<std::pair<std::size_t, std::size_t>> negatives;
    for (std::size_t k = 0; k < set.pairs.size(); ++k) {
        const auto& pr = set.pairs[k];
        if (k < set.positives) {
            EXPECT_EQ(pr.label, 1.0);
            EXPECT_EQ(pr.i, s.src[k]);
            EXPECT_EQ(pr.j, s.dst[k]);
            continue;
        }
        EXPECT_EQ(pr.label, 0.0);
        EXPECT_NE(pr.i, pr.j);
        EXPECT_FALSE(edges.count({pr.i, pr.j}));
        EXPECT_TRUE(negatives.emplace(pr.i, pr.j).second);
    }
    EXPECT_EQ(set.negatives + set.skipped, 2 * set.positives);
}

TEST(Batch, DisjointUnionCounts) {
    Rng rng(8);
    const Graph g = random_graph(rng, 20, 3, 40, 2, true);
    const Graph s = random_graph(rng, 7, 3, 9, 2, true);
    const Graph u = batch_graphs(g, s);
    EXPECT_EQ(u.n, 27u);
    EXPECT_EQ(u.num_edges(), 49u);
    for (std::size_t i = 20; i < 27; ++i) {
        EXPECT_EQ(u.labels[i], kOutlier);
        EXPECT_EQ(u.split[i], Split::Train);
    }
    for (std::size_t e = 40; e < 49; ++e) {
        EXPECT_GE(u.edges[e].src, 20u);
        EXPECT_GE(u.edges[e].dst, 20u);
    }
    for (std::size_t e = 0; e < 40; ++e) EXPECT_EQ(u.edges[e], g.edges[e]);
    EXPECT_TRUE(std::equal(g.features.begin(), g.features.end(), u.features.begin()));
    EXPECT_TRUE(std::equal(g.labels.begin(), g.labels.end(), u.labels.begin()));
}

TEST(Batch, EmptySyntheticIsIdentity) {
    Rng rng(9);
    const Graph g = random_graph(rng, 10, 2, 10);
    Graph empty;
    empty.d = 2;
    EXPECT_EQ(batch_graphs(g, empty), g);
}

TEST(Batch, FeatureMismatchRejected) {
    Rng rng(10);
    const Graph g = random_graph(rng, 10, 2, 10);
    const Graph s = random_graph(rng, 3, 4, 2);
    EXPECT_THROW(batch_graphs(g, s), ShapeError);
}
