#pragma once

// Paired baseline-vs-augmented evaluation of the downstream detector.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "godm/eval/detector.hpp"
#include "godm/eval/metrics.hpp"
#include "godm/graph/io.hpp"
#include "godm/pipeline/augment.hpp"

namespace godm {

inline constexpr const char* kBaselineArm = "baseline";
inline constexpr const char* kAugmentedArm = "godm";

struct EvalConfig {
    DetectorConfig detector;
    std::size_t seeds = 5;
    std::uint64_t seed = 0;  // seeds used: seed, seed+1, ...
    std::optional<std::size_t> synthetic_count;
    bool record_timing = true;  // false writes 0 for seconds and peak_bytes

    void validate() const {
        detector.validate();
        if (seeds < 1) throw ConfigError("eval: seeds must be >= 1");
    }
};

struct MetricsReport {
    std::string arm;
    std::uint64_t seed = 0;
    double auc = 0.0;
    double ap = 0.0;
    double recall_at_k = 0.0;
    std::size_t k = 0;
    double seconds = 0.0;
    std::uint64_t peak_bytes = 0;
};

/// Peak resident set size of this process so far.
inline std::uint64_t peak_rss_bytes() {
    rusage u{};
    if (getrusage(RUSAGE_SELF, &u) != 0) return 0;
    return static_cast<std::uint64_t>(u.ru_maxrss) * 1024;
}

/// Trains the detector on `train_graph` and scores the test-mask nodes of the
/// real graph, which must be a prefix of `train_graph`.
inline MetricsReport evaluate_detector(const Graph& real, const Graph& train_graph, const DetectorConfig& cfg) {
    if (train_graph.n < real.n) throw ConfigError("evaluate_detector: training graph does not contain the real graph");
    const DetectorResult det = train_detector(train_graph, cfg);
    const auto scores = detector_scores(det.params, train_graph);
    const MaskedLabels test = masked_labels(real, Split::Test);
    const auto s = select(scores, test.index);
    MetricsReport r;
    r.seed = cfg.seed;
    r.k = static_cast<std::size_t>(std::count(test.labels.begin(), test.labels.end(), 1));
    r.auc = auc(s, test.labels);
    r.ap = average_precision(s, test.labels);
    r.recall_at_k = recall_at_k(s, test.labels);
    return r;
}

struct BenchmarkReport {
    std::vector<MetricsReport> rows;  // sorted by (arm, seed)
    std::vector<Graph> augmented;     // treatment input per seed, in seed order

    std::vector<MetricsReport> arm(const std::string& name) const {
        std::vector<MetricsReport> out;
        for (const auto& r : rows)
            if (r.arm == name) out.push_back(r);
        return out;
    }
};

inline BenchmarkReport run_benchmark(const Graph& g, const GodmModel& model, const EvalConfig& cfg) {
    cfg.validate();
    BenchmarkReport rep;
    using clock = std::chrono::steady_clock;
    auto finish = [&cfg](MetricsReport r, const char* arm, std::uint64_t seed, clock::time_point t0) {
        r.arm = arm;
        r.seed = seed;
        if (cfg.record_timing) {
            r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
            r.peak_bytes = peak_rss_bytes();
        }
        return r;
    };
    for (std::size_t k = 0; k < cfg.seeds; ++k) {
        const std::uint64_t seed = cfg.seed + k;
        DetectorConfig det = cfg.detector;
        det.seed = seed;

        auto t0 = clock::now();
        rep.rows.push_back(finish(evaluate_detector(g, g, det), kBaselineArm, seed, t0));

        t0 = clock::now();
        Graph aug = augment(g, model, cfg.synthetic_count, seed);
        rep.rows.push_back(finish(evaluate_detector(g, aug, det), kAugmentedArm, seed, t0));
        rep.augmented.push_back(std::move(aug));
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const MetricsReport& a, const MetricsReport& b) {
        return a.arm != b.arm ? a.arm < b.arm : a.seed < b.seed;
    });
    return rep;
}

struct MeanStd {
    double mean = 0.0;
    double stdev = 0.0;
};

/// Mean and sample standard deviation of one metric over rows.
template <class F>
MeanStd summarize(const std::vector<MetricsReport>& rows, F metric) {
    MeanStd s;
    if (rows.empty()) return s;
    for (const auto& r : rows) s.mean += metric(r);
    s.mean /= static_cast<double>(rows.size());
    if (rows.size() > 1) {
        double v = 0.0;
        for (const auto& r : rows) v += (metric(r) - s.mean) * (metric(r) - s.mean);
        s.stdev = std::sqrt(v / static_cast<double>(rows.size() - 1));
    }
    return s;
}

inline std::string results_csv(const std::vector<MetricsReport>& rows) {
    std::string out = "arm,seed,auc,ap,recall_at_k,k,seconds,peak_bytes\n";
    for (const auto& r : rows) {
        out += r.arm + ',' + std::to_string(r.seed) + ',';
        io_detail::append_double(out, r.auc);
        out += ',';
        io_detail::append_double(out, r.ap);
        out += ',';
        io_detail::append_double(out, r.recall_at_k);
        out += ',' + std::to_string(r.k) + ',';
        io_detail::append_double(out, r.seconds);
        out += ',' + std::to_string(r.peak_bytes) + '\n';
    }
    return out;
}

inline void write_results_csv(const std::vector<MetricsReport>& rows, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    io_detail::write_text(path, results_csv(rows));
}

}  // namespace godm
