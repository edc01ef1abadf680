#pragma once

// Run configuration shared by all commands: a flat JSON object holding the
// training keys, paths, evaluation knobs, and a nested "benchmark" object.
// Unknown keys are rejected.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "godm/eval/runner.hpp"
#include "godm/graph/benchmark.hpp"
#include "godm/pipeline/config_io.hpp"

namespace godm {

struct RunConfig {
    TrainConfig train;
    BenchmarkSpec benchmark;
    EvalConfig eval;
    std::string graph;       // input graph directory
    std::string checkpoint;  // model file; default <output>/model.ckpt
    std::string output = "out";
    std::size_t histogram_dim = 0;
    std::size_t histogram_bins = 20;

    std::filesystem::path checkpoint_path() const {
        return checkpoint.empty() ? std::filesystem::path(output) / "model.ckpt" : std::filesystem::path(checkpoint);
    }
};

inline const std::vector<std::string>& run_keys() {
    static const std::vector<std::string> keys = {
        "graph", "checkpoint", "output", "seeds", "synthetic_count", "record_timing", "detector_hidden",
        "detector_epochs", "detector_lr", "histogram_dim", "histogram_bins", "benchmark"};
    return keys;
}

inline const std::vector<std::string>& benchmark_keys() {
    static const std::vector<std::string> keys = {
        "n", "d", "outlier_frac", "cohesion", "P", "with_time", "mean_degree", "activity_spread",
        "activity_scale", "outlier_shift", "lattice_spacing", "communities", "time_horizon"};
    return keys;
}

namespace run_detail {

template <class T>
void read(const nlohmann::json& j, const char* key, T& field, const std::string& where = "") {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    const std::string name = where + key;
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("config key '" + name + "' must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("config key '" + name + "' must be a string");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("config key '" + name + "' must be a number");
    } else {
        const bool negative = v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0;
        if (!v.is_number_integer() || (std::is_unsigned_v<T> && negative))
            throw ConfigError("config key '" + name + "' must be a" +
                              (std::is_unsigned_v<T> ? " non-negative" : "n") + " integer");
    }
    field = v.get<T>();
}

}  // namespace run_detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        const auto& rk = run_keys();
        if (!is_config_key(key) && std::find(rk.begin(), rk.end(), key) == rk.end())
            throw ConfigError("unknown config key '" + key + "'");
    }
    RunConfig c;
    apply_config_json(c.train, j);
    using run_detail::read;
    read(j, "graph", c.graph);
    read(j, "checkpoint", c.checkpoint);
    read(j, "output", c.output);
    read(j, "seeds", c.eval.seeds);
    if (j.contains("synthetic_count") && !j.at("synthetic_count").is_null()) {
        std::size_t n = 0;
        read(j, "synthetic_count", n);
        c.eval.synthetic_count = n;
    }
    read(j, "record_timing", c.eval.record_timing);
    read(j, "detector_hidden", c.eval.detector.hidden);
    read(j, "detector_epochs", c.eval.detector.epochs);
    read(j, "detector_lr", c.eval.detector.lr);
    read(j, "histogram_dim", c.histogram_dim);
    read(j, "histogram_bins", c.histogram_bins);
    c.eval.seed = c.train.seed;
    if (j.contains("benchmark")) {
        const auto& b = j.at("benchmark");
        if (!b.is_object()) throw ConfigError("config key 'benchmark' must be an object");
        for (const auto& [key, _] : b.items()) {
            const auto& bk = benchmark_keys();
            if (std::find(bk.begin(), bk.end(), key) == bk.end())
                throw ConfigError("unknown config key 'benchmark." + key + "'");
        }
        auto& s = c.benchmark;
        const std::string w = "benchmark.";
        read(b, "n", s.n, w);
        read(b, "d", s.d, w);
        read(b, "outlier_frac", s.outlier_frac, w);
        read(b, "cohesion", s.cohesion, w);
        read(b, "P", s.num_types, w);
        read(b, "with_time", s.with_time, w);
        read(b, "mean_degree", s.mean_degree, w);
        read(b, "activity_spread", s.activity_spread, w);
        read(b, "activity_scale", s.activity_scale, w);
        read(b, "outlier_shift", s.outlier_shift, w);
        read(b, "lattice_spacing", s.lattice_spacing, w);
        read(b, "communities", s.communities, w);
        read(b, "time_horizon", s.time_horizon, w);
    }
    c.train.validate();
    c.eval.validate();
    if (c.histogram_bins < 1) throw ConfigError("histogram_bins must be >= 1");
    return c;
}

inline nlohmann::json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
}

}  // namespace godm
