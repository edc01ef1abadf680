#pragma once

// Command implementations behind the `godm` executable. Commands: gen, fit,
// augment, eval, bench. Each reads an optional JSON config (--config) and
// applies kebab-case flag overrides on top of it.

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "godm/cli/run_config.hpp"
#include "godm/eval/histogram.hpp"
#include "godm/graph/benchmark.hpp"
#include "godm/graph/io.hpp"
#include "godm/pipeline/augment.hpp"

namespace godm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

inline void write_vae_loss_csv(const std::vector<VaeEpochLoss>& rows, const std::filesystem::path& path) {
    std::string out = "epoch,loss_x,loss_e,loss_t,loss_p,loss_kl,total\n";
    for (const auto& r : rows) {
        out += std::to_string(r.epoch);
        for (double v : {r.x, r.e, r.t, r.p, r.kl, r.total}) {
            out += ',';
            io_detail::append_double(out, v);
        }
        out += '\n';
    }
    io_detail::write_text(path, out);
}

inline void write_diffusion_loss_csv(const std::vector<double>& rows, const std::filesystem::path& path) {
    std::string out = "epoch,loss\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out += std::to_string(k + 1) + ',';
        io_detail::append_double(out, rows[k]);
        out += '\n';
    }
    io_detail::write_text(path, out);
}

inline Graph require_graph(const RunConfig& c) {
    if (c.graph.empty()) throw ConfigError("no input graph: set \"graph\" in the config or pass --graph");
    return load_graph(c.graph);
}

inline void cmd_gen(const RunConfig& c, std::ostream& log) {
    Rng rng(c.train.seed);
    const Graph g = make_benchmark(rng, c.benchmark);
    save_graph(g, c.output);
    log << "wrote benchmark graph (n=" << g.n << ", d=" << g.d << ", edges=" << g.num_edges() << ") to " << c.output
        << "\n";
}

inline GodmModel fit_and_save(const Graph& g, const RunConfig& c, std::ostream& log) {
    GodmModel m = fit_godm(g, c.train);
    const auto ckpt = c.checkpoint_path();
    save_checkpoint(m, ckpt);
    const std::filesystem::path dir = c.output;
    std::filesystem::create_directories(dir);
    write_vae_loss_csv(m.vae_history, dir / "vae_loss.csv");
    write_diffusion_loss_csv(m.diffusion_history, dir / "diffusion_loss.csv");
    log << "trained " << m.vae_history.size() << " autoencoder epochs and " << m.diffusion_history.size()
        << " diffusion epochs; checkpoint " << ckpt.string() << "\n";
    return m;
}

inline void cmd_fit(const RunConfig& c, std::ostream& log) { fit_and_save(require_graph(c), c, log); }

inline void cmd_augment(const RunConfig& c, std::ostream& log) {
    const Graph g = require_graph(c);
    const GodmModel m = load_checkpoint(c.checkpoint_path());
    const Graph aug = augment(g, m, c.eval.synthetic_count, c.train.seed);
    save_graph(aug, c.output);
    log << "added " << aug.n - g.n << " synthetic outliers; wrote " << c.output << "\n";
}

inline void print_summary(const BenchmarkReport& rep, std::ostream& log) {
    for (const char* arm : {kBaselineArm, kAugmentedArm}) {
        const auto rows = rep.arm(arm);
        const auto a = summarize(rows, [](const MetricsReport& r) { return r.auc; });
        const auto p = summarize(rows, [](const MetricsReport& r) { return r.ap; });
        const auto k = summarize(rows, [](const MetricsReport& r) { return r.recall_at_k; });
        log << arm << ": AUC " << a.mean << " +- " << a.stdev << ", AP " << p.mean << " +- " << p.stdev
            << ", Recall@k " << k.mean << " +- " << k.stdev << " over " << rows.size() << " seeds\n";
    }
}

inline BenchmarkReport evaluate_and_write(const Graph& g, const GodmModel& m, const RunConfig& c, std::ostream& log) {
    const BenchmarkReport rep = run_benchmark(g, m, c.eval);
    const auto path = std::filesystem::path(c.output) / "results.csv";
    write_results_csv(rep.rows, path);
    print_summary(rep, log);
    log << "wrote " << path.string() << "\n";
    return rep;
}

inline void cmd_eval(const RunConfig& c, std::ostream& log) {
    const Graph g = require_graph(c);
    const GodmModel m = load_checkpoint(c.checkpoint_path());
    evaluate_and_write(g, m, c, log);
}

/// Benchmark graph, training, paired evaluation, augmented graphs, and histograms.
inline void cmd_bench(const RunConfig& c, std::ostream& log) {
    const std::filesystem::path dir = c.output;
    Graph g;
    if (c.graph.empty()) {
        Rng rng(c.train.seed);
        g = make_benchmark(rng, c.benchmark);
        save_graph(g, dir / "graph");
    } else {
        g = load_graph(c.graph);
    }
    const GodmModel m = fit_and_save(g, c, log);
    const BenchmarkReport rep = evaluate_and_write(g, m, c, log);
    for (std::size_t k = 0; k < rep.augmented.size(); ++k) {
        const Graph& aug = rep.augmented[k];
        save_graph(aug, dir / "augmented" / ("seed_" + std::to_string(c.eval.seed + k)));
    }
    const Graph synth = rep.augmented.empty() || rep.augmented.front().n == g.n
                            ? Graph{}
                            : synthesize(m, rep.augmented.front().n - g.n, c.eval.seed);
    if (synth.n > 0 || c.eval.synthetic_count.value_or(1) == 0) {
        Graph s = synth;
        if (s.n == 0) s.d = g.d;
        const std::size_t dim = c.histogram_dim;
        io_detail::write_text(dir / ("histogram_dim" + std::to_string(dim) + ".csv"),
                              density_histogram(g, s, dim, c.histogram_bins).to_csv());
        if (g.has_types() && s.n > 0) io_detail::write_text(dir / "edge_types.csv", type_frequencies(g, s).to_csv());
    }
    log << "bench outputs in " << dir.string() << "\n";
}

namespace cli_detail {

enum class Kind { Real, Count, Integer, Boolean, Text };

struct Flag {
    const char* name;  // kebab-case flag without dashes
    const char* path;  // JSON key; "benchmark.x" for nested keys
    Kind kind;
    const char* help;
};

inline const std::vector<Flag>& flags() {
    static const std::vector<Flag> table = {
        {"lr", "lr", Kind::Real, "learning rate"},
        {"epochs", "epochs", Kind::Count, "autoencoder epochs"},
        {"patience", "patience", Kind::Count, "early-stopping patience"},
        {"w-x", "w_x", Kind::Real, "feature loss weight"},
        {"w-e", "w_e", Kind::Real, "edge loss weight"},
        {"w-t", "w_t", Kind::Real, "time loss weight"},
        {"w-p", "w_p", Kind::Real, "edge-type loss weight"},
        {"beta", "beta", Kind::Real, "KL weight"},
        {"neg-ratio", "neg_ratio", Kind::Count, "negative samples per edge"},
        {"partition-size", "partition_size", Kind::Count, "partition size b"},
        {"diffusion-steps", "diffusion_steps", Kind::Count, "sampler steps N"},
        {"steps", "diffusion_steps", Kind::Count, "alias of --diffusion-steps"},
        {"hidden", "hidden", Kind::Count, "latent width (0 = from d)"},
        {"shared-depth", "shared_depth", Kind::Count, "shared GraphSAGE layers"},
        {"diffusion-epochs", "diffusion_epochs", Kind::Count, "diffusion epochs (0 = --epochs)"},
        {"diffusion-batch", "diffusion_batch", Kind::Count, "diffusion minibatch rows"},
        {"block-size", "block_size", Kind::Count, "generation block size (0 = partition size)"},
        {"stochastic-sampler", "stochastic_sampler", Kind::Boolean, "use the stochastic sampler"},
        {"heun-sampler", "heun_sampler", Kind::Boolean, "second-order correction on deterministic sampler steps"},
        {"sample-types", "sample_types", Kind::Boolean, "sample edge types instead of argmax"},
        {"standardize-latents", "standardize_latents", Kind::Boolean, "standardize latents before diffusion"},
        {"balance-diffusion", "balance_diffusion", Kind::Boolean, "class-balanced diffusion epochs"},
        {"graph", "graph", Kind::Text, "input graph directory"},
        {"checkpoint", "checkpoint", Kind::Text, "checkpoint file (default <output>/model.ckpt)"},
        {"output", "output", Kind::Text, "output directory"},
        {"seeds", "seeds", Kind::Count, "evaluation seeds"},
        {"synthetic-count", "synthetic_count", Kind::Count, "synthetic outliers (default: train outliers)"},
        {"record-timing", "record_timing", Kind::Boolean, "write wall-clock and memory columns"},
        {"detector-hidden", "detector_hidden", Kind::Count, "detector hidden width"},
        {"detector-epochs", "detector_epochs", Kind::Count, "detector epochs"},
        {"detector-lr", "detector_lr", Kind::Real, "detector learning rate"},
        {"histogram-dim", "histogram_dim", Kind::Count, "feature dimension for the density histogram"},
        {"histogram-bins", "histogram_bins", Kind::Count, "histogram bins"},
        {"n", "benchmark.n", Kind::Count, "benchmark nodes"},
        {"d", "benchmark.d", Kind::Count, "benchmark feature dimension"},
        {"outlier-frac", "benchmark.outlier_frac", Kind::Real, "benchmark outlier fraction"},
        {"cohesion", "benchmark.cohesion", Kind::Real, "benchmark cohesion in [0, 1]"},
        {"num-types", "benchmark.P", Kind::Count, "benchmark edge types P"},
        {"with-time", "benchmark.with_time", Kind::Boolean, "benchmark edge timestamps"},
        {"mean-degree", "benchmark.mean_degree", Kind::Real, "benchmark mean degree"},
        {"activity-spread", "benchmark.activity_spread", Kind::Real, "benchmark degree heterogeneity"},
        {"activity-scale", "benchmark.activity_scale", Kind::Real, "scale of the activity feature"},
        {"outlier-shift", "benchmark.outlier_shift", Kind::Real, "benchmark outlier mean shift"},
        {"lattice-spacing", "benchmark.lattice_spacing", Kind::Real, "benchmark community spacing"},
        {"communities", "benchmark.communities", Kind::Count, "benchmark communities (0 = from n)"},
        {"time-horizon", "benchmark.time_horizon", Kind::Count, "benchmark timestamp range"},
    };
    return table;
}

inline nlohmann::json convert(const Flag& f, const std::string& raw) {
    auto fail = [&](const char* what) { return ConfigError("--" + std::string(f.name) + ": " + what + ", got '" + raw + "'"); };
    switch (f.kind) {
        case Kind::Text: return raw;
        case Kind::Boolean:
            if (raw == "true" || raw == "1" || raw == "on") return true;
            if (raw == "false" || raw == "0" || raw == "off") return false;
            throw fail("expected true or false");
        case Kind::Count: {
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (ec != std::errc() || p != raw.data() + raw.size() || raw.empty())
                throw fail("expected a non-negative integer");
            return v;
        }
        case Kind::Integer: {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (ec != std::errc() || p != raw.data() + raw.size() || raw.empty()) throw fail("expected an integer");
            return v;
        }
        case Kind::Real: {
            double v = 0;
            auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (ec != std::errc() || p != raw.data() + raw.size() || raw.empty()) throw fail("expected a number");
            return v;
        }
    }
    return nullptr;
}

struct CommandOptions {
    std::string config;
    std::string seed;
    std::map<std::string, std::string> values;  // flag name -> raw text
    bool no_timing = false;
};

inline void add_common_options(CLI::App* cmd, CommandOptions& o) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--seed", o.seed, "random seed for every stage")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_flag("--no-timing", o.no_timing, "write 0 for seconds and peak_bytes");
    for (const auto& f : flags()) {
        cmd->add_option_function<std::string>(
            std::string("--") + f.name, [&o, name = std::string(f.name)](const std::string& v) { o.values[name] = v; },
            f.help)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
}

inline RunConfig resolve(const CommandOptions& o) {
    nlohmann::json doc = o.config.empty() ? nlohmann::json::object() : read_config_file(o.config);
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& f : flags()) {
        auto it = o.values.find(f.name);
        if (it == o.values.end()) continue;
        const std::string path = f.path;
        const auto dot = path.find('.');
        if (dot == std::string::npos) {
            doc[path] = convert(f, it->second);
        } else {
            auto& sub = doc[path.substr(0, dot)];
            if (sub.is_null()) sub = nlohmann::json::object();
            sub[path.substr(dot + 1)] = convert(f, it->second);
        }
    }
    if (!o.seed.empty()) doc["seed"] = convert({"seed", "seed", Kind::Count, ""}, o.seed);
    if (o.no_timing) doc["record_timing"] = false;
    return parse_run_config(doc);
}

}  // namespace cli_detail

/// Parses arguments and runs one command. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Synthetic outlier generation for imbalanced graph outlier detection", "godm"};
    app.require_subcommand(1);
    struct Entry {
        const char* name;
        const char* help;
        void (*run)(const RunConfig&, std::ostream&);
    };
    const std::vector<Entry> entries = {
        {"gen", "write a synthetic benchmark graph directory", cmd_gen},
        {"fit", "train the autoencoder and diffusion model; write a checkpoint and loss CSVs", cmd_fit},
        {"augment", "append synthetic outliers to a graph using a checkpoint", cmd_augment},
        {"eval", "baseline vs augmented detector over seeds; write results.csv", cmd_eval},
        {"bench", "benchmark graph, fit, eval, augmented graphs and histograms", cmd_bench},
    };
    std::vector<cli_detail::CommandOptions> options(entries.size());
    std::vector<CLI::App*> commands;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        commands.push_back(app.add_subcommand(entries[k].name, entries[k].help));
        cli_detail::add_common_options(commands.back(), options[k]);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (!commands[k]->parsed()) continue;
        try {
            entries[k].run(cli_detail::resolve(options[k]), out);
            return kExitOk;
        } catch (const ConfigError& e) {
            err << "godm " << entries[k].name << ": " << e.what() << "\n";
            return kExitConfig;
        } catch (const IoError& e) {
            err << "godm " << entries[k].name << ": " << e.what() << "\n";
            return kExitConfig;
        } catch (const std::exception& e) {
            err << "godm " << entries[k].name << ": " << e.what() << "\n";
            return kExitRuntime;
        }
    }
    return kExitConfig;
}

}  // namespace godm
