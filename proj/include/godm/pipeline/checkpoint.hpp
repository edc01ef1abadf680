#pragma once

// Checkpoint file:
//   byte 0          format version
//   bytes 1..8      little-endian u64 length L of the metadata document
//   next L bytes    JSON metadata (dimensions, config, scalers, histories,
//                   and the ordered list of arrays with their shapes)
//   remainder       the arrays as little-endian IEEE-754 doubles, in list order

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "godm/graph/graph.hpp"
#include "godm/pipeline/config_io.hpp"
#include "godm/pipeline/train.hpp"

namespace godm {

inline constexpr std::uint8_t kCheckpointVersion = 1;

/// FNV-1a, 64-bit.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Identifies the graph shape a model was trained for.
inline std::uint64_t model_fingerprint(std::size_t d, int num_types, bool timed) {
    return fnv1a("d=" + std::to_string(d) + ";P=" + std::to_string(num_types) + ";time=" + (timed ? "1" : "0"));
}

inline std::uint64_t model_fingerprint(const Graph& g) { return model_fingerprint(g.d, g.num_types, g.timed); }

inline std::uint64_t model_fingerprint(const GodmModel& m) {
    return model_fingerprint(m.vae.d, m.vae.num_types, m.vae.timed);
}

/// Throws ConfigError if `m` was trained for a graph of a different shape.
inline void check_compatible(const GodmModel& m, const Graph& g) {
    if (model_fingerprint(m) == model_fingerprint(g)) return;
    throw ConfigError("checkpoint was trained for d=" + std::to_string(m.vae.d) + ", P=" +
                      std::to_string(m.vae.num_types) + ", time=" + (m.vae.timed ? "yes" : "no") +
                      " but the graph has d=" + std::to_string(g.d) + ", P=" + std::to_string(g.num_types) +
                      ", time=" + (g.timed ? "yes" : "no"));
}

namespace ckpt_detail {

struct NamedArray {
    std::string name;
    Tensor tensor;
};

inline std::vector<NamedArray> arrays_of(const GodmModel& m) {
    std::vector<NamedArray> out;
    for (const auto& p : m.vae.parameters()) out.push_back({p.name(), p});
    for (const auto& p : m.diffusion.parameters()) out.push_back({p.name(), p});
    const std::size_t w = m.latent_scaler.mean.size();
    out.push_back({"latent_scaler.mean", Tensor::from({1, w}, m.latent_scaler.mean)});
    out.push_back({"latent_scaler.scale", Tensor::from({1, w}, m.latent_scaler.scale)});
    return out;
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return v;
}

}  // namespace ckpt_detail

inline std::string serialize_checkpoint(const GodmModel& m) {
    using nlohmann::ordered_json;
    ordered_json meta;
    meta["format"] = "godm-checkpoint";
    meta["fingerprint"] = model_fingerprint(m);
    meta["d"] = m.vae.d;
    meta["P"] = m.vae.num_types;
    meta["has_time"] = m.vae.timed;
    meta["latent"] = m.vae.latent_width();
    meta["shared_depth"] = m.vae.encoder.shared.size();
    meta["denoiser_layers"] = m.diffusion.net.weights.size();
    meta["denoiser_hidden"] = m.diffusion.net.weights.front().rows();
    meta["input_scaling"] = m.diffusion.net.input_scaling;
    meta["skip"] = m.diffusion.net.skip;
    meta["config"] = config_to_json(m.config);
    meta["time_scaler"] = {{"min", m.vae.time_scaler.min}, {"max", m.vae.time_scaler.max}};
    const auto& s = m.diffusion.schedule;
    meta["schedule"] = {{"sigma_min", s.sigma_min}, {"sigma_max", s.sigma_max}, {"rho", s.rho},
                        {"steps", s.steps},         {"p_mean", s.p_mean},       {"p_std", s.p_std}};
    ordered_json vh = ordered_json::array();
    for (const auto& r : m.vae_history)
        vh.push_back({{"epoch", r.epoch}, {"x", r.x}, {"e", r.e}, {"t", r.t}, {"p", r.p}, {"kl", r.kl}, {"total", r.total}});
    meta["vae_history"] = vh;
    meta["diffusion_history"] = m.diffusion_history;
    const auto arrays = ckpt_detail::arrays_of(m);
    ordered_json list = ordered_json::array();
    for (const auto& a : arrays) list.push_back({{"name", a.name}, {"shape", a.tensor.shape()}});
    meta["arrays"] = list;

    const std::string text = meta.dump();
    std::string out;
    out.push_back(static_cast<char>(kCheckpointVersion));
    ckpt_detail::put_u64(out, text.size());
    out += text;
    for (const auto& a : arrays)
        for (double v : a.tensor.data()) ckpt_detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

inline GodmModel deserialize_checkpoint(const std::string& bytes) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 9) throw IoError("checkpoint: file too short");
    if (p[0] != kCheckpointVersion)
        throw IoError("checkpoint: unsupported format version " + std::to_string(p[0]));
    const std::uint64_t len = ckpt_detail::get_u64(p + 1);
    if (len > bytes.size() - 9) throw IoError("checkpoint: truncated metadata");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(bytes.substr(9, len));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("checkpoint: bad metadata: ") + e.what());
    }

    GodmModel m;
    try {
        apply_config_json(m.config, meta.at("config"));
        const std::size_t d = meta.at("d").get<std::size_t>();
        const int num_types = meta.at("P").get<int>();
        const bool timed = meta.at("has_time").get<bool>();
        TrainConfig shape_cfg;
        shape_cfg.hidden = meta.at("latent").get<std::size_t>();
        shape_cfg.shared_depth = meta.at("shared_depth").get<std::size_t>();
        Rng skeleton(0);
        m.vae = init_vae(skeleton, d, num_types, timed, shape_cfg);
        m.vae.time_scaler.min = meta.at("time_scaler").at("min").get<double>();
        m.vae.time_scaler.max = meta.at("time_scaler").at("max").get<double>();
        const auto& s = meta.at("schedule");
        NoiseSchedule sched;
        sched.sigma_min = s.at("sigma_min").get<double>();
        sched.sigma_max = s.at("sigma_max").get<double>();
        sched.rho = s.at("rho").get<double>();
        sched.steps = s.at("steps").get<std::size_t>();
        sched.p_mean = s.at("p_mean").get<double>();
        sched.p_std = s.at("p_std").get<double>();
        m.diffusion = init_diffusion(skeleton, shape_cfg.hidden, sched, meta.at("denoiser_hidden").get<std::size_t>());
        if (m.diffusion.net.weights.size() != meta.at("denoiser_layers").get<std::size_t>())
            throw IoError("checkpoint: unsupported denoiser depth");
        m.diffusion.net.input_scaling = meta.at("input_scaling").get<bool>();
        m.diffusion.net.skip = meta.at("skip").get<bool>();
        m.latent_scaler = LatentScaler::identity(shape_cfg.hidden);
        for (const auto& r : meta.at("vae_history"))
            m.vae_history.push_back({r.at("epoch").get<std::size_t>(), r.at("x").get<double>(), r.at("e").get<double>(),
                                     r.at("t").get<double>(), r.at("p").get<double>(), r.at("kl").get<double>(),
                                     r.at("total").get<double>()});
        m.diffusion_history = meta.at("diffusion_history").get<std::vector<double>>();
        if (meta.at("fingerprint").get<std::uint64_t>() != model_fingerprint(m))
            throw IoError("checkpoint: fingerprint does not match stored dimensions");
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("checkpoint: bad metadata: ") + e.what());
    }

    auto arrays = ckpt_detail::arrays_of(m);
    const auto& list = meta.at("arrays");
    if (list.size() != arrays.size()) throw IoError("checkpoint: array count mismatch");
    std::size_t offset = 9 + len;
    for (std::size_t k = 0; k < arrays.size(); ++k) {
        auto& a = arrays[k];
        if (list[k].at("name").get<std::string>() != a.name || list[k].at("shape").get<Shape>() != a.tensor.shape())
            throw IoError("checkpoint: array " + std::to_string(k) + " does not match '" + a.name + "'");
        auto dst = a.tensor.mutable_data();
        if (bytes.size() < offset + 8 * dst.size()) throw IoError("checkpoint: truncated array data");
        for (auto& v : dst) {
            v = std::bit_cast<double>(ckpt_detail::get_u64(p + offset));
            offset += 8;
        }
    }
    if (offset != bytes.size()) throw IoError("checkpoint: trailing bytes");
    const std::size_t w = m.latent_scaler.mean.size();
    const auto& mean = arrays[arrays.size() - 2].tensor;
    const auto& scale = arrays.back().tensor;
    m.latent_scaler.mean.assign(mean.data().begin(), mean.data().begin() + static_cast<std::ptrdiff_t>(w));
    m.latent_scaler.scale.assign(scale.data().begin(), scale.data().begin() + static_cast<std::ptrdiff_t>(w));
    return m;
}

inline void save_checkpoint(const GodmModel& m, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    const std::string bytes = serialize_checkpoint(m);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for checkpoint " + path.string());
}

inline GodmModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_checkpoint(buf.str());
}

}  // namespace godm
