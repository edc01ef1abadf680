#pragma once

#include <string>
#include <type_traits>

#include <json.hpp>

#include "godm/pipeline/config.hpp"

namespace godm {

inline nlohmann::ordered_json config_to_json(const TrainConfig& c) {
    return {{"lr", c.lr},
            {"epochs", c.epochs},
            {"patience", c.patience},
            {"w_x", c.w_x},
            {"w_e", c.w_e},
            {"w_t", c.w_t},
            {"w_p", c.w_p},
            {"beta", c.beta},
            {"neg_ratio", c.neg_ratio},
            {"partition_size", c.partition_size},
            {"diffusion_steps", c.diffusion_steps},
            {"seed", c.seed},
            {"hidden", c.hidden},
            {"shared_depth", c.shared_depth},
            {"diffusion_epochs", c.diffusion_epochs},
            {"diffusion_batch", c.diffusion_batch},
            {"block_size", c.block_size},
            {"stochastic_sampler", c.stochastic_sampler},
            {"heun_sampler", c.heun_sampler},
            {"sample_types", c.sample_types},
            {"standardize_latents", c.standardize_latents},
            {"balance_diffusion", c.balance_diffusion}};
}

/// True if `key` names a TrainConfig field.
inline bool is_config_key(const std::string& key) {
    static const nlohmann::ordered_json keys = config_to_json(TrainConfig{});
    return keys.contains(key);
}

/// Overwrites the fields present in `j`; other keys are ignored.
inline void apply_config_json(TrainConfig& c, const nlohmann::json& j) {
    auto set = [&j](const char* key, auto& field) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        const bool ok = std::is_same_v<std::decay_t<decltype(field)>, bool> ? v.is_boolean() : v.is_number();
        if (!ok) throw ConfigError(std::string("config key '") + key + "' has the wrong type");
        try {
            v.get_to(field);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string("config key '") + key + "' has the wrong type");
        }
    };
    auto set_count = [&j](const char* key, std::size_t& field) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
        field = v.get<std::size_t>();
    };
    set("lr", c.lr);
    set_count("epochs", c.epochs);
    set_count("patience", c.patience);
    set("w_x", c.w_x);
    set("w_e", c.w_e);
    set("w_t", c.w_t);
    set("w_p", c.w_p);
    set("beta", c.beta);
    set_count("neg_ratio", c.neg_ratio);
    set_count("partition_size", c.partition_size);
    set_count("diffusion_steps", c.diffusion_steps);
    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigError("config key 'seed' must be a non-negative integer");
        c.seed = v.get<std::uint64_t>();
    }
    set_count("hidden", c.hidden);
    set_count("shared_depth", c.shared_depth);
    set_count("diffusion_epochs", c.diffusion_epochs);
    set_count("diffusion_batch", c.diffusion_batch);
    set_count("block_size", c.block_size);
    set("stochastic_sampler", c.stochastic_sampler);
    set("heun_sampler", c.heun_sampler);
    set("sample_types", c.sample_types);
    set("standardize_latents", c.standardize_latents);
    set("balance_diffusion", c.balance_diffusion);
}

}  // namespace godm
