#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "bezierflow/json_util.hpp"

namespace bezierflow {

// Fully validated experiment description; the reproducibility unit.
struct ExperimentConfig {
    std::uint64_t seed = 7;
    std::string out_dir = "out";
    DistSpec pi0 = standard_gaussian(2);
    DistSpec pi1;
    std::size_t train_samples = 2048;
    std::size_t eval_samples = 256;
    MlpSpec mlp{};
    TrainConfig train{};
    Objective objective{};
    SolverSpec solver{};
    int reflow_level = 1;
    std::vector<std::string> teachers;

    ExperimentConfig() {
        // default experiment: standard Gaussian to a 4-mode mixture on a
        // square of side 6, std 0.4
        std::vector<GaussianComponent> comps;
        for (const double sx : {-3.0, 3.0})
            for (const double sy : {-3.0, 3.0})
                comps.push_back(GaussianComponent{0.25, {sx, sy}, 0.4});
        pi1 = gaussian_mixture(std::move(comps));
        mlp.data_dim = 2;
        train.mlp = mlp;
    }

    void validate() const {
        pi0.validate();
        pi1.validate();
        if (pi0.dim != pi1.dim) throw ConfigError("config: pi0 and pi1 dims differ");
        if (train_samples == 0) throw ConfigError("config: data.train_samples must be >= 1");
        if (eval_samples == 0) throw ConfigError("config: data.eval_samples must be >= 1");
        if (mlp.data_dim != pi0.dim)
            throw ConfigError("config: mlp data_dim inconsistent with datasets");
        train.validate();
        objective.validate();
        solver.validate();
        if (reflow_level < 1) throw ConfigError("config: reflow_level must be >= 1");
    }
};

inline ExperimentConfig config_from_json(const json& root) {
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    StrictObject o(root, "");
    ExperimentConfig cfg;
    cfg.seed = o.get<std::uint64_t>("seed", cfg.seed);
    cfg.out_dir = o.get<std::string>("out_dir", cfg.out_dir);
    if (const json* data = o.find("data")) {
        StrictObject d(*data, "data");
        if (const json* p0 = d.find("pi0")) cfg.pi0 = dist_spec_from_json(*p0, "data.pi0");
        if (const json* p1 = d.find("pi1")) cfg.pi1 = dist_spec_from_json(*p1, "data.pi1");
        cfg.train_samples = d.get<std::size_t>("train_samples", cfg.train_samples);
        cfg.eval_samples = d.get<std::size_t>("eval_samples", cfg.eval_samples);
        d.finish();
    }
    if (const json* mlp = o.find("mlp"))
        cfg.mlp = mlp_spec_from_json(*mlp, "mlp", cfg.pi0.dim);
    else
        cfg.mlp.data_dim = cfg.pi0.dim;
    if (const json* train = o.find("train")) cfg.train = train_config_from_json(*train, "train");
    cfg.train.mlp = cfg.mlp;
    cfg.train.seed = cfg.seed;
    if (const json* obj = o.find("objective"))
        cfg.objective = objective_from_json(*obj, "objective");
    if (const json* solver = o.find("solver"))
        cfg.solver = solver_spec_from_json(*solver, "solver");
    cfg.reflow_level = o.get<int>("reflow_level", cfg.reflow_level);
    cfg.teachers = o.get<std::vector<std::string>>("teachers", {});
    o.finish();
    cfg.validate();
    return cfg;
}

// Parses and fully validates; unknown keys are rejected by name.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ConfigError("config: parse failure in " + path + ": " + e.what());
    }
    return config_from_json(root);
}

// Canonical JSON image of the fully defaulted config (keys sorted by
// nlohmann); the digest is computed over its dump.
inline json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["data"] = {{"pi0", dist_spec_to_json(cfg.pi0)},
                 {"pi1", dist_spec_to_json(cfg.pi1)},
                 {"train_samples", cfg.train_samples},
                 {"eval_samples", cfg.eval_samples}};
    j["mlp"] = mlp_spec_to_json(cfg.mlp);
    j["train"] = train_config_to_json(cfg.train);
    j["objective"] = objective_to_json(cfg.objective);
    j["solver"] = solver_spec_to_json(cfg.solver);
    j["reflow_level"] = cfg.reflow_level;
    j["teachers"] = cfg.teachers;
    return j;
}

// FNV-1a 64 over the canonical dump, as 16 hex digits.
inline std::string config_digest(const ExperimentConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace bezierflow
