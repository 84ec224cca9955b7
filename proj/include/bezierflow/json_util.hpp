#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "bezierflow/datasets.hpp"
#include "bezierflow/errors.hpp"
#include "bezierflow/field.hpp"
#include "bezierflow/mlp.hpp"
#include "bezierflow/objectives.hpp"
#include "bezierflow/pipeline.hpp"

namespace bezierflow {

using nlohmann::json;

// Wraps one JSON object level: every key must be consumed through get/take,
// and finish() rejects whatever is left, naming it.
class StrictObject {
public:
    StrictObject(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object())
            throw ConfigError("config: '" + path_ + "' must be an object");
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* v = find(key);
        if (!v) throw ConfigError("config: missing required key '" + join(key) + "'");
        return *v;
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        return convert<T>(*v, key);
    }

    template <typename T>
    T required(const std::string& key) {
        return convert<T>(require(key), key);
    }

    void finish() {
        for (const auto& item : obj_.items()) {
            if (!seen_.count(item.key()))
                throw ConfigError("config: unknown key '" + join(item.key()) + "'");
        }
    }

    std::string join(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    template <typename T>
    T convert(const json& v, const std::string& key) {
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: key '" + join(key) + "' has the wrong type");
        }
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

// ---- DistSpec ----

inline DistSpec dist_spec_from_json(const json& j, const std::string& path) {
    StrictObject o(j, path);
    const std::string kind = o.required<std::string>("kind");
    DistSpec spec;
    if (kind == "standard_gaussian") {
        spec = standard_gaussian(o.get<std::size_t>("dim", 2));
    } else if (kind == "gaussian") {
        spec = gaussian(o.required<Vector>("mean"), o.required<Vector>("cov_diag"));
        o.find("dim");
        if (j.contains("dim") && j["dim"].get<std::size_t>() != spec.dim)
            throw ConfigError("config: '" + path + ".dim' contradicts mean length");
    } else if (kind == "gaussian_mixture") {
        const json& comps = o.require("components");
        if (!comps.is_array() || comps.empty())
            throw ConfigError("config: '" + path + ".components' must be a non-empty array");
        std::vector<GaussianComponent> components;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            StrictObject c(comps[i], path + ".components[" + std::to_string(i) + "]");
            GaussianComponent gc;
            gc.weight = c.required<double>("weight");
            gc.mean = c.required<Vector>("mean");
            gc.std = c.required<double>("std");
            c.finish();
            components.push_back(std::move(gc));
        }
        spec = gaussian_mixture(std::move(components));
        o.find("dim");
        if (j.contains("dim") && j["dim"].get<std::size_t>() != spec.dim)
            throw ConfigError("config: '" + path + ".dim' contradicts component means");
    } else if (kind == "two_moons") {
        spec = two_moons(o.get<double>("noise_std", 0.05));
    } else if (kind == "checkerboard") {
        spec = checkerboard(o.get<std::size_t>("cells", 4), o.get<double>("extent", 4.0));
    } else {
        throw ConfigError("config: '" + path + ".kind' has unknown value '" + kind + "'");
    }
    o.finish();
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
    return spec;
}

inline json dist_spec_to_json(const DistSpec& s) {
    json j;
    switch (s.kind) {
    case DistSpec::Kind::standard_gaussian:
        j["kind"] = "standard_gaussian";
        j["dim"] = s.dim;
        break;
    case DistSpec::Kind::gaussian:
        j["kind"] = "gaussian";
        j["mean"] = s.mean;
        j["cov_diag"] = s.cov_diag;
        break;
    case DistSpec::Kind::gaussian_mixture: {
        j["kind"] = "gaussian_mixture";
        json comps = json::array();
        for (const auto& c : s.components)
            comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"std", c.std}});
        j["components"] = comps;
        break;
    }
    case DistSpec::Kind::two_moons:
        j["kind"] = "two_moons";
        j["noise_std"] = s.noise_std;
        break;
    case DistSpec::Kind::checkerboard:
        j["kind"] = "checkerboard";
        j["cells"] = s.cells;
        j["extent"] = s.extent;
        break;
    }
    return j;
}

// ---- MlpSpec ----

inline MlpSpec mlp_spec_from_json(const json& j, const std::string& path, std::size_t data_dim) {
    StrictObject o(j, path);
    MlpSpec spec;
    spec.data_dim = data_dim;
    spec.hidden_sizes = o.get<std::vector<std::size_t>>("hidden", {64, 64, 64});
    const std::string act = o.get<std::string>("activation", "tanh");
    if (act == "tanh")
        spec.activation = Activation::tanh_act;
    else if (act == "relu")
        spec.activation = Activation::relu;
    else
        throw ConfigError("config: '" + path + ".activation' has unknown value '" + act + "'");
    if (const json* te = o.find("time_embedding")) {
        StrictObject t(*te, path + ".time_embedding");
        const std::string kind = t.required<std::string>("kind");
        if (kind == "append_scalar") {
            spec.time_embedding = {TimeEmbedding::Kind::append_scalar, 0};
        } else if (kind == "sinusoidal") {
            spec.time_embedding = {TimeEmbedding::Kind::sinusoidal,
                                   t.get<std::size_t>("frequencies", 4)};
        } else {
            throw ConfigError("config: '" + path + ".time_embedding.kind' has unknown value '" +
                              kind + "'");
        }
        t.finish();
    }
    o.finish();
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
    return spec;
}

inline json mlp_spec_to_json(const MlpSpec& s) {
    json j;
    j["hidden"] = s.hidden_sizes;
    j["activation"] = s.activation == Activation::tanh_act ? "tanh" : "relu";
    if (s.time_embedding.kind == TimeEmbedding::Kind::append_scalar) {
        j["time_embedding"] = {{"kind", "append_scalar"}};
    } else {
        j["time_embedding"] = {{"kind", "sinusoidal"},
                               {"frequencies", s.time_embedding.frequencies}};
    }
    return j;
}

// ---- SolverSpec ----

inline SolverSpec solver_spec_from_json(const json& j, const std::string& path) {
    StrictObject o(j, path);
    SolverSpec s;
    const std::string method = o.get<std::string>("method", "rk4");
    if (method == "euler")
        s.method = SolverSpec::Method::euler;
    else if (method == "midpoint")
        s.method = SolverSpec::Method::midpoint;
    else if (method == "rk4")
        s.method = SolverSpec::Method::rk4;
    else
        throw ConfigError("config: '" + path + ".method' has unknown value '" + method + "'");
    s.steps = o.get<std::size_t>("steps", 100);
    s.t_start = o.get<double>("t_start", 0.0);
    s.t_end = o.get<double>("t_end", 1.0);
    o.finish();
    try {
        s.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
    return s;
}

inline json solver_spec_to_json(const SolverSpec& s) {
    return {{"method", s.method_name()},
            {"steps", s.steps},
            {"t_start", s.t_start},
            {"t_end", s.t_end}};
}

// ---- Objective ----

inline Objective objective_from_json(const json& j, const std::string& path) {
    StrictObject o(j, path);
    Objective obj;
    const std::string kind = o.get<std::string>("kind", "rectified_flow");
    if (kind == "rectified_flow")
        obj.kind = ObjectiveKind::rectified_flow;
    else if (kind == "distill")
        obj.kind = ObjectiveKind::distill;
    else if (kind == "bezier2")
        obj.kind = ObjectiveKind::bezier2;
    else if (kind == "bezier3")
        obj.kind = ObjectiveKind::bezier3;
    else
        throw ConfigError("config: '" + path + ".kind' has unknown value '" + kind + "'");

    const std::string scale = o.get<std::string>("scale_mode", "exact");
    if (scale == "exact")
        obj.scale_mode = ScaleMode::exact;
    else if (scale == "paper")
        obj.scale_mode = ScaleMode::paper;
    else
        throw ConfigError("config: '" + path + ".scale_mode' has unknown value '" + scale + "'");

    const std::string eval = o.get<std::string>("eval_mode", "flow");
    if (eval == "flow")
        obj.eval_mode = EvalMode::flow;
    else if (eval == "onestep")
        obj.eval_mode = EvalMode::onestep;
    else
        throw ConfigError("config: '" + path + ".eval_mode' has unknown value '" + eval + "'");

    if (const json* guides = o.find("guides")) {
        if (!guides->is_array())
            throw ConfigError("config: '" + path + ".guides' must be an array");
        for (std::size_t i = 0; i < guides->size(); ++i) {
            StrictObject g((*guides)[i], path + ".guides[" + std::to_string(i) + "]");
            GuideSpec gs;
            const std::string mode = g.get<std::string>("mode", "one_step");
            if (mode == "one_step")
                gs.mode = GuideMode::one_step;
            else if (mode == "euler_to_tau")
                gs.mode = GuideMode::euler_to_tau;
            else if (mode == "interp_velocity")
                gs.mode = GuideMode::interp_velocity;
            else if (mode == "integrate_to_tau")
                gs.mode = GuideMode::integrate_to_tau;
            else
                throw ConfigError("config: '" + path + ".guides[" + std::to_string(i) +
                                  "].mode' has unknown value '" + mode + "'");
            gs.tau = g.get<double>("tau", 0.5);
            gs.teacher = g.get<std::size_t>("teacher", 0);
            g.finish();
            obj.guides.push_back(gs);
        }
    } else {
        // documented defaults: one_step guide for bezier2, interp_velocity
        // at (1/3, 2/3) for bezier3
        if (obj.kind == ObjectiveKind::bezier2) {
            obj.guides = {GuideSpec{GuideMode::one_step, 0.5, 0}};
        } else if (obj.kind == ObjectiveKind::bezier3) {
            obj.guides = {GuideSpec{GuideMode::interp_velocity, 1.0 / 3.0, 0},
                          GuideSpec{GuideMode::interp_velocity, 2.0 / 3.0, 0}};
        }
    }
    o.finish();
    try {
        obj.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
    return obj;
}

inline json objective_to_json(const Objective& o) {
    json j;
    j["kind"] = to_string(o.kind);
    j["scale_mode"] = o.scale_mode == ScaleMode::exact ? "exact" : "paper";
    j["eval_mode"] = o.eval_mode == EvalMode::flow ? "flow" : "onestep";
    json guides = json::array();
    for (const auto& g : o.guides)
        guides.push_back({{"mode", to_string(g.mode)}, {"tau", g.tau}, {"teacher", g.teacher}});
    j["guides"] = guides;
    return j;
}

// ---- TrainConfig (mlp handled separately) ----

inline TrainConfig train_config_from_json(const json& j, const std::string& path) {
    StrictObject o(j, path);
    TrainConfig c;
    c.lr = o.get<double>("lr", 1e-3);
    c.beta1 = o.get<double>("beta1", 0.9);
    c.beta2 = o.get<double>("beta2", 0.999);
    c.epsilon = o.get<double>("epsilon", 1e-8);
    c.batch_size = o.get<std::size_t>("batch_size", 256);
    c.total_steps = o.get<std::size_t>("total_steps", 5000);
    if (const json* ts = o.find("t_sampling")) {
        StrictObject t(*ts, path + ".t_sampling");
        const std::string kind = t.required<std::string>("kind");
        if (kind == "uniform") {
            c.t_sampling = {TSampling::Kind::uniform, 1};
        } else if (kind == "stratified") {
            c.t_sampling = {TSampling::Kind::stratified, t.get<std::size_t>("bins", 8)};
        } else {
            throw ConfigError("config: '" + path + ".t_sampling.kind' has unknown value '" +
                              kind + "'");
        }
        t.finish();
    }
    o.finish();
    return c;
}

inline json train_config_to_json(const TrainConfig& c) {
    json j;
    j["lr"] = c.lr;
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
    j["epsilon"] = c.epsilon;
    j["batch_size"] = c.batch_size;
    j["total_steps"] = c.total_steps;
    if (c.t_sampling.kind == TSampling::Kind::uniform) {
        j["t_sampling"] = {{"kind", "uniform"}};
    } else {
        j["t_sampling"] = {{"kind", "stratified"}, {"bins", c.t_sampling.bins}};
    }
    return j;
}

} // namespace bezierflow
