#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bezierflow/adam.hpp"
#include "bezierflow/coupling.hpp"
#include "bezierflow/errors.hpp"
#include "bezierflow/field.hpp"
#include "bezierflow/objectives.hpp"

namespace bezierflow {

struct TSampling {
    enum class Kind { uniform, stratified };
    Kind kind = Kind::uniform;
    std::size_t bins = 1; // stratified only
};

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 256;
    std::size_t total_steps = 5000;
    TSampling t_sampling{};
    std::uint64_t seed = 0;
    MlpSpec mlp{};

    void validate() const {
        if (lr <= 0.0) throw ConfigError("TrainConfig: lr must be > 0");
        if (batch_size == 0) throw ConfigError("TrainConfig: batch_size must be >= 1");
        if (t_sampling.kind == TSampling::Kind::stratified && t_sampling.bins == 0)
            throw ConfigError("TrainConfig: stratified sampling needs bins >= 1");
        mlp.validate();
    }
};

// Simulate the teacher from fresh noise to produce the next coupling:
// x1 = flow endpoint, provenance records the teacher's level and the solver.
inline CouplingPair reflow_pairs(const VelocityField& teacher, const Batch& pi0,
                                 const SolverSpec& solver, int level) {
    if (!(solver.t_start == 0.0 && solver.t_end == 1.0))
        throw UsageError("reflow_pairs: solver must span [0,1]");
    const TrajectoryRecord traj = integrate(teacher, pi0, solver);
    CouplingPair pair{pi0, Batch{traj.endpoint(), pi0.seed},
                      CouplingProvenance{CouplingProvenance::Kind::reflow, level,
                                         solver.describe()}};
    pair.validate();
    return pair;
}

struct TrainResult {
    VelocityField field;
    std::vector<double> loss_curve; // one entry per optimizer step
};

namespace detail {

inline Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), src.cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double* s = src.row(idx[i]);
        double* d = out.row(i);
        for (std::size_t j = 0; j < src.cols; ++j) d[j] = s[j];
    }
    return out;
}

inline std::vector<double> draw_times(Rng& rng, const TSampling& ts, std::size_t n) {
    std::vector<double> t(n);
    if (ts.kind == TSampling::Kind::uniform) {
        for (auto& v : t) v = rng.uniform();
    } else {
        const double bins = static_cast<double>(ts.bins);
        for (std::size_t i = 0; i < n; ++i) {
            const double bin = static_cast<double>(i % ts.bins);
            t[i] = (bin + rng.uniform()) / bins;
        }
    }
    return t;
}

inline TrainResult train_loop(const TrainConfig& config, const Objective& objective,
                              const CouplingPair& base, const std::vector<Guide>& guides,
                              const std::string& label) {
    config.validate();
    base.validate();
    if (config.mlp.data_dim != base.dim())
        throw ShapeError("train: mlp data_dim != coupling dim");

    VelocityField field{config.mlp,
                        init_params(config.mlp, derive_seed(config.seed, stream::init)), label};
    AdamState adam = make_adam_state(
        field.params, AdamConfig{config.lr, config.beta1, config.beta2, config.epsilon});
    Rng batch_rng = Rng::stream(config.seed, stream::minibatch);
    Rng time_rng = Rng::stream(config.seed, stream::time_draws);

    TrainResult result{std::move(field), {}};
    result.loss_curve.reserve(config.total_steps);
    const std::size_t n = base.size();
    std::vector<std::size_t> idx(config.batch_size);

    for (std::size_t step = 1; step <= config.total_steps; ++step) {
        for (auto& i : idx) i = static_cast<std::size_t>(batch_rng.below(n));
        const auto t_draws = draw_times(time_rng, config.t_sampling, config.batch_size);

        CouplingPair mb{Batch{gather_rows(base.x0.data, idx), base.x0.seed},
                        Batch{gather_rows(base.x1.data, idx), base.x1.seed}, base.provenance};
        RegressionBatch rb;
        if (guides.empty()) {
            rb = assemble_batch(objective, mb, t_draws);
        } else {
            GuidedCoupling gmb{std::move(mb), {}};
            for (const auto& g : guides)
                gmb.guides.push_back(Guide{gather_rows(g.points, idx), g.teacher_label, g.tau});
            rb = assemble_batch(objective, gmb, t_draws);
        }

        auto [loss, grads] = loss_and_grad(result.field.spec, result.field.params, rb);
        if (!std::isfinite(loss))
            throw DivergedError("train: non-finite loss at step " + std::to_string(step));
        std::tie(result.field.params, adam) =
            adam_step(std::move(result.field.params), grads, std::move(adam));
        result.loss_curve.push_back(loss);
    }
    return result;
}

} // namespace detail

// Minibatch Adam on a guided coupling (bezier objectives). Deterministic per
// seed: init, minibatch and time-draw streams all derive from config.seed.
inline TrainResult train(const TrainConfig& config, const Objective& objective,
                         const GuidedCoupling& data, const std::string& label) {
    objective.validate();
    data.validate();
    if (objective.guides_needed() != data.guides.size())
        throw UsageError("train: objective/coupling guide count mismatch");
    return detail::train_loop(config, objective, data.base, data.guides, label);
}

// Plain-coupling entry point; teachers are required exactly when the
// objective needs guides, and the guide batches are frozen up front.
inline TrainResult train(const TrainConfig& config, const Objective& objective,
                         const CouplingPair& data,
                         const std::vector<const VelocityField*>& teachers,
                         const std::string& label) {
    objective.validate();
    if (objective.guides_needed() == 0) {
        if (!teachers.empty())
            throw UsageError("train: " + to_string(objective.kind) + " takes no teachers");
        return detail::train_loop(config, objective, data, {}, label);
    }
    if (teachers.empty())
        throw UsageError("train: " + to_string(objective.kind) + " needs teacher field(s)");
    return train(config, objective, make_guided_coupling(data, teachers, objective.guides), label);
}

} // namespace bezierflow
