#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "bezierflow/errors.hpp"
#include "bezierflow/mlp.hpp"

namespace bezierflow {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    MlpParams m; // first moment
    MlpParams v; // second moment
    std::int64_t step = 0;
    AdamConfig config{};
};

inline AdamState make_adam_state(const MlpParams& params, AdamConfig config = {}) {
    return AdamState{zeros_like(params), zeros_like(params), 0, config};
}

namespace detail {

inline void adam_update_span(double* theta, double* m, double* v, const double* g,
                             std::size_t n, const AdamConfig& c, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        theta[i] -= c.lr * mhat / (std::sqrt(vhat) + c.epsilon);
    }
}

} // namespace detail

// Standard Adam with bias correction; returns updated params and state.
inline std::pair<MlpParams, AdamState> adam_step(MlpParams params, const MlpParams& grads,
                                                 AdamState state) {
    if (grads.weights.size() != params.weights.size() ||
        grads.biases.size() != params.biases.size())
        throw ShapeError("adam_step: gradient layer count mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.config.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        Matrix& w = params.weights[l];
        const Matrix& gw = grads.weights[l];
        if (gw.rows != w.rows || gw.cols != w.cols)
            throw ShapeError("adam_step: weight gradient shape mismatch at layer " +
                             std::to_string(l));
        detail::adam_update_span(w.data.data(), state.m.weights[l].data.data(),
                                 state.v.weights[l].data.data(), gw.data.data(),
                                 w.data.size(), state.config, bc1, bc2);
        Vector& b = params.biases[l];
        const Vector& gb = grads.biases[l];
        if (gb.size() != b.size())
            throw ShapeError("adam_step: bias gradient shape mismatch at layer " +
                             std::to_string(l));
        detail::adam_update_span(b.data(), state.m.biases[l].data(),
                                 state.v.biases[l].data(), gb.data(), b.size(),
                                 state.config, bc1, bc2);
    }
    return {std::move(params), std::move(state)};
}

} // namespace bezierflow
