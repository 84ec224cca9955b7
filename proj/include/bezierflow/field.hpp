#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bezierflow/datasets.hpp"
#include "bezierflow/errors.hpp"
#include "bezierflow/mlp.hpp"

namespace bezierflow {

// A trainable drift v(x, t); serves as both student and teacher.
struct VelocityField {
    MlpSpec spec;
    MlpParams params;
    std::string label;
};

struct SolverSpec {
    enum class Method { euler, midpoint, rk4 };

    Method method = Method::rk4;
    std::size_t steps = 100;
    double t_start = 0.0;
    double t_end = 1.0;

    void validate() const {
        if (steps == 0) throw ConfigError("SolverSpec: steps must be >= 1");
        if (!(t_start >= 0.0 && t_end <= 1.0 && t_start < t_end))
            throw ConfigError("SolverSpec: need 0 <= t_start < t_end <= 1");
    }

    std::string method_name() const {
        switch (method) {
        case Method::euler: return "euler";
        case Method::midpoint: return "midpoint";
        default: return "rk4";
        }
    }

    std::string describe() const {
        return method_name() + "/" + std::to_string(steps) + "@[" + std::to_string(t_start) +
               "," + std::to_string(t_end) + "]";
    }
};

// Time grid plus per-particle states from fixed-step integration.
struct TrajectoryRecord {
    std::vector<double> times;  // steps + 1 values
    std::vector<Matrix> states; // steps + 1 entries of n x d
    SolverSpec solver{};

    std::size_t particles() const { return states.empty() ? 0 : states.front().rows; }
    std::size_t dim() const { return states.empty() ? 0 : states.front().cols; }
    const Matrix& endpoint() const { return states.back(); }
};

inline Vector velocity(const VelocityField& field, const Vector& x, double t) {
    return mlp_forward(field.spec, field.params, x, t);
}

// One forward pass for a whole batch at a shared time.
inline Matrix velocity_batch(const VelocityField& field, const Matrix& xs, double t) {
    check_shapes(field.spec, field.params);
    if (xs.cols != field.spec.data_dim)
        throw ShapeError("velocity_batch: dimension " + std::to_string(xs.cols) +
                         " != data_dim " + std::to_string(field.spec.data_dim));
    if (t < 0.0 || t > 1.0)
        throw DomainError("velocity_batch: t outside [0,1]");
    Vector tcol(xs.rows, t);
    const auto acts = detail::forward_layers(
        field.spec, field.params, detail::features_matrix(field.spec, xs, tcol));
    return acts.back();
}

namespace detail {

inline void add_scaled(Matrix& x, double h, const Matrix& k, Matrix& out) {
    for (std::size_t i = 0; i < x.data.size(); ++i) out.data[i] = x.data[i] + h * k.data[i];
}

} // namespace detail

// Fixed-step explicit integration of dX/dt = v(X, t) over the solver span,
// recording every intermediate state.
inline TrajectoryRecord integrate(const VelocityField& field, const Batch& x0,
                                  const SolverSpec& solver) {
    solver.validate();
    if (!all_finite(x0.data)) throw DomainError("integrate: non-finite initial batch");

    const std::size_t steps = solver.steps;
    const double span = solver.t_end - solver.t_start;
    TrajectoryRecord record;
    record.solver = solver;
    record.times.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        record.times.push_back(solver.t_start +
                               span * static_cast<double>(i) / static_cast<double>(steps));

    Matrix x = x0.data;
    record.states.reserve(steps + 1);
    record.states.push_back(x);
    const double h = span / static_cast<double>(steps);
    Matrix scratch(x.rows, x.cols);

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = record.times[i];
        switch (solver.method) {
        case SolverSpec::Method::euler: {
            const Matrix k1 = velocity_batch(field, x, t);
            for (std::size_t j = 0; j < x.data.size(); ++j) x.data[j] += h * k1.data[j];
            break;
        }
        case SolverSpec::Method::midpoint: {
            const Matrix k1 = velocity_batch(field, x, t);
            detail::add_scaled(x, 0.5 * h, k1, scratch);
            const Matrix k2 = velocity_batch(field, scratch, t + 0.5 * h);
            for (std::size_t j = 0; j < x.data.size(); ++j) x.data[j] += h * k2.data[j];
            break;
        }
        case SolverSpec::Method::rk4: {
            const Matrix k1 = velocity_batch(field, x, t);
            detail::add_scaled(x, 0.5 * h, k1, scratch);
            const Matrix k2 = velocity_batch(field, scratch, t + 0.5 * h);
            detail::add_scaled(x, 0.5 * h, k2, scratch);
            const Matrix k3 = velocity_batch(field, scratch, t + 0.5 * h);
            detail::add_scaled(x, h, k3, scratch);
            const Matrix k4 = velocity_batch(field, scratch, record.times[i + 1]);
            const double h6 = h / 6.0;
            for (std::size_t j = 0; j < x.data.size(); ++j)
                x.data[j] += h6 * (k1.data[j] + 2.0 * k2.data[j] + 2.0 * k3.data[j] + k4.data[j]);
            break;
        }
        }
        if (!all_finite(x))
            throw DivergedError("integrate: non-finite state at step " + std::to_string(i + 1) +
                                " of " + std::to_string(steps));
        record.states.push_back(x);
    }
    return record;
}

// T(X_0) = X_0 + v(X_0, 0); equals one Euler step over [0,1].
inline Batch one_step_map(const VelocityField& field, const Batch& x0) {
    if (!all_finite(x0.data)) throw DomainError("one_step_map: non-finite batch");
    const Matrix v = velocity_batch(field, x0.data, 0.0);
    Batch out{Matrix(x0.size(), x0.dim()), x0.seed};
    for (std::size_t i = 0; i < out.data.data.size(); ++i)
        out.data.data[i] = x0.data.data[i] + 1.0 * v.data[i];
    return out;
}

} // namespace bezierflow
