#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bezierflow/errors.hpp"
#include "bezierflow/linalg.hpp"
#include "bezierflow/rng.hpp"

namespace bezierflow {

enum class Activation { tanh_act, relu };

struct TimeEmbedding {
    enum class Kind { append_scalar, sinusoidal };
    Kind kind = Kind::append_scalar;
    std::size_t frequencies = 0; // sinusoidal only, k >= 1

    std::size_t feature_count() const {
        return kind == Kind::append_scalar ? 1 : 2 * frequencies;
    }
};

// Architecture of the drift network v: R^d x [0,1] -> R^d.
struct MlpSpec {
    std::size_t data_dim = 2;
    std::vector<std::size_t> hidden_sizes{64, 64, 64};
    Activation activation = Activation::tanh_act;
    TimeEmbedding time_embedding{};

    std::size_t input_dim() const { return data_dim + time_embedding.feature_count(); }
    std::size_t output_dim() const { return data_dim; }

    std::vector<std::size_t> layer_sizes() const {
        std::vector<std::size_t> sizes;
        sizes.push_back(input_dim());
        for (std::size_t h : hidden_sizes) sizes.push_back(h);
        sizes.push_back(output_dim());
        return sizes;
    }

    void validate() const {
        if (data_dim == 0) throw ConfigError("MlpSpec: data_dim must be >= 1");
        if (hidden_sizes.empty()) throw ConfigError("MlpSpec: hidden_sizes must be non-empty");
        for (std::size_t h : hidden_sizes)
            if (h == 0) throw ConfigError("MlpSpec: hidden layer of width 0");
        if (time_embedding.kind == TimeEmbedding::Kind::sinusoidal &&
            time_embedding.frequencies == 0)
            throw ConfigError("MlpSpec: sinusoidal embedding needs frequencies >= 1");
    }

    bool operator==(const MlpSpec&) const = default;
};

struct MlpParams {
    std::vector<Matrix> weights; // weights[l]: out x in
    std::vector<Vector> biases;

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const auto& w : weights) n += w.data.size();
        for (const auto& b : biases) n += b.size();
        return n;
    }
};

inline void check_shapes(const MlpSpec& spec, const MlpParams& params) {
    const auto sizes = spec.layer_sizes();
    const std::size_t layers = sizes.size() - 1;
    if (params.weights.size() != layers || params.biases.size() != layers)
        throw ShapeError("MlpParams: expected " + std::to_string(layers) + " layers, have " +
                         std::to_string(params.weights.size()));
    for (std::size_t l = 0; l < layers; ++l) {
        if (params.weights[l].rows != sizes[l + 1] || params.weights[l].cols != sizes[l])
            throw ShapeError("MlpParams: layer " + std::to_string(l) + " weight shape mismatch");
        if (params.biases[l].size() != sizes[l + 1])
            throw ShapeError("MlpParams: layer " + std::to_string(l) + " bias length mismatch");
    }
}

// Weights ~ N(0, 2/fan_in), biases zero.
inline MlpParams init_params(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    MlpParams params;
    const auto sizes = spec.layer_sizes();
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Matrix w(sizes[l + 1], sizes[l]);
        const double scale = std::sqrt(2.0 / static_cast<double>(sizes[l]));
        for (double& x : w.data) x = scale * rng.normal();
        params.weights.push_back(std::move(w));
        params.biases.emplace_back(sizes[l + 1], 0.0);
    }
    return params;
}

inline MlpParams zeros_like(const MlpParams& params) {
    MlpParams z;
    for (const auto& w : params.weights) z.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : params.biases) z.biases.emplace_back(b.size(), 0.0);
    return z;
}

inline Vector time_features(const MlpSpec& spec, double t) {
    if (spec.time_embedding.kind == TimeEmbedding::Kind::append_scalar) return {t};
    Vector f;
    f.reserve(2 * spec.time_embedding.frequencies);
    for (std::size_t j = 0; j < spec.time_embedding.frequencies; ++j) {
        const double w = std::ldexp(1.0, static_cast<int>(j)) * M_PI; // 2^j * pi
        f.push_back(std::sin(w * t));
        f.push_back(std::cos(w * t));
    }
    return f;
}

inline void check_input(const MlpSpec& spec, const Vector& x, double t) {
    if (x.size() != spec.data_dim)
        throw ShapeError("mlp_forward: input dimension " + std::to_string(x.size()) +
                         " != data_dim " + std::to_string(spec.data_dim));
    if (!all_finite(x) || !std::isfinite(t))
        throw DomainError("mlp_forward: non-finite input");
    if (t < 0.0 || t > 1.0)
        throw DomainError("mlp_forward: t=" + std::to_string(t) + " outside [0,1]");
}

namespace detail {

inline double activate(Activation a, double z) {
    return a == Activation::tanh_act ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// Derivative expressed through the post-activation value.
inline double activate_grad(Activation a, double activated) {
    return a == Activation::tanh_act ? 1.0 - activated * activated
                                     : (activated > 0.0 ? 1.0 : 0.0);
}

// features: n x input_dim. Returns all post-activation layers, features first.
inline std::vector<Matrix> forward_layers(const MlpSpec& spec, const MlpParams& params,
                                          const Matrix& features) {
    std::vector<Matrix> acts;
    acts.reserve(params.weights.size() + 1);
    acts.push_back(features);
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        Matrix z = matmul_abt(acts.back(), params.weights[l]);
        const Vector& b = params.biases[l];
        const bool last = l + 1 == params.weights.size();
        for (std::size_t i = 0; i < z.rows; ++i) {
            double* zi = z.row(i);
            for (std::size_t j = 0; j < z.cols; ++j) {
                zi[j] += b[j];
                if (!last) zi[j] = activate(spec.activation, zi[j]);
            }
        }
        acts.push_back(std::move(z));
    }
    return acts;
}

inline Matrix features_matrix(const MlpSpec& spec, const Matrix& x, const Vector& t) {
    Matrix f(x.rows, spec.input_dim());
    for (std::size_t i = 0; i < x.rows; ++i) {
        double* fi = f.row(i);
        const double* xi = x.row(i);
        for (std::size_t j = 0; j < spec.data_dim; ++j) fi[j] = xi[j];
        const Vector tf = time_features(spec, t[i]);
        for (std::size_t j = 0; j < tf.size(); ++j) fi[spec.data_dim + j] = tf[j];
    }
    return f;
}

} // namespace detail

// v(x, t); the last layer is linear so outputs are unbounded.
inline Vector mlp_forward(const MlpSpec& spec, const MlpParams& params, const Vector& x,
                          double t) {
    check_shapes(spec, params);
    check_input(spec, x, t);
    Matrix xm(1, spec.data_dim);
    xm.set_row(0, x);
    const auto acts = detail::forward_layers(spec, params,
                                             detail::features_matrix(spec, xm, {t}));
    return acts.back().row_vector(0);
}

// Jacobian of v(x,t) with respect to x, shape output_dim x data_dim.
// Forward-mode: one tangent pass per input coordinate.
inline Matrix input_jacobian(const MlpSpec& spec, const MlpParams& params, const Vector& x,
                             double t) {
    check_shapes(spec, params);
    check_input(spec, x, t);
    Matrix xm(1, spec.data_dim);
    xm.set_row(0, x);
    const auto acts = detail::forward_layers(spec, params,
                                             detail::features_matrix(spec, xm, {t}));

    Matrix jac(spec.output_dim(), spec.data_dim);
    for (std::size_t j = 0; j < spec.data_dim; ++j) {
        Vector tangent(spec.input_dim(), 0.0);
        tangent[j] = 1.0; // time features do not depend on x
        for (std::size_t l = 0; l < params.weights.size(); ++l) {
            const Matrix& w = params.weights[l];
            Vector next(w.rows, 0.0);
            for (std::size_t o = 0; o < w.rows; ++o) {
                const double* wo = w.row(o);
                double s = 0.0;
                for (std::size_t k = 0; k < w.cols; ++k) s += wo[k] * tangent[k];
                if (l + 1 < params.weights.size())
                    s *= detail::activate_grad(spec.activation, acts[l + 1](0, o));
                next[o] = s;
            }
            tangent = std::move(next);
        }
        for (std::size_t o = 0; o < spec.output_dim(); ++o) jac(o, j) = tangent[o];
    }
    return jac;
}

// Aligned rows of (x, t, target); the regression batch of the squared loss.
struct RegressionBatch {
    Matrix x;      // n x d
    Vector t;      // n
    Matrix target; // n x d

    std::size_t size() const { return x.rows; }
};

// Mean over the batch of ||target - v(x,t)||^2 and its exact reverse-mode
// gradient. Targets are constants: gradients flow only through v.
inline std::pair<double, MlpParams> loss_and_grad(const MlpSpec& spec, const MlpParams& params,
                                                  const RegressionBatch& batch) {
    check_shapes(spec, params);
    if (batch.size() == 0) throw UsageError("loss_and_grad: empty batch");
    if (batch.x.cols != spec.data_dim || batch.target.cols != spec.output_dim() ||
        batch.t.size() != batch.x.rows || batch.target.rows != batch.x.rows)
        throw ShapeError("loss_and_grad: batch shapes inconsistent with spec");
    for (std::size_t i = 0; i < batch.t.size(); ++i)
        if (batch.t[i] < 0.0 || batch.t[i] > 1.0)
            throw DomainError("loss_and_grad: t outside [0,1]");
    if (!all_finite(batch.x) || !all_finite(batch.target))
        throw DomainError("loss_and_grad: non-finite batch");

    const double n = static_cast<double>(batch.size());
    const auto acts = detail::forward_layers(spec, params,
                                             detail::features_matrix(spec, batch.x, batch.t));

    Matrix delta = acts.back(); // becomes dLoss/dZ of the output layer
    double loss = 0.0;
    for (std::size_t i = 0; i < delta.rows; ++i) {
        double* di = delta.row(i);
        const double* gi = batch.target.row(i);
        for (std::size_t j = 0; j < delta.cols; ++j) {
            const double r = di[j] - gi[j];
            loss += r * r;
            di[j] = 2.0 * r / n;
        }
    }
    loss /= n;

    MlpParams grads = zeros_like(params);
    for (std::size_t l = params.weights.size(); l-- > 0;) {
        grads.weights[l] = matmul_atb(delta, acts[l]); // (out x n)(n x in)
        Vector& gb = grads.biases[l];
        for (std::size_t i = 0; i < delta.rows; ++i) {
            const double* di = delta.row(i);
            for (std::size_t j = 0; j < delta.cols; ++j) gb[j] += di[j];
        }
        if (l > 0) {
            Matrix prev = matmul(delta, params.weights[l]); // n x in
            for (std::size_t i = 0; i < prev.rows; ++i) {
                double* pi = prev.row(i);
                const double* ai = acts[l].row(i);
                for (std::size_t j = 0; j < prev.cols; ++j)
                    pi[j] *= detail::activate_grad(spec.activation, ai[j]);
            }
            delta = std::move(prev);
        }
    }
    return {loss, std::move(grads)};
}

} // namespace bezierflow
