// Test-only oracles: finite differences, quadrature, brute-force assignment.
// Everything here stays independent of the implementation paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "bezierflow/linalg.hpp"
#include "bezierflow/mlp.hpp"
#include "bezierflow/rng.hpp"

namespace oracles {

using bezierflow::Matrix;
using bezierflow::MlpParams;
using bezierflow::MlpSpec;
using bezierflow::Rng;
using bezierflow::Vector;

// Relative error with an absolute floor guarding finite-difference roundoff.
inline double rel_err(double a, double b, double floor = 1e-6) {
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    return std::abs(a - b) / scale;
}

inline double max_rel_err(const Vector& a, const Vector& b, double floor = 1e-6) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, rel_err(a[i], b[i], floor));
    return worst;
}

// Central finite difference of a scalar function of one MlpParams entry.
inline MlpParams fd_param_gradient(const std::function<double(const MlpParams&)>& f,
                                   const MlpParams& params, double h = 1e-5) {
    MlpParams grad = bezierflow::zeros_like(params);
    MlpParams probe = params;
    auto diff = [&](double& slot, double& out) {
        const double saved = slot;
        slot = saved + h;
        const double hi = f(probe);
        slot = saved - h;
        const double lo = f(probe);
        slot = saved;
        out = (hi - lo) / (2.0 * h);
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].data.size(); ++i)
            diff(probe.weights[l].data[i], grad.weights[l].data[i]);
        for (std::size_t i = 0; i < params.biases[l].size(); ++i)
            diff(probe.biases[l][i], grad.biases[l][i]);
    }
    return grad;
}

// Central finite difference of a vector function of a scalar argument.
inline Vector fd_vector_derivative(const std::function<Vector(double)>& f, double t,
                                   double h = 1e-6) {
    double lo = t - h, hi = t + h;
    if (lo < 0.0) lo = 0.0; // one-sided at the endpoints
    if (hi > 1.0) hi = 1.0;
    const Vector a = f(hi);
    const Vector b = f(lo);
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = (a[i] - b[i]) / (hi - lo);
    return d;
}

// Composite Simpson quadrature over [0,1].
inline double simpson(const std::function<double(double)>& f, std::size_t intervals = 10000) {
    if (intervals % 2) ++intervals;
    const double h = 1.0 / static_cast<double>(intervals);
    double sum = f(0.0) + f(1.0);
    for (std::size_t i = 1; i < intervals; ++i)
        sum += f(static_cast<double>(i) * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Classic RK4 on dY/dt = g(t) over [0,1]; the FTC route for path endpoints.
inline Vector rk4_time_integral(const std::function<Vector(double)>& g, std::size_t dim,
                                std::size_t steps = 1000) {
    Vector y(dim, 0.0);
    const double h = 1.0 / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * h;
        const Vector k1 = g(t);
        const Vector k2 = g(t + 0.5 * h);
        const Vector k4 = g(t + h);
        for (std::size_t j = 0; j < dim; ++j)
            y[j] += h / 6.0 * (k1[j] + 4.0 * k2[j] + k4[j]);
    }
    return y;
}

// Minimum total assignment cost by enumerating all permutations. n <= 8.
inline double brute_force_assignment(const Matrix& cost) {
    std::vector<std::size_t> perm(cost.rows);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < perm.size(); ++i) total += cost(i, perm[i]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Independent segment-intersection predicate: solve the 2x2 system for the
// intersection parameters and require both to lie strictly inside (0,1),
// with the distance margin eps converted to parameter margins.
inline bool segments_cross_oracle(double ax, double ay, double bx, double by, double cx,
                                  double cy, double dx, double dy, double eps = 1e-9) {
    const double rx = bx - ax, ry = by - ay;
    const double sx = dx - cx, sy = dy - cy;
    const double denom = rx * sy - ry * sx;
    const double lr = std::sqrt(rx * rx + ry * ry);
    const double ls = std::sqrt(sx * sx + sy * sy);
    if (lr <= eps || ls <= eps) return false;
    // |denom| = lr * ls * |sin(angle)|; the straddle margins need the
    // crossing offsets |t-0|, |1-t| etc. scaled by lr*|sin| to exceed eps
    if (std::abs(denom) <= 1e-15 * lr * ls) return false; // parallel
    const double qpx = cx - ax, qpy = cy - ay;
    const double t = (qpx * sy - qpy * sx) / denom;
    const double u = (qpx * ry - qpy * rx) / denom;
    const double sin_angle = std::abs(denom) / (lr * ls);
    const double mt = eps / (lr * sin_angle);
    const double mu = eps / (ls * sin_angle);
    return t > mt && t < 1.0 - mt && u > mu && u < 1.0 - mu;
}

// Random little MLP instances for gradient sweeps.
struct RandomMlpCase {
    MlpSpec spec;
    MlpParams params;
    bezierflow::RegressionBatch batch;
};

inline RandomMlpCase random_mlp_case(Rng& rng) {
    using bezierflow::Activation;
    using bezierflow::TimeEmbedding;
    RandomMlpCase c;
    c.spec.data_dim = 1 + rng.below(3);
    const std::size_t layers = 1 + rng.below(2);
    c.spec.hidden_sizes.clear();
    for (std::size_t l = 0; l < layers; ++l) c.spec.hidden_sizes.push_back(3 + rng.below(6));
    c.spec.activation = rng.uniform() < 0.5 ? Activation::tanh_act : Activation::relu;
    if (rng.uniform() < 0.5) {
        c.spec.time_embedding = {TimeEmbedding::Kind::append_scalar, 0};
    } else {
        c.spec.time_embedding = {TimeEmbedding::Kind::sinusoidal, 1 + rng.below(3)};
    }
    c.params = bezierflow::init_params(c.spec, rng.next_u64());
    const std::size_t n = 1 + rng.below(5);
    c.batch.x = Matrix(n, c.spec.data_dim);
    c.batch.t = Vector(n);
    c.batch.target = Matrix(n, c.spec.data_dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < c.spec.data_dim; ++j) {
            c.batch.x(i, j) = rng.uniform(-2.0, 2.0);
            c.batch.target(i, j) = rng.uniform(-2.0, 2.0);
        }
        c.batch.t[i] = rng.uniform();
    }
    return c;
}

// Scratch directory helper for io tests.
inline std::string fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("bezierflow_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

} // namespace oracles
