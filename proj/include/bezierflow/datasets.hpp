#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bezierflow/errors.hpp"
#include "bezierflow/linalg.hpp"
#include "bezierflow/rng.hpp"

namespace bezierflow {

struct GaussianComponent {
    double weight = 0.0;
    Vector mean;
    double std = 1.0;
};

// Sampling spec for the empirical distributions pi_0 and pi_1.
struct DistSpec {
    enum class Kind { standard_gaussian, gaussian, gaussian_mixture, two_moons, checkerboard };

    Kind kind = Kind::standard_gaussian;
    std::size_t dim = 2;

    Vector mean;     // gaussian
    Vector cov_diag; // gaussian

    std::vector<GaussianComponent> components; // gaussian_mixture

    double noise_std = 0.05; // two_moons

    std::size_t cells = 4; // checkerboard, cells x cells grid
    double extent = 4.0;   // checkerboard, grid covers [-extent, extent]^2

    void validate() const {
        if (dim == 0) throw ConfigError("DistSpec: dim must be >= 1");
        switch (kind) {
        case Kind::standard_gaussian:
            break;
        case Kind::gaussian:
            if (mean.size() != dim)
                throw ConfigError("DistSpec: gaussian mean length != dim");
            if (cov_diag.size() != dim)
                throw ConfigError("DistSpec: gaussian cov_diag length != dim");
            for (double v : cov_diag)
                if (v < 0.0) throw ConfigError("DistSpec: negative covariance entry");
            break;
        case Kind::gaussian_mixture: {
            if (components.empty())
                throw ConfigError("DistSpec: gaussian_mixture needs components");
            double total = 0.0;
            for (const auto& c : components) {
                if (c.weight < 0.0) throw ConfigError("DistSpec: negative mixture weight");
                if (c.mean.size() != dim)
                    throw ConfigError("DistSpec: mixture component mean length != dim");
                if (c.std < 0.0) throw ConfigError("DistSpec: negative mixture std");
                total += c.weight;
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw ConfigError("DistSpec: mixture weights sum to " + std::to_string(total) +
                                  ", expected 1");
            break;
        }
        case Kind::two_moons:
            if (dim != 2) throw ConfigError("DistSpec: two_moons requires dim = 2");
            if (noise_std < 0.0) throw ConfigError("DistSpec: negative noise_std");
            break;
        case Kind::checkerboard:
            if (dim != 2) throw ConfigError("DistSpec: checkerboard requires dim = 2");
            if (cells == 0) throw ConfigError("DistSpec: checkerboard needs cells >= 1");
            if (extent <= 0.0) throw ConfigError("DistSpec: checkerboard extent must be > 0");
            break;
        }
    }

    // Declared bounding box; only the bounded families have one.
    bool bounded() const {
        return kind == Kind::two_moons || kind == Kind::checkerboard;
    }
    void bounding_box(Vector& lo, Vector& hi) const {
        if (kind == Kind::checkerboard) {
            lo = {-extent, -extent};
            hi = {extent, extent};
        } else if (kind == Kind::two_moons) {
            // noiseless extent of the two arcs, inflated by the 5-sigma noise clamp
            const double pad = 5.0 * noise_std;
            lo = {-1.0 - pad, -0.5 - pad};
            hi = {2.0 + pad, 1.0 + pad};
        } else {
            throw UsageError("bounding_box: distribution is unbounded");
        }
    }
};

inline DistSpec standard_gaussian(std::size_t dim) {
    DistSpec s;
    s.kind = DistSpec::Kind::standard_gaussian;
    s.dim = dim;
    return s;
}

inline DistSpec gaussian(Vector mean, Vector cov_diag) {
    DistSpec s;
    s.kind = DistSpec::Kind::gaussian;
    s.dim = mean.size();
    s.mean = std::move(mean);
    s.cov_diag = std::move(cov_diag);
    return s;
}

inline DistSpec gaussian_mixture(std::vector<GaussianComponent> components) {
    DistSpec s;
    s.kind = DistSpec::Kind::gaussian_mixture;
    s.dim = components.empty() ? 0 : components.front().mean.size();
    s.components = std::move(components);
    return s;
}

inline DistSpec two_moons(double noise_std) {
    DistSpec s;
    s.kind = DistSpec::Kind::two_moons;
    s.dim = 2;
    s.noise_std = noise_std;
    return s;
}

inline DistSpec checkerboard(std::size_t cells, double extent) {
    DistSpec s;
    s.kind = DistSpec::Kind::checkerboard;
    s.dim = 2;
    s.cells = cells;
    s.extent = extent;
    return s;
}

// n samples x d coordinates plus the seed that generated them.
struct Batch {
    Matrix data;
    std::uint64_t seed = 0;

    std::size_t size() const { return data.rows; }
    std::size_t dim() const { return data.cols; }
};

namespace detail {

inline double clamped_noise(Rng& rng, double std) {
    // clamp at 5 sigma so bounded families keep their declared box
    double z = rng.normal();
    if (z > 5.0) z = 5.0;
    if (z < -5.0) z = -5.0;
    return std * z;
}

inline void sample_row(const DistSpec& spec, Rng& rng, double* out) {
    switch (spec.kind) {
    case DistSpec::Kind::standard_gaussian:
        for (std::size_t j = 0; j < spec.dim; ++j) out[j] = rng.normal();
        break;
    case DistSpec::Kind::gaussian:
        for (std::size_t j = 0; j < spec.dim; ++j)
            out[j] = spec.mean[j] + std::sqrt(spec.cov_diag[j]) * rng.normal();
        break;
    case DistSpec::Kind::gaussian_mixture: {
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t pick = spec.components.size() - 1;
        for (std::size_t c = 0; c < spec.components.size(); ++c) {
            acc += spec.components[c].weight;
            if (u < acc) {
                pick = c;
                break;
            }
        }
        const auto& comp = spec.components[pick];
        for (std::size_t j = 0; j < spec.dim; ++j)
            out[j] = comp.mean[j] + comp.std * rng.normal();
        break;
    }
    case DistSpec::Kind::two_moons: {
        const bool upper = rng.uniform() < 0.5;
        const double theta = M_PI * rng.uniform();
        if (upper) {
            out[0] = std::cos(theta);
            out[1] = std::sin(theta);
        } else {
            out[0] = 1.0 - std::cos(theta);
            out[1] = 0.5 - std::sin(theta);
        }
        out[0] += clamped_noise(rng, spec.noise_std);
        out[1] += clamped_noise(rng, spec.noise_std);
        break;
    }
    case DistSpec::Kind::checkerboard: {
        // cells with even (i + j) carry mass
        std::vector<std::pair<std::size_t, std::size_t>> black;
        for (std::size_t i = 0; i < spec.cells; ++i)
            for (std::size_t j = 0; j < spec.cells; ++j)
                if ((i + j) % 2 == 0) black.emplace_back(i, j);
        const auto cell = black[rng.below(black.size())];
        const double side = 2.0 * spec.extent / static_cast<double>(spec.cells);
        out[0] = -spec.extent + (static_cast<double>(cell.first) + rng.uniform()) * side;
        out[1] = -spec.extent + (static_cast<double>(cell.second) + rng.uniform()) * side;
        break;
    }
    }
}

} // namespace detail

// n i.i.d. draws; identical (spec, n, seed) gives identical output.
inline Batch sample(const DistSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw UsageError("sample: n must be >= 1");
    Rng rng(seed);
    Batch batch{Matrix(n, spec.dim), seed};
    for (std::size_t i = 0; i < n; ++i) detail::sample_row(spec, rng, batch.data.row(i));
    return batch;
}

} // namespace bezierflow
