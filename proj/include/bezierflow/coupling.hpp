#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "bezierflow/datasets.hpp"
#include "bezierflow/errors.hpp"

namespace bezierflow {

// level = number of rectification passes behind the pairing:
// 0 = independent, k = simulated from the k-rectified flow.
struct CouplingProvenance {
    enum class Kind { independent, reflow };
    Kind kind = Kind::independent;
    int level = 0;
    std::string solver; // empty for independent couplings
};

// Index-aligned (X_0, X_1) pairs.
struct CouplingPair {
    Batch x0;
    Batch x1;
    CouplingProvenance provenance{};

    std::size_t size() const { return x0.size(); }
    std::size_t dim() const { return x0.dim(); }

    void validate() const {
        if (x0.size() != x1.size() || x0.dim() != x1.dim())
            throw UsageError("CouplingPair: x0 and x1 must be aligned");
        if (!all_finite(x0.data) || !all_finite(x1.data))
            throw DomainError("CouplingPair: non-finite entries");
    }
};

// One frozen guide-point batch X_T produced by a teacher field.
struct Guide {
    Matrix points; // n x d, index-aligned with the base coupling
    std::string teacher_label;
    double tau = 0.0; // guide time; 0 marks modes that do not use one
};

// (X_0, X_1, X_T[, X_T']) triples/quadruples for the Bezier objectives.
struct GuidedCoupling {
    CouplingPair base;
    std::vector<Guide> guides; // length 1 (quadratic) or 2 (cubic)

    std::size_t size() const { return base.size(); }
    std::size_t dim() const { return base.dim(); }

    void validate() const {
        base.validate();
        if (guides.empty() || guides.size() > 2)
            throw UsageError("GuidedCoupling: expected 1 or 2 guides, have " +
                             std::to_string(guides.size()));
        for (const auto& g : guides) {
            if (g.points.rows != base.size() || g.points.cols != base.dim())
                throw UsageError("GuidedCoupling: guide batch not aligned with base");
            if (!all_finite(g.points))
                throw DomainError("GuidedCoupling: non-finite guide points");
        }
    }
};

// Pairs a's samples with a seeded random permutation of b's samples.
inline CouplingPair make_independent_coupling(const Batch& a, const Batch& b,
                                              std::uint64_t seed) {
    if (a.size() != b.size() || a.dim() != b.dim())
        throw UsageError("make_independent_coupling: batch sizes/dims differ");
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng = Rng::stream(seed, stream::pairing);
    for (std::size_t i = b.size(); i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(perm[i - 1], perm[j]);
    }
    Batch shuffled{Matrix(b.size(), b.dim()), b.seed};
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double* src = b.data.row(perm[i]);
        double* dst = shuffled.data.row(i);
        for (std::size_t j = 0; j < b.dim(); ++j) dst[j] = src[j];
    }
    return CouplingPair{a, std::move(shuffled),
                        CouplingProvenance{CouplingProvenance::Kind::independent, 0, ""}};
}

} // namespace bezierflow
