#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bezierflow/coupling.hpp"
#include "bezierflow/errors.hpp"
#include "bezierflow/field.hpp"

namespace bezierflow {

// Mean of ||x1 - x0||^2 over the pairs (the convex cost c(x) = ||x||^2).
inline double transport_cost(const CouplingPair& pairs) {
    pairs.validate();
    if (pairs.size() == 0) throw UsageError("transport_cost: empty coupling");
    double total = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double* a = pairs.x0.data.row(i);
        const double* b = pairs.x1.data.row(i);
        for (std::size_t j = 0; j < pairs.dim(); ++j) {
            const double d = b[j] - a[j];
            total += d * d;
        }
    }
    return total / static_cast<double>(pairs.size());
}

// Time integral of ||finite-difference velocity - chord velocity||^2,
// averaged over particles. Zero iff every particle moves along its chord at
// constant speed.
inline double straightness(const TrajectoryRecord& traj) {
    if (traj.times.size() < 2) throw UsageError("straightness: need >= 2 time points");
    const std::size_t n = traj.particles();
    const std::size_t d = traj.dim();
    const double span = traj.times.back() - traj.times.front();
    double total = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double* first = traj.states.front().row(p);
        const double* last = traj.states.back().row(p);
        for (std::size_t s = 0; s + 1 < traj.times.size(); ++s) {
            const double dt = traj.times[s + 1] - traj.times[s];
            const double* a = traj.states[s].row(p);
            const double* b = traj.states[s + 1].row(p);
            double dev = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double fd = (b[j] - a[j]) / dt;
                const double chord = (last[j] - first[j]) / span;
                const double e = fd - chord;
                dev += e * e;
            }
            total += dt * dev;
        }
    }
    return total / static_cast<double>(n);
}

namespace detail {

// Shortest-augmenting-path assignment with dual potentials; exact and
// deterministic, O(n^3).
inline double solve_assignment(const Matrix& cost) {
    const std::size_t n = cost.rows;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
    return total;
}

} // namespace detail

// Squared 2-Wasserstein between equal-size point sets under the optimal
// one-to-one assignment (mean squared pairing cost).
inline double w2_exact(const Batch& a, const Batch& b) {
    if (a.size() != b.size() || a.dim() != b.dim())
        throw UsageError("w2_exact: batches must have equal size and dimension");
    if (a.size() == 0) throw UsageError("w2_exact: empty batches");
    if (a.size() > 2048) throw UsageError("w2_exact: n > 2048 not supported");
    const std::size_t n = a.size();
    Matrix cost(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.data.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.data.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.dim(); ++k) {
                const double d = ai[k] - bj[k];
                s += d * d;
            }
            cost(i, j) = s;
        }
    }
    return detail::solve_assignment(cost) / static_cast<double>(n);
}

namespace detail {

// Both segments strictly straddle each other's line by margin tol.
inline bool segments_cross(double ax, double ay, double bx, double by, double cx, double cy,
                           double dx, double dy, double tol) {
    const double abx = bx - ax, aby = by - ay;
    const double cdx = dx - cx, cdy = dy - cy;
    const double lab = std::sqrt(abx * abx + aby * aby);
    const double lcd = std::sqrt(cdx * cdx + cdy * cdy);
    if (lab <= tol || lcd <= tol) return false;
    const double d1 = (abx * (cy - ay) - aby * (cx - ax)) / lab;
    const double d2 = (abx * (dy - ay) - aby * (dx - ax)) / lab;
    const double d3 = (cdx * (ay - cy) - cdy * (ax - cx)) / lcd;
    const double d4 = (cdx * (by - cy) - cdy * (bx - cx)) / lcd;
    const bool straddle1 = (d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol);
    const bool straddle2 = (d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol);
    return straddle1 && straddle2;
}

} // namespace detail

// Number of particle pairs whose 2D polylines properly intersect at least
// once. Approximate discrete statistic, diagnostic only.
inline std::size_t crossing_count(const TrajectoryRecord& traj, double tol) {
    if (traj.dim() != 2) throw ShapeError("crossing_count: supports 2D trajectories only");
    if (traj.particles() < 2) throw UsageError("crossing_count: need >= 2 particles");
    const std::size_t n = traj.particles();
    const std::size_t segs = traj.times.size() - 1;

    // per-particle bounding boxes for pruning
    std::vector<double> lox(n, std::numeric_limits<double>::infinity()), loy = lox;
    std::vector<double> hix(n, -std::numeric_limits<double>::infinity()), hiy = hix;
    for (std::size_t s = 0; s <= segs; ++s) {
        for (std::size_t p = 0; p < n; ++p) {
            const double* r = traj.states[s].row(p);
            lox[p] = std::min(lox[p], r[0]);
            hix[p] = std::max(hix[p], r[0]);
            loy[p] = std::min(loy[p], r[1]);
            hiy[p] = std::max(hiy[p], r[1]);
        }
    }

    std::size_t count = 0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (lox[a] > hix[b] + tol || lox[b] > hix[a] + tol || loy[a] > hiy[b] + tol ||
                loy[b] > hiy[a] + tol)
                continue;
            bool crossed = false;
            for (std::size_t s = 0; s < segs && !crossed; ++s) {
                const double* a0 = traj.states[s].row(a);
                const double* a1 = traj.states[s + 1].row(a);
                for (std::size_t r = 0; r < segs; ++r) {
                    const double* b0 = traj.states[r].row(b);
                    const double* b1 = traj.states[r + 1].row(b);
                    if (detail::segments_cross(a0[0], a0[1], a1[0], a1[1], b0[0], b0[1], b1[0],
                                               b1[1], tol)) {
                        crossed = true;
                        break;
                    }
                }
            }
            if (crossed) ++count;
        }
    }
    return count;
}

// Mean squared distance between index-aligned points.
inline double endpoint_mse(const Batch& predicted, const Batch& reference) {
    if (predicted.size() != reference.size() || predicted.dim() != reference.dim())
        throw UsageError("endpoint_mse: batches must be aligned");
    if (predicted.size() == 0) throw UsageError("endpoint_mse: empty batches");
    double total = 0.0;
    for (std::size_t i = 0; i < predicted.data.data.size(); ++i) {
        const double d = predicted.data.data[i] - reference.data.data[i];
        total += d * d;
    }
    return total / static_cast<double>(predicted.size());
}

// One evaluated configuration: named scalars plus run metadata.
struct MetricsReport {
    std::string label;
    std::string objective;
    int reflow_level = 0;
    std::string mode; // "flow" (multi-step) or "onestep"
    std::uint64_t seed = 0;
    std::string solver;

    double transport_cost = 0.0;
    double straightness = 0.0;
    double w2_to_target = 0.0;
    double crossing_count = 0.0;
    double endpoint_mse = 0.0;

    void validate() const {
        for (double v : {transport_cost, straightness, w2_to_target, crossing_count,
                         endpoint_mse})
            if (!std::isfinite(v)) throw DomainError("MetricsReport: non-finite value");
        if (label.empty() || mode.empty() || objective.empty() || solver.empty())
            throw UsageError("MetricsReport: incomplete metadata");
    }
};

} // namespace bezierflow
