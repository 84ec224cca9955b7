#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bezierflow/errors.hpp"
#include "bezierflow/linalg.hpp"

namespace bezierflow {

// Degree-n curve over ordered control points P_0..P_n.
class BezierSpec {
public:
    static constexpr std::size_t max_degree = 20;

    explicit BezierSpec(std::vector<Vector> control_points)
        : points_(std::move(control_points)) {
        if (points_.size() < 2)
            throw UsageError("BezierSpec: need at least 2 control points (degree >= 1)");
        if (points_.size() - 1 > max_degree)
            throw UsageError("BezierSpec: degree " + std::to_string(points_.size() - 1) +
                             " exceeds cap " + std::to_string(max_degree));
        const std::size_t d = points_.front().size();
        if (d == 0) throw ShapeError("BezierSpec: zero-dimensional control point");
        for (const auto& p : points_) {
            if (p.size() != d)
                throw ShapeError("BezierSpec: control points have mixed dimensions");
            if (!all_finite(p)) throw DomainError("BezierSpec: non-finite control point");
        }
    }

    std::size_t degree() const { return points_.size() - 1; }
    std::size_t dim() const { return points_.front().size(); }
    const Vector& point(std::size_t i) const { return points_[i]; }
    const std::vector<Vector>& points() const { return points_; }

private:
    std::vector<Vector> points_;
};

namespace detail {

inline void check_curve_param(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("bezier: t=" + std::to_string(t) + " outside [0,1]");
}

// Pascal row, exact in 64-bit integers for n <= max_degree.
inline std::vector<std::uint64_t> binomial_row(std::size_t n) {
    std::vector<std::uint64_t> row(n + 1, 1);
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i; j-- > 1;) row[j] += row[j - 1];
    return row;
}

} // namespace detail

// B(t) = sum_i C(n,i) (1-t)^(n-i) t^i P_i by direct Bernstein summation.
inline Vector bernstein_eval(const BezierSpec& spec, double t) {
    detail::check_curve_param(t);
    const std::size_t n = spec.degree();
    const auto binom = detail::binomial_row(n);
    // powers accumulated incrementally: t^i ascending, (1-t)^(n-i) descending
    std::vector<double> tpow(n + 1), spow(n + 1);
    tpow[0] = 1.0;
    spow[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        tpow[i] = tpow[i - 1] * t;
        spow[i] = spow[i - 1] * (1.0 - t);
    }
    Vector out(spec.dim(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
        const double w = static_cast<double>(binom[i]) * spow[n - i] * tpow[i];
        axpy(w, spec.point(i), out);
    }
    return out;
}

// Iterated linear interpolation down to a single point.
inline Vector de_casteljau(const BezierSpec& spec, double t) {
    detail::check_curve_param(t);
    std::vector<Vector> work = spec.points();
    for (std::size_t level = work.size() - 1; level > 0; --level) {
        for (std::size_t i = 0; i < level; ++i) {
            for (std::size_t j = 0; j < work[i].size(); ++j)
                work[i][j] = (1.0 - t) * work[i][j] + t * work[i + 1][j];
        }
    }
    return work[0];
}

// dB/dt = n * sum_i C(n-1,i) (1-t)^(n-1-i) t^i (P_{i+1} - P_i).
inline Vector bezier_derivative(const BezierSpec& spec, double t) {
    detail::check_curve_param(t);
    const std::size_t n = spec.degree();
    const auto binom = detail::binomial_row(n - 1);
    std::vector<double> tpow(n), spow(n);
    tpow[0] = 1.0;
    spow[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        tpow[i] = tpow[i - 1] * t;
        spow[i] = spow[i - 1] * (1.0 - t);
    }
    Vector out(spec.dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = static_cast<double>(n) * static_cast<double>(binom[i]) *
                         spow[n - 1 - i] * tpow[i];
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += w * (spec.point(i + 1)[j] - spec.point(i)[j]);
    }
    return out;
}

namespace detail {

inline double cross2(double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
}

inline double point_segment_distance(double px, double py, double ax, double ay, double bx,
                                     double by) {
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double u = 0.0;
    if (len2 > 0.0) {
        u = ((px - ax) * dx + (py - ay) * dy) / len2;
        if (u < 0.0) u = 0.0;
        if (u > 1.0) u = 1.0;
    }
    const double cx = ax + u * dx, cy = ay + u * dy;
    const double ex = px - cx, ey = py - cy;
    return std::sqrt(ex * ex + ey * ey);
}

// Andrew monotone chain; returns hull in counterclockwise order without
// collinear interior points.
inline std::vector<std::array<double, 2>> convex_hull_2d(std::vector<std::array<double, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<std::array<double, 2>> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross2(hull[k - 1][0] - hull[k - 2][0], hull[k - 1][1] - hull[k - 2][1],
                                pts[i][0] - hull[k - 2][0], pts[i][1] - hull[k - 2][1]) <= 0.0)
            --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross2(hull[k - 1][0] - hull[k - 2][0], hull[k - 1][1] - hull[k - 2][1],
                                    pts[i][0] - hull[k - 2][0], pts[i][1] - hull[k - 2][1]) <= 0.0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace detail

// True iff q lies in the closed convex hull of points, expanded by tol. 2D only.
inline bool convex_hull_contains(const std::vector<Vector>& points, const Vector& q, double tol) {
    if (points.empty()) throw UsageError("convex_hull_contains: no points");
    if (q.size() != 2)
        throw ShapeError("convex_hull_contains: supports 2D only");
    std::vector<std::array<double, 2>> pts;
    pts.reserve(points.size());
    for (const auto& p : points) {
        if (p.size() != 2)
            throw ShapeError("convex_hull_contains: supports 2D only");
        pts.push_back({p[0], p[1]});
    }
    const auto hull = detail::convex_hull_2d(std::move(pts));
    if (hull.size() == 1) {
        const double dx = q[0] - hull[0][0], dy = q[1] - hull[0][1];
        return std::sqrt(dx * dx + dy * dy) <= tol;
    }
    if (hull.size() == 2)
        return detail::point_segment_distance(q[0], q[1], hull[0][0], hull[0][1], hull[1][0],
                                              hull[1][1]) <= tol;
    // counterclockwise hull: inside iff signed distance to every edge >= -tol
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double len = std::sqrt(ex * ex + ey * ey);
        const double signed_area = detail::cross2(ex, ey, q[0] - a[0], q[1] - a[1]);
        if (signed_area < -tol * len) return false;
    }
    return true;
}

} // namespace bezierflow
