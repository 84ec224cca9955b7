#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "bezierflow/datasets.hpp"
#include "bezierflow/errors.hpp"
#include "bezierflow/field.hpp"

namespace bezierflow {

struct ScatterSeries {
    std::string label;
    const Batch* batch = nullptr;
    std::string color = "#1f77b4";
};

namespace detail {

struct ViewBox {
    double lox = 0, loy = 0, w = 1, h = 1;
};

inline ViewBox fit_view(double lox, double loy, double hix, double hiy) {
    const double pad = 0.05 * std::max({hix - lox, hiy - loy, 1e-9});
    ViewBox v;
    v.lox = lox - pad;
    v.loy = loy - pad;
    v.w = (hix - lox) + 2 * pad;
    v.h = (hiy - loy) + 2 * pad;
    return v;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// y flipped so larger values plot upward
inline double flip_y(const ViewBox& v, double y) { return v.loy + v.h - (y - v.loy); }

inline std::string time_color(double u) {
    // blue (t=0) to red (t=1)
    const int r = static_cast<int>(40 + 215 * u);
    const int g = static_cast<int>(60 + 40 * (1.0 - u));
    const int b = static_cast<int>(255 - 215 * u);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace detail

// Scatter of one or more 2D point batches.
inline void write_scatter_svg(const std::string& path, const std::vector<ScatterSeries>& series,
                              const std::string& title = "") {
    if (series.empty()) throw UsageError("write_scatter_svg: no series");
    double lox = 1e300, loy = 1e300, hix = -1e300, hiy = -1e300;
    for (const auto& s : series) {
        if (!s.batch || s.batch->dim() != 2)
            throw ShapeError("write_scatter_svg: series must be 2D batches");
        for (std::size_t i = 0; i < s.batch->size(); ++i) {
            const double* r = s.batch->data.row(i);
            lox = std::min(lox, r[0]);
            hix = std::max(hix, r[0]);
            loy = std::min(loy, r[1]);
            hiy = std::max(hiy, r[1]);
        }
    }
    const auto v = detail::fit_view(lox, loy, hix, hiy);
    const double radius = 0.006 * std::max(v.w, v.h);

    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << detail::fmt(v.lox) << " "
        << detail::fmt(v.loy) << " " << detail::fmt(v.w) << " " << detail::fmt(v.h)
        << "\" width=\"640\" height=\"640\">\n";
    out << "<rect x=\"" << detail::fmt(v.lox) << "\" y=\"" << detail::fmt(v.loy) << "\" width=\""
        << detail::fmt(v.w) << "\" height=\"" << detail::fmt(v.h) << "\" fill=\"white\"/>\n";
    if (!title.empty())
        out << "<title>" << title << "</title>\n";
    for (const auto& s : series) {
        out << "<g fill=\"" << s.color << "\" fill-opacity=\"0.6\">\n";
        out << "<title>" << s.label << "</title>\n";
        for (std::size_t i = 0; i < s.batch->size(); ++i) {
            const double* r = s.batch->data.row(i);
            out << "<circle cx=\"" << detail::fmt(r[0]) << "\" cy=\""
                << detail::fmt(detail::flip_y(v, r[1])) << "\" r=\"" << detail::fmt(radius)
                << "\"/>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failure: " + path);
}

// Trajectory fan: one polyline per particle, segments colored by time.
inline void write_trajectories_svg(const std::string& path, const TrajectoryRecord& traj,
                                   std::size_t max_particles = 200) {
    if (traj.dim() != 2) throw ShapeError("write_trajectories_svg: 2D trajectories only");
    const std::size_t n = std::min(traj.particles(), max_particles);
    if (n == 0) throw UsageError("write_trajectories_svg: empty trajectory");

    double lox = 1e300, loy = 1e300, hix = -1e300, hiy = -1e300;
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        for (std::size_t p = 0; p < n; ++p) {
            const double* r = traj.states[s].row(p);
            lox = std::min(lox, r[0]);
            hix = std::max(hix, r[0]);
            loy = std::min(loy, r[1]);
            hiy = std::max(hiy, r[1]);
        }
    }
    const auto v = detail::fit_view(lox, loy, hix, hiy);
    const double width = 0.0015 * std::max(v.w, v.h);
    const double t0 = traj.times.front();
    const double span = traj.times.back() - t0;

    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << detail::fmt(v.lox) << " "
        << detail::fmt(v.loy) << " " << detail::fmt(v.w) << " " << detail::fmt(v.h)
        << "\" width=\"640\" height=\"640\">\n";
    out << "<rect x=\"" << detail::fmt(v.lox) << "\" y=\"" << detail::fmt(v.loy) << "\" width=\""
        << detail::fmt(v.w) << "\" height=\"" << detail::fmt(v.h) << "\" fill=\"white\"/>\n";
    out << "<g stroke-width=\"" << detail::fmt(width) << "\" stroke-linecap=\"round\" fill=\"none\">\n";
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t s = 0; s + 1 < traj.times.size(); ++s) {
            const double* a = traj.states[s].row(p);
            const double* b = traj.states[s + 1].row(p);
            const double u = (0.5 * (traj.times[s] + traj.times[s + 1]) - t0) / span;
            out << "<line x1=\"" << detail::fmt(a[0]) << "\" y1=\""
                << detail::fmt(detail::flip_y(v, a[1])) << "\" x2=\"" << detail::fmt(b[0])
                << "\" y2=\"" << detail::fmt(detail::flip_y(v, b[1])) << "\" stroke=\""
                << detail::time_color(u) << "\"/>\n";
        }
    }
    out << "</g>\n";
    out << "</svg>\n";
    if (!out) throw IoError("write failure: " + path);
}

} // namespace bezierflow
