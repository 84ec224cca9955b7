#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bezierflow/coupling.hpp"
#include "bezierflow/errors.hpp"
#include "bezierflow/field.hpp"
#include "bezierflow/metrics.hpp"

namespace bezierflow {

// Round-trippable decimal formatting (17 significant digits, '.' decimal).
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

inline void write_comment(std::ofstream& out, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << "\n";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw IoError("cannot parse number '" + s + "' in " + context);
    return v;
}

inline std::string coord_header(const std::string& prefix, std::size_t d, bool underscore) {
    std::string h;
    for (std::size_t j = 0; j < d; ++j) {
        if (j) h += ",";
        h += prefix + (underscore ? "_" : "") + std::to_string(j);
    }
    return h;
}

} // namespace detail

// Header x0,x1,..., one row per sample.
inline void write_batch_csv(const std::string& path, const Batch& batch,
                            const std::string& comment = "") {
    auto out = detail::open_out(path);
    detail::write_comment(out, comment);
    out << detail::coord_header("x", batch.dim(), false) << "\n";
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double* r = batch.data.row(i);
        for (std::size_t j = 0; j < batch.dim(); ++j) {
            if (j) out << ",";
            out << format_double(r[j]);
        }
        out << "\n";
    }
}

// Columns particle_id,t,x0..x{d-1}.
inline void write_trajectory_csv(const std::string& path, const TrajectoryRecord& traj,
                                 const std::string& comment = "") {
    auto out = detail::open_out(path);
    detail::write_comment(out, comment);
    out << "particle_id,t," << detail::coord_header("x", traj.dim(), false) << "\n";
    for (std::size_t p = 0; p < traj.particles(); ++p) {
        for (std::size_t s = 0; s < traj.times.size(); ++s) {
            out << p << "," << format_double(traj.times[s]);
            const double* r = traj.states[s].row(p);
            for (std::size_t j = 0; j < traj.dim(); ++j) out << "," << format_double(r[j]);
            out << "\n";
        }
    }
}

inline void write_loss_csv(const std::string& path, const std::vector<double>& losses,
                           const std::string& comment = "") {
    auto out = detail::open_out(path);
    detail::write_comment(out, comment);
    out << "step,loss\n";
    for (std::size_t i = 0; i < losses.size(); ++i)
        out << (i + 1) << "," << format_double(losses[i]) << "\n";
}

namespace detail {

inline std::string provenance_comment(const CouplingProvenance& p) {
    if (p.kind == CouplingProvenance::Kind::independent) return "provenance=independent level=0";
    return "provenance=reflow level=" + std::to_string(p.level) + " solver=" + p.solver;
}

} // namespace detail

// Columns x0_*, x1_* plus xT_*, xT2_* when guides are present; the first
// comment line records the provenance.
inline void write_coupling_csv(const std::string& path, const CouplingPair& pair,
                               const std::vector<Guide>& guides = {},
                               const std::string& comment = "") {
    auto out = detail::open_out(path);
    out << "# " << detail::provenance_comment(pair.provenance);
    for (std::size_t g = 0; g < guides.size(); ++g)
        out << " guide" << g << "=(teacher=" << guides[g].teacher_label
            << ",tau=" << format_double(guides[g].tau) << ")";
    out << "\n";
    detail::write_comment(out, comment);
    const std::size_t d = pair.dim();
    out << detail::coord_header("x0", d, true) << "," << detail::coord_header("x1", d, true);
    if (guides.size() > 0) out << "," << detail::coord_header("xT", d, true);
    if (guides.size() > 1) out << "," << detail::coord_header("xT2", d, true);
    out << "\n";
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const double* a = pair.x0.data.row(i);
        const double* b = pair.x1.data.row(i);
        for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << format_double(a[j]);
        for (std::size_t j = 0; j < d; ++j) out << "," << format_double(b[j]);
        for (const auto& g : guides) {
            const double* gp = g.points.row(i);
            for (std::size_t j = 0; j < d; ++j) out << "," << format_double(gp[j]);
        }
        out << "\n";
    }
}

inline void write_coupling_csv(const std::string& path, const GuidedCoupling& gc,
                               const std::string& comment = "") {
    write_coupling_csv(path, gc.base, gc.guides, comment);
}

// Reads back couplings written by write_coupling_csv. Guides, when present,
// come back with their tau but only the label text survives of the teacher.
inline GuidedCoupling read_coupling_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    CouplingProvenance prov;
    std::vector<std::pair<std::string, double>> guide_meta;
    // comments
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] != '#') break;
        if (line.find("provenance=reflow") != std::string::npos) {
            prov.kind = CouplingProvenance::Kind::reflow;
            const auto lp = line.find("level=");
            if (lp != std::string::npos) prov.level = std::atoi(line.c_str() + lp + 6);
            const auto sp = line.find("solver=");
            if (sp != std::string::npos) {
                auto end = line.find(' ', sp);
                prov.solver = line.substr(sp + 7, end == std::string::npos ? end : end - sp - 7);
            }
        }
        std::size_t gp = 0;
        while ((gp = line.find("teacher=", gp)) != std::string::npos) {
            const auto comma = line.find(",tau=", gp);
            if (comma == std::string::npos) break;
            const std::string teacher = line.substr(gp + 8, comma - gp - 8);
            const auto close = line.find(')', comma);
            const double tau =
                std::atof(line.substr(comma + 5, close - comma - 5).c_str());
            guide_meta.emplace_back(teacher, tau);
            gp = comma;
        }
    }
    const auto header = detail::split_csv_line(line);
    std::size_t d = 0;
    while (d < header.size() && header[d].rfind("x0_", 0) == 0) ++d;
    if (d == 0) throw IoError("coupling csv: missing x0_* columns in " + path);
    const std::size_t groups = header.size() / d;
    if (header.size() % d != 0 || groups < 2 || groups > 4)
        throw IoError("coupling csv: unexpected column layout in " + path);

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw IoError("coupling csv: row width mismatch in " + path);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(detail::parse_double(f, path));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("coupling csv: no data rows in " + path);

    const std::size_t n = rows.size();
    GuidedCoupling gc;
    gc.base.x0 = Batch{Matrix(n, d), 0};
    gc.base.x1 = Batch{Matrix(n, d), 0};
    gc.base.provenance = prov;
    for (std::size_t g = 0; g + 2 < groups; ++g) {
        const auto& meta = g < guide_meta.size() ? guide_meta[g]
                                                 : std::pair<std::string, double>{"", 0.0};
        gc.guides.push_back(Guide{Matrix(n, d), meta.first, meta.second});
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            gc.base.x0.data(i, j) = rows[i][j];
            gc.base.x1.data(i, j) = rows[i][d + j];
            for (std::size_t g = 0; g + 2 < groups; ++g)
                gc.guides[g].points(i, j) = rows[i][(2 + g) * d + j];
        }
    }
    return gc;
}

inline std::string metrics_csv_header() {
    return "label,objective,reflow_level,mode,seed,solver,transport_cost,straightness,"
           "w2_to_target,crossing_count,endpoint_mse";
}

inline std::string metrics_csv_row(const MetricsReport& r) {
    std::ostringstream out;
    out << r.label << "," << r.objective << "," << r.reflow_level << "," << r.mode << ","
        << r.seed << "," << r.solver << "," << format_double(r.transport_cost) << ","
        << format_double(r.straightness) << "," << format_double(r.w2_to_target) << ","
        << format_double(r.crossing_count) << "," << format_double(r.endpoint_mse);
    return out.str();
}

inline void write_metrics_csv(const std::string& path, const std::vector<MetricsReport>& reports,
                              const std::string& comment = "") {
    for (const auto& r : reports) r.validate();
    auto out = detail::open_out(path);
    detail::write_comment(out, comment);
    out << metrics_csv_header() << "\n";
    for (const auto& r : reports) out << metrics_csv_row(r) << "\n";
}

// Human-readable block for terminal reporting.
inline std::string metrics_text(const MetricsReport& r) {
    std::ostringstream out;
    out << r.label << " (" << r.objective << ", level " << r.reflow_level << ", " << r.mode
        << ", seed " << r.seed << ", solver " << r.solver << ")\n"
        << "  transport_cost = " << format_double(r.transport_cost) << "\n"
        << "  straightness   = " << format_double(r.straightness) << "\n"
        << "  w2_to_target   = " << format_double(r.w2_to_target) << "\n"
        << "  crossing_count = " << format_double(r.crossing_count) << "\n"
        << "  endpoint_mse   = " << format_double(r.endpoint_mse) << "\n";
    return out.str();
}

} // namespace bezierflow
