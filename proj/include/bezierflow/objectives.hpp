#pragma once

#include <string>
#include <vector>

#include "bezierflow/coupling.hpp"
#include "bezierflow/errors.hpp"
#include "bezierflow/field.hpp"

namespace bezierflow {

enum class ObjectiveKind { rectified_flow, distill, bezier2, bezier3 };
enum class ScaleMode { exact, paper };
enum class EvalMode { flow, onestep };
enum class GuideMode { one_step, euler_to_tau, interp_velocity, integrate_to_tau };

inline std::string to_string(ObjectiveKind k) {
    switch (k) {
    case ObjectiveKind::rectified_flow: return "rectified_flow";
    case ObjectiveKind::distill: return "distill";
    case ObjectiveKind::bezier2: return "bezier2";
    default: return "bezier3";
    }
}

inline std::string to_string(GuideMode m) {
    switch (m) {
    case GuideMode::one_step: return "one_step";
    case GuideMode::euler_to_tau: return "euler_to_tau";
    case GuideMode::interp_velocity: return "interp_velocity";
    default: return "integrate_to_tau";
    }
}

// How one guide-point batch is produced from a teacher.
struct GuideSpec {
    GuideMode mode = GuideMode::one_step;
    double tau = 0.5;
    std::size_t teacher = 0; // index into the teacher list
};

struct Objective {
    ObjectiveKind kind = ObjectiveKind::rectified_flow;
    ScaleMode scale_mode = ScaleMode::exact; // bezier2 only
    EvalMode eval_mode = EvalMode::flow;
    std::vector<GuideSpec> guides;

    std::size_t guides_needed() const {
        switch (kind) {
        case ObjectiveKind::bezier2: return 1;
        case ObjectiveKind::bezier3: return 2;
        default: return 0;
        }
    }

    void validate() const {
        if (guides.size() != guides_needed())
            throw ConfigError("Objective: " + to_string(kind) + " needs " +
                              std::to_string(guides_needed()) + " guide(s), have " +
                              std::to_string(guides.size()));
        if (kind == ObjectiveKind::bezier3 && !(guides[0].tau < guides[1].tau))
            throw ConfigError("Objective: bezier3 guide times must satisfy tau' < tau''");
    }
};

// A point on the objective's path together with the drift target there.
struct PathSample {
    Vector x;
    Vector target;
};

namespace detail {

inline void check_pair_dims(const Vector& x0, const Vector& x1) {
    if (x0.size() != x1.size())
        throw ShapeError("target: x0/x1 dimension mismatch");
    if (!all_finite(x0) || !all_finite(x1))
        throw DomainError("target: non-finite endpoint");
}

inline void check_time(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("target: t=" + std::to_string(t) + " outside [0,1]");
}

} // namespace detail

// X_t = t x1 + (1-t) x0 with constant target x1 - x0.
inline PathSample rf_target(const Vector& x0, const Vector& x1, double t) {
    detail::check_pair_dims(x0, x1);
    detail::check_time(t);
    PathSample s;
    s.x.resize(x0.size());
    s.target.resize(x0.size());
    for (std::size_t j = 0; j < x0.size(); ++j) {
        s.x[j] = t * x1[j] + (1.0 - t) * x0[j];
        s.target[j] = x1[j] - x0[j];
    }
    return s;
}

// Evaluation time pinned to t = 0; the one-step regression pair.
inline PathSample distill_target(const Vector& x0, const Vector& x1) {
    return rf_target(x0, x1, 0.0);
}

// Quadratic Bezier path through (x0, xT, x1). scale=exact yields the true
// dX_t/dt = 2[(t-1)x0 + (1-2t)xT + t x1]; scale=paper drops the factor 2.
inline PathSample bezier2_target(const Vector& x0, const Vector& x1, const Vector& xT, double t,
                                 ScaleMode scale) {
    detail::check_pair_dims(x0, x1);
    detail::check_pair_dims(x0, xT);
    detail::check_time(t);
    const double s0 = (1.0 - t) * (1.0 - t);
    const double sT = 2.0 * t * (1.0 - t);
    const double s1 = t * t;
    const double factor = scale == ScaleMode::exact ? 2.0 : 1.0;
    PathSample s;
    s.x.resize(x0.size());
    s.target.resize(x0.size());
    for (std::size_t j = 0; j < x0.size(); ++j) {
        s.x[j] = s0 * x0[j] + sT * xT[j] + s1 * x1[j];
        s.target[j] = factor * ((t - 1.0) * x0[j] + (1.0 - 2.0 * t) * xT[j] + t * x1[j]);
    }
    return s;
}

// Cubic Bezier path through (x0, xT, xT2, x1) with its exact derivative.
inline PathSample bezier3_target(const Vector& x0, const Vector& x1, const Vector& xT,
                                 const Vector& xT2, double t) {
    detail::check_pair_dims(x0, x1);
    detail::check_pair_dims(x0, xT);
    detail::check_pair_dims(x0, xT2);
    detail::check_time(t);
    const double u = 1.0 - t;
    const double c0 = u * u * u;
    const double cT = 3.0 * t * u * u;
    const double cT2 = 3.0 * t * t * u;
    const double c1 = t * t * t;
    const double d0 = 3.0 * u * u;
    const double dT = 6.0 * t * u;
    const double d1 = 3.0 * t * t;
    PathSample s;
    s.x.resize(x0.size());
    s.target.resize(x0.size());
    for (std::size_t j = 0; j < x0.size(); ++j) {
        s.x[j] = c0 * x0[j] + cT * xT[j] + cT2 * xT2[j] + c1 * x1[j];
        s.target[j] = d0 * (xT[j] - x0[j]) + dT * (xT2[j] - xT[j]) + d1 * (x1[j] - xT2[j]);
    }
    return s;
}

namespace detail {

inline void check_tau(GuideMode mode, double tau) {
    switch (mode) {
    case GuideMode::one_step:
        return; // tau unused
    case GuideMode::euler_to_tau:
    case GuideMode::interp_velocity:
        if (!(tau > 0.0 && tau < 1.0))
            throw ConfigError("guide_point: tau must be in (0,1) for mode " + to_string(mode));
        return;
    case GuideMode::integrate_to_tau:
        if (!(tau > 0.0 && tau <= 1.0))
            throw ConfigError("guide_point: tau must be in (0,1] for mode " + to_string(mode));
        return;
    }
}

} // namespace detail

// Guide-point batch X_T for a whole coupling; guides are computed once per
// coupling and frozen (teachers are never differentiated through).
inline Matrix guide_points(const VelocityField& teacher, const Matrix& x0, const Matrix& x1,
                           double tau, GuideMode mode) {
    detail::check_tau(mode, tau);
    if (x0.rows != x1.rows || x0.cols != x1.cols)
        throw UsageError("guide_points: x0/x1 not aligned");
    switch (mode) {
    case GuideMode::one_step: {
        Matrix v = velocity_batch(teacher, x0, 0.0);
        for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] += x0.data[i];
        return v;
    }
    case GuideMode::euler_to_tau: {
        Matrix v = velocity_batch(teacher, x0, 0.0);
        for (std::size_t i = 0; i < v.data.size(); ++i)
            v.data[i] = x0.data[i] + tau * v.data[i];
        return v;
    }
    case GuideMode::interp_velocity: {
        Matrix xt(x0.rows, x0.cols);
        for (std::size_t i = 0; i < xt.data.size(); ++i)
            xt.data[i] = tau * x1.data[i] + (1.0 - tau) * x0.data[i];
        Matrix v = velocity_batch(teacher, xt, tau);
        for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] += x0.data[i];
        return v;
    }
    case GuideMode::integrate_to_tau: {
        SolverSpec solver{SolverSpec::Method::rk4, 100, 0.0, tau};
        return integrate(teacher, Batch{x0, 0}, solver).endpoint();
    }
    }
    throw UsageError("guide_points: unknown mode");
}

inline Vector guide_point(const VelocityField& teacher, const Vector& x0, const Vector& x1,
                          double tau, GuideMode mode) {
    Matrix m0(1, x0.size());
    m0.set_row(0, x0);
    Matrix m1(1, x1.size());
    m1.set_row(0, x1);
    return guide_points(teacher, m0, m1, tau, mode).row_vector(0);
}

// Freeze guide-point batches for each GuideSpec. Teachers are addressed by
// the specs' teacher index, so one field can serve both cubic guides or two
// distinct fields can act as separate teachers.
inline GuidedCoupling make_guided_coupling(const CouplingPair& base,
                                           const std::vector<const VelocityField*>& teachers,
                                           const std::vector<GuideSpec>& specs) {
    base.validate();
    if (specs.empty() || specs.size() > 2)
        throw UsageError("make_guided_coupling: expected 1 or 2 guide specs");
    GuidedCoupling gc{base, {}};
    for (const auto& spec : specs) {
        if (spec.teacher >= teachers.size() || teachers[spec.teacher] == nullptr)
            throw UsageError("make_guided_coupling: guide references missing teacher index " +
                             std::to_string(spec.teacher));
        const VelocityField& teacher = *teachers[spec.teacher];
        gc.guides.push_back(Guide{
            guide_points(teacher, base.x0.data, base.x1.data, spec.tau, spec.mode),
            teacher.label, spec.tau});
    }
    gc.validate();
    return gc;
}

namespace detail {

inline void emit_row(const Objective& objective, const Vector& x0, const Vector& x1,
                     const Vector* xT, const Vector* xT2, double t, RegressionBatch& out,
                     std::size_t row) {
    PathSample s;
    switch (objective.kind) {
    case ObjectiveKind::rectified_flow:
        s = rf_target(x0, x1, t);
        break;
    case ObjectiveKind::distill:
        s = distill_target(x0, x1);
        t = 0.0;
        break;
    case ObjectiveKind::bezier2:
        s = bezier2_target(x0, x1, *xT, t, objective.scale_mode);
        break;
    case ObjectiveKind::bezier3:
        s = bezier3_target(x0, x1, *xT, *xT2, t);
        break;
    }
    if (objective.eval_mode == EvalMode::onestep && objective.kind != ObjectiveKind::distill) {
        // literal reading: regress v(X_0, 0) against the path drift at time t
        out.x.set_row(row, x0);
        out.t[row] = 0.0;
    } else {
        out.x.set_row(row, s.x);
        out.t[row] = t;
    }
    out.target.set_row(row, s.target);
}

} // namespace detail

// Turn a coupling plus per-sample time draws into a regression batch.
inline RegressionBatch assemble_batch(const Objective& objective, const CouplingPair& coupling,
                                      const std::vector<double>& t_draws) {
    objective.validate();
    if (objective.guides_needed() != 0)
        throw UsageError("assemble_batch: " + to_string(objective.kind) +
                         " needs a GuidedCoupling");
    coupling.validate();
    if (t_draws.size() != coupling.size())
        throw UsageError("assemble_batch: t_draws length != coupling size");
    RegressionBatch rb{Matrix(coupling.size(), coupling.dim()), Vector(coupling.size(), 0.0),
                       Matrix(coupling.size(), coupling.dim())};
    for (std::size_t i = 0; i < coupling.size(); ++i)
        detail::emit_row(objective, coupling.x0.data.row_vector(i),
                         coupling.x1.data.row_vector(i), nullptr, nullptr, t_draws[i], rb, i);
    return rb;
}

inline RegressionBatch assemble_batch(const Objective& objective, const GuidedCoupling& coupling,
                                      const std::vector<double>& t_draws) {
    objective.validate();
    coupling.validate();
    if (objective.guides_needed() != coupling.guides.size())
        throw UsageError("assemble_batch: objective expects " +
                         std::to_string(objective.guides_needed()) + " guide(s), coupling has " +
                         std::to_string(coupling.guides.size()));
    if (objective.guides_needed() == 0)
        throw UsageError("assemble_batch: " + to_string(objective.kind) +
                         " takes a plain CouplingPair");
    if (t_draws.size() != coupling.size())
        throw UsageError("assemble_batch: t_draws length != coupling size");
    RegressionBatch rb{Matrix(coupling.size(), coupling.dim()), Vector(coupling.size(), 0.0),
                       Matrix(coupling.size(), coupling.dim())};
    for (std::size_t i = 0; i < coupling.size(); ++i) {
        const Vector xT = coupling.guides[0].points.row_vector(i);
        Vector xT2;
        if (coupling.guides.size() > 1) xT2 = coupling.guides[1].points.row_vector(i);
        detail::emit_row(objective, coupling.base.x0.data.row_vector(i),
                         coupling.base.x1.data.row_vector(i), &xT,
                         coupling.guides.size() > 1 ? &xT2 : nullptr, t_draws[i], rb, i);
    }
    return rb;
}

} // namespace bezierflow
