#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "bezierflow/config.hpp"
#include "bezierflow/csv.hpp"
#include "bezierflow/metrics.hpp"
#include "bezierflow/pipeline.hpp"
#include "bezierflow/svg.hpp"
#include "bezierflow/weights.hpp"

namespace bezierflow {

struct RunOptions {
    std::vector<std::string> teacher_paths; // appended after config.teachers
    bool force = false;
};

inline std::string weights_path(const std::string& out_dir, const std::string& label) {
    return out_dir + "/" + label + ".weights";
}
inline std::string loss_path(const std::string& out_dir, const std::string& label) {
    return out_dir + "/" + label + ".loss.csv";
}
inline std::string coupling_path(const std::string& out_dir, int level) {
    return out_dir + "/coupling-level" + std::to_string(level) + ".csv";
}
inline std::string metrics_path(const std::string& out_dir) { return out_dir + "/metrics.csv"; }

inline std::string rectified_flow_label(int level) {
    return std::to_string(level) + "-rectified-flow";
}

namespace detail {

inline void guard_overwrite(const std::string& path, bool force) {
    if (!force && std::filesystem::exists(path))
        throw UsageError("output already exists (use --force to overwrite): " + path);
}

inline std::string run_comment(const ExperimentConfig& cfg) {
    return "config=" + config_digest(cfg) + " seed=" + std::to_string(cfg.seed);
}

struct LoadedTeacher {
    VelocityField field;
    WeightProvenance provenance;
    std::string path;
};

inline std::vector<LoadedTeacher> load_teachers(const ExperimentConfig& cfg,
                                                const RunOptions& opts) {
    std::vector<LoadedTeacher> teachers;
    std::vector<std::string> paths = cfg.teachers;
    paths.insert(paths.end(), opts.teacher_paths.begin(), opts.teacher_paths.end());
    for (const auto& p : paths) {
        LoadedTeacher t;
        t.path = p;
        t.field = load_weights(p, &t.provenance);
        teachers.push_back(std::move(t));
    }
    return teachers;
}

inline Batch fresh_pool(const DistSpec& spec, std::size_t n, std::uint64_t seed,
                        std::uint64_t stream_id) {
    return sample(spec, n, derive_seed(seed, stream_id));
}

// Coupling for training a student or the next rectified flow: simulate the
// teacher from fresh noise.
inline CouplingPair teacher_coupling(const ExperimentConfig& cfg, const LoadedTeacher& teacher) {
    const Batch pool = fresh_pool(cfg.pi0, cfg.train_samples, cfg.seed, stream::reflow_pi0);
    return reflow_pairs(teacher.field, pool, cfg.solver, teacher.provenance.reflow_level);
}

inline void write_training_outputs(const ExperimentConfig& cfg, const TrainResult& result,
                                   const std::string& objective_name, int level,
                                   const RunOptions& opts, std::ostream& log) {
    const std::string wpath = weights_path(cfg.out_dir, result.field.label);
    const std::string lpath = loss_path(cfg.out_dir, result.field.label);
    guard_overwrite(wpath, opts.force);
    guard_overwrite(lpath, opts.force);
    WeightProvenance prov{config_digest(cfg), cfg.seed, result.loss_curve.size(),
                          objective_name, level};
    save_weights(result.field, wpath, prov);
    write_loss_csv(lpath, result.loss_curve, run_comment(cfg));
    log << "wrote " << wpath << "\n";
    log << "wrote " << lpath << "\n";
    if (!result.loss_curve.empty())
        log << result.field.label << ": first loss " << format_double(result.loss_curve.front())
            << ", last loss " << format_double(result.loss_curve.back()) << "\n";
}

inline int cmd_train(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
    if (cfg.objective.kind != ObjectiveKind::rectified_flow)
        throw ConfigError("train: objective.kind must be rectified_flow (use distill or "
                          "bezier-distill for students)");
    const int level = cfg.reflow_level;
    CouplingPair coupling;
    if (level == 1) {
        const Batch a = fresh_pool(cfg.pi0, cfg.train_samples, cfg.seed, stream::sample_pi0);
        const Batch b = fresh_pool(cfg.pi1, cfg.train_samples, cfg.seed, stream::sample_pi1);
        coupling = make_independent_coupling(a, b, cfg.seed);
    } else {
        const auto teachers = load_teachers(cfg, opts);
        if (teachers.size() != 1)
            throw UsageError("train: level " + std::to_string(level) +
                             " needs exactly one teacher weight file");
        if (teachers[0].provenance.reflow_level != level - 1)
            throw ConfigError("train: teacher is level " +
                              std::to_string(teachers[0].provenance.reflow_level) +
                              ", expected " + std::to_string(level - 1));
        coupling = teacher_coupling(cfg, teachers[0]);
    }
    const TrainResult result =
        train(cfg.train, cfg.objective, coupling, {}, rectified_flow_label(level));
    write_training_outputs(cfg, result, to_string(cfg.objective.kind), level, opts, log);
    return 0;
}

inline int cmd_reflow(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
    const auto teachers = load_teachers(cfg, opts);
    if (teachers.size() != 1) throw UsageError("reflow: needs exactly one teacher weight file");
    const CouplingPair coupling = teacher_coupling(cfg, teachers[0]);
    const std::string path = coupling_path(cfg.out_dir, coupling.provenance.level);
    guard_overwrite(path, opts.force);
    write_coupling_csv(path, coupling, {}, run_comment(cfg));
    log << "wrote " << path << "\n";
    return 0;
}

inline int cmd_distill(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
    if (cfg.objective.kind != ObjectiveKind::distill)
        throw ConfigError("distill: objective.kind must be distill");
    const auto teachers = load_teachers(cfg, opts);
    if (teachers.size() != 1) throw UsageError("distill: needs exactly one teacher weight file");
    const CouplingPair coupling = teacher_coupling(cfg, teachers[0]);
    const TrainResult result = train(cfg.train, cfg.objective, coupling, {}, "distill-student");
    write_training_outputs(cfg, result, to_string(cfg.objective.kind),
                           teachers[0].provenance.reflow_level, opts, log);
    return 0;
}

inline int cmd_bezier_distill(const ExperimentConfig& cfg, const RunOptions& opts,
                              std::ostream& log) {
    if (cfg.objective.kind != ObjectiveKind::bezier2 &&
        cfg.objective.kind != ObjectiveKind::bezier3)
        throw ConfigError("bezier-distill: objective.kind must be bezier2 or bezier3");
    const auto teachers = load_teachers(cfg, opts);
    if (teachers.empty())
        throw UsageError("bezier-distill: needs at least one teacher weight file");
    for (const auto& g : cfg.objective.guides)
        if (g.teacher >= teachers.size())
            throw ConfigError("bezier-distill: guide references teacher index " +
                              std::to_string(g.teacher) + " but only " +
                              std::to_string(teachers.size()) + " teacher(s) are loaded");
    const CouplingPair coupling = teacher_coupling(cfg, teachers[0]);
    std::vector<const VelocityField*> fields;
    fields.reserve(teachers.size());
    for (const auto& t : teachers) fields.push_back(&t.field);
    const std::string label = to_string(cfg.objective.kind) + "-student";
    const TrainResult result = train(cfg.train, cfg.objective, coupling, fields, label);
    write_training_outputs(cfg, result, to_string(cfg.objective.kind),
                           teachers[0].provenance.reflow_level, opts, log);
    return 0;
}

inline int cmd_eval(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
    const auto teachers = load_teachers(cfg, opts);
    if (teachers.empty()) throw UsageError("eval: needs at least one weight file to evaluate");
    if (cfg.eval_samples > 2048)
        throw ConfigError("eval: eval_samples > 2048 exceeds the exact-W2 cap");

    const Batch x0 = fresh_pool(cfg.pi0, cfg.eval_samples, cfg.seed, stream::eval_pi0);
    const Batch target = fresh_pool(cfg.pi1, cfg.eval_samples, cfg.seed, stream::eval_pi1);
    const bool planar = cfg.pi0.dim == 2;
    constexpr double cross_tol = 1e-9;

    SolverSpec fine = cfg.solver;
    fine.method = SolverSpec::Method::rk4;
    fine.steps = cfg.solver.steps * 4;

    std::vector<MetricsReport> reports;
    double distill_w2 = -1.0, bezier2_w2 = -1.0;
    for (const auto& t : teachers) {
        const TrajectoryRecord traj = integrate(t.field, x0, cfg.solver);
        const Batch flow_end{traj.endpoint(), x0.seed};
        const Batch fine_end{integrate(t.field, x0, fine).endpoint(), x0.seed};

        MetricsReport flow_row;
        flow_row.label = t.field.label;
        flow_row.objective = t.provenance.objective;
        flow_row.reflow_level = t.provenance.reflow_level;
        flow_row.mode = "flow";
        flow_row.seed = cfg.seed;
        flow_row.solver = cfg.solver.describe();
        flow_row.transport_cost = transport_cost(CouplingPair{x0, flow_end, {}});
        flow_row.straightness = straightness(traj);
        flow_row.crossing_count =
            planar ? static_cast<double>(crossing_count(traj, cross_tol)) : 0.0;
        flow_row.w2_to_target = w2_exact(flow_end, target);
        flow_row.endpoint_mse = endpoint_mse(flow_end, fine_end);
        reports.push_back(flow_row);

        const Batch onestep = one_step_map(t.field, x0);
        TrajectoryRecord chords;
        chords.times = {0.0, 1.0};
        chords.states = {x0.data, onestep.data};
        chords.solver = SolverSpec{SolverSpec::Method::euler, 1, 0.0, 1.0};

        MetricsReport one_row = flow_row;
        one_row.mode = "onestep";
        one_row.solver = "onestep";
        one_row.transport_cost = transport_cost(CouplingPair{x0, onestep, {}});
        one_row.straightness = straightness(chords);
        one_row.crossing_count =
            planar ? static_cast<double>(crossing_count(chords, cross_tol)) : 0.0;
        one_row.w2_to_target = w2_exact(onestep, target);
        one_row.endpoint_mse = endpoint_mse(onestep, flow_end);
        reports.push_back(one_row);

        if (t.field.label == "distill-student") distill_w2 = one_row.w2_to_target;
        if (t.field.label == "bezier2-student") bezier2_w2 = one_row.w2_to_target;
    }

    const std::string path = metrics_path(cfg.out_dir);
    guard_overwrite(path, opts.force);
    write_metrics_csv(path, reports, run_comment(cfg));
    log << "wrote " << path << "\n";
    for (const auto& r : reports) log << metrics_text(r);
    if (distill_w2 >= 0.0 && bezier2_w2 >= 0.0)
        log << "bezier2 vs plain distill (one-step w2 to target): "
            << format_double(bezier2_w2) << " vs " << format_double(distill_w2)
            << (bezier2_w2 <= distill_w2 ? " (bezier2 ahead)" : " (plain distill ahead)")
            << "\n";
    return 0;
}

inline int cmd_plot(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
    const auto teachers = load_teachers(cfg, opts);
    if (teachers.empty()) throw UsageError("plot: needs at least one weight file");
    if (cfg.pi0.dim != 2) throw ConfigError("plot: supports 2D experiments only");

    const Batch x0 = fresh_pool(cfg.pi0, cfg.eval_samples, cfg.seed, stream::eval_pi0);
    const Batch target = fresh_pool(cfg.pi1, cfg.eval_samples, cfg.seed, stream::eval_pi1);
    for (const auto& t : teachers) {
        const Batch generated = one_step_map(t.field, x0);
        const std::string scatter = cfg.out_dir + "/" + t.field.label + ".scatter.svg";
        guard_overwrite(scatter, opts.force);
        write_scatter_svg(scatter,
                          {ScatterSeries{"target", &target, "#1f77b4"},
                           ScatterSeries{"generated", &generated, "#d62728"}},
                          t.field.label);
        log << "wrote " << scatter << "\n";

        const TrajectoryRecord traj = integrate(t.field, x0, cfg.solver);
        const std::string fan = cfg.out_dir + "/" + t.field.label + ".trajectories.svg";
        guard_overwrite(fan, opts.force);
        write_trajectories_svg(fan, traj);
        log << "wrote " << fan << "\n";
    }
    return 0;
}

} // namespace detail

// Dispatch one CLI command. Throws on any failure; creates out_dir on demand.
inline int run_command(const std::string& command, const ExperimentConfig& cfg,
                       const RunOptions& opts, std::ostream& log) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    if (command == "train") return detail::cmd_train(cfg, opts, log);
    if (command == "reflow") return detail::cmd_reflow(cfg, opts, log);
    if (command == "distill") return detail::cmd_distill(cfg, opts, log);
    if (command == "bezier-distill") return detail::cmd_bezier_distill(cfg, opts, log);
    if (command == "eval") return detail::cmd_eval(cfg, opts, log);
    if (command == "plot") return detail::cmd_plot(cfg, opts, log);
    throw UsageError("unknown command: " + command);
}

} // namespace bezierflow
