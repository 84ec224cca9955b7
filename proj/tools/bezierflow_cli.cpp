// Command-line harness: train rectified flows, generate reflow couplings,
// distill one-step students (plain and Bezier-guided), evaluate, plot.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bezierflow/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rectified-flow training, reflow and Bezier-guided distillation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> teacher_paths;
    bool force = false;
    bool has_seed = false;
    std::uint64_t seed = 0;

    const std::vector<std::string> commands = {"train", "reflow", "distill",
                                               "bezier-distill", "eval", "plot"};
    const std::vector<std::string> descriptions = {
        "train a rectified flow (level 1 independent, level >= 2 from a teacher)",
        "export the coupling generated by a teacher flow as CSV",
        "train a plain one-step student (objective: distill)",
        "train a Bezier-guided student (objective: bezier2 or bezier3)",
        "evaluate weight files: transport cost, straightness, exact W2, crossings",
        "write scatter and trajectory-fan SVG figures for weight files"};

    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { has_seed = true; });
        sub->add_option("--out", out_dir, "override the config output directory");
        sub->add_option("--teacher", teacher_paths, "teacher/student weight file (repeatable)");
        sub->add_flag("--force", force, "overwrite existing outputs");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        bezierflow::ExperimentConfig cfg = bezierflow::load_config(config_path);
        if (has_seed) {
            cfg.seed = seed;
            cfg.train.seed = seed;
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        bezierflow::RunOptions opts{teacher_paths, force};
        const std::string command = app.get_subcommands().front()->get_name();
        return bezierflow::run_command(command, cfg, opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
