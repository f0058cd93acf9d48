#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "clqg/experiments.hpp"
#include "clqg/version.hpp"

// clqg <experiment> [--config FILE] [--seed S] [--replicas R] [--out DIR]
// exit codes: 0 ok, 1 config error, 2 runtime error.

int main(int argc, char** argv) {
    CLI::App app{std::string(clqg::version_string) +
                 " - critical-chaos simulation laboratory"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments{
        "green-check", "field-stats", "max-tail",  "near-extremal",
        "ball-decay",  "spine",       "motoo",     "bridge-limit",
        "dichotomy",   "hausdorff-fixture",        "conditioned-ballot"};

    std::string config_path, out_dir;
    std::string seed_override, replicas_override, threads_override;
    for (const auto& name : experiments) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", seed_override, "master seed override");
        sub->add_option("--replicas", replicas_override, "replica count override");
        sub->add_option("--threads", threads_override, "worker thread override");
        sub->add_option("--out", out_dir, "output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string experiment = app.get_subcommands().front()->get_name();
    try {
        clqg::harness::Config cfg = config_path.empty()
                                        ? clqg::harness::Config::from_string("")
                                        : clqg::harness::Config::from_file(config_path);
        if (!seed_override.empty()) cfg.set("seed", seed_override);
        if (!replicas_override.empty()) cfg.set("replicas", replicas_override);
        if (!threads_override.empty()) cfg.set("threads", threads_override);

        const auto result = clqg::harness::run_experiment(experiment, cfg);
        const std::string dir = out_dir.empty() ? "out/" + experiment : out_dir;
        result.write(dir);
        std::printf("%s: wrote %s/summary.json and rows.csv (%zu rows)\n", experiment.c_str(),
                    dir.c_str(), result.rows.size());
        return 0;
    } catch (const clqg::harness::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
}
