#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "wcharge/experiments.hpp"

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out = "results";
    bool quiet = false;
};

void add_common(CLI::App& cmd, CommonOptions& opts) {
    cmd.add_option("--config", opts.config, "key = value config file")->check(CLI::ExistingFile);
    cmd.add_option("--seed", opts.seed, "master seed (overrides the config)");
    cmd.add_option("--trials", opts.trials, "trials per sweep point (overrides the config)");
    cmd.add_option("--out", opts.out, "output directory")->capture_default_str();
    cmd.add_flag("--quiet,-q", opts.quiet, "do not print the summary");
}

wcharge::ExperimentConfig build_config(const CommonOptions& opts) {
    wcharge::ExperimentConfig config = opts.config.empty() ? wcharge::ExperimentConfig{}
                                                           : wcharge::load_config(opts.config);
    if (opts.seed) {
        config.seed = *opts.seed;
    }
    if (opts.trials) {
        config.trials = *opts.trials;
    }
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pricing game for shared wireless charging: equilibria, dynamics and welfare experiments"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string selected;

    auto* solve = app.add_subcommand("solve", "solve one sampled instance and print its equilibrium report");
    add_common(*solve, opts);
    solve->callback([&] { selected = "solve"; });

    for (const auto& name : wcharge::experiment_names()) {
        auto* cmd = app.add_subcommand(name, "run the " + name + " experiment");
        add_common(*cmd, opts);
        cmd->callback([&selected, name] { selected = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const auto config = build_config(opts);
        if (selected == "solve") {
            const auto report = wcharge::solve_instance(config);
            if (solve->count("--out") > 0) {
                std::filesystem::create_directories(opts.out);
                std::ofstream(std::filesystem::path(opts.out) / "solve.json") << report.dump(2) << '\n';
            }
            if (!opts.quiet) {
                std::cout << report.dump(2) << '\n';
            }
            return 0;
        }
        const auto outcome = wcharge::run_experiment(selected, config, opts.out);
        if (!opts.quiet) {
            std::cout << outcome.summary.dump(2) << '\n';
            for (const auto& f : outcome.files) {
                std::cerr << "wrote " << f.string() << '\n';
            }
        }
        if (outcome.exit_code == 2) {
            std::cerr << "warning: some trials hit max_iterations without converging\n";
        } else if (outcome.exit_code == 3) {
            std::cerr << "verification failed; see verify.json\n";
        }
        return outcome.exit_code;
    } catch (const wcharge::NonConvergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
