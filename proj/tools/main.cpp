#include <iostream>

#include <CLI11.hpp>

#include "crawlsim/app/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"crawlsim: two-body crawler with dry friction"};
    app.require_subcommand(1);

    crawlsim::app::CommandOptions opts;
    std::string out_dir;
    std::string trajectory;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "scenario JSON file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--plots", opts.plots, "write SVG plots");
        sub->add_option("--seed", seed, "seed for test functions and random windows");
        sub->add_flag("--quiet", opts.quiet, "suppress progress output");
    };
    common(app.add_subcommand("simulate", "refine the regularised problem and write trajectory.csv"));
    common(app.add_subcommand("oracle", "run the event-driven solver and write oracle.csv, events.csv"));
    common(app.add_subcommand("converge", "write the Cauchy convergence table"));
    auto* verify = app.add_subcommand("verify", "check a trajectory against the limit system");
    common(verify);
    verify->add_option("--trajectory", trajectory, "trajectory CSV (default: a fresh refine run)");
    common(app.add_subcommand("compare", "cross-check the penalised and event-driven solvers"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : crawlsim::app::kExitConfig;
    }

    auto* sub = app.get_subcommands().front();
    if (!out_dir.empty()) opts.out = out_dir;
    if (!trajectory.empty()) opts.trajectory = trajectory;
    if (sub->count("--seed") > 0) opts.seed = seed;
    return crawlsim::app::run_command(sub->get_name(), opts, std::cout, std::cerr);
}
