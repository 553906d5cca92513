#include "nestreuse/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace nestreuse::cli;

    CLI::App app{"Nested-chain Monte Carlo with sample reuse"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version));

    Options options;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::string out_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", options.config, "Experiment config file")->required();
        sub->add_option("--seed", seed, "Seed (overrides the config)");
        sub->add_option("--out", out_dir, "Output directory (overrides the config)");
        sub->add_option("--trials", trials, "Trial count (overrides the config)")->check(CLI::PositiveNumber);
        sub->add_option("--threads", options.threads, "Worker threads (0 = all cores)");
        sub->add_flag("--quiet", options.quiet, "Suppress progress output");
    };
    CLI::App* run = app.add_subcommand("run", "Estimate the robustness curve and experiment cost");
    CLI::App* bench = app.add_subcommand("bench", "Compare reuse against independent sampling");
    CLI::App* audit = app.add_subcommand("audit", "Statistically check that the chain is nested");
    for (CLI::App* sub : {run, bench, audit}) {
        add_common(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed") > 0) options.seed = seed;
    if (chosen->count("--trials") > 0) options.trials = trials;
    if (chosen->count("--out") > 0) options.out = out_dir;

    Command command = Command::run;
    if (bench->parsed()) command = Command::bench;
    if (audit->parsed()) command = Command::audit;
    return execute(command, options, std::cout, std::cerr);
}
