// Command-line front end: solve / certify / verify / net over scenario files.

#include <CLI11.hpp>

#include "heatprop/heatprop.hpp"

int main(int argc, char** argv) {
    CLI::App app{"exact propagators for the time-dependent anisotropic heat equation"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    double bound_scale = 1.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario, "scenario file")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "override the scenario seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--threads", threads, "worker threads for net solves")
            ->check(CLI::Range(1, 256));
    };

    CLI::App* solve = app.add_subcommand("solve", "propagate initial data");
    CLI::App* certify = app.add_subcommand("certify", "check kernel identities");
    CLI::App* verify = app.add_subcommand("verify", "check norm and decay bounds");
    CLI::App* net = app.add_subcommand("net", "mollified-coefficient diagnostics");
    for (CLI::App* sub : {solve, certify, verify, net}) add_common(sub);
    verify->add_option("--bound-scale", bound_scale, "scale bounds (testing hook)")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    heatprop::RunOptions opt;
    opt.out_dir = out_dir;
    if (seed_set) opt.seed = seed;
    opt.threads = threads;
    opt.bound_scale = bound_scale;

    const std::string cmd = app.get_subcommands().front()->get_name();
    return heatprop::run_command(cmd, scenario, opt);
}
