#include <CLI11.hpp>

#include "polya/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Interacting urn opinion dynamics: simulate, classify, solve, infer"};
    app.require_subcommand(1);

    polya::cli::Options opt;
    std::string config;
    std::string out = ".";
    std::string trajectory;

    const auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config, "run config (JSON)");
        if (config_required) c->required();
        sub->add_option("--out", out, "output directory");
        sub->add_flag("--allow-invalid", opt.allow_invalid, "continue on a disconnected or bipartite graph");
    };

    auto* simulate = app.add_subcommand("simulate", "stochastic trajectories to CSV");
    add_common(simulate, true);
    simulate->add_option("--seed", opt.seed, "base seed (overrides the config)");
    simulate->add_option("--runs", opt.runs, "Monte Carlo runs (overrides the config)");

    auto* classify = app.add_subcommand("classify", "boundary consensus verdict");
    add_common(classify, true);

    auto* equilibria = app.add_subcommand("equilibria", "boundary and interior equilibria with stability");
    add_common(equilibria, true);

    auto* infer = app.add_subcommand("infer", "per-agent bias and belief estimates from a trajectory");
    add_common(infer, false);
    infer->add_option("--trajectory", trajectory, "trajectory CSV")->required();

    auto* lyap = app.add_subcommand("lyapunov-check", "sampled descent check of the Lyapunov function");
    add_common(lyap, true);
    lyap->add_option("--seed", opt.seed, "sampling seed");
    lyap->add_option("--samples", opt.samples, "number of random points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return polya::cli::kConfigError;
    }

    opt.config = config;
    opt.out = out;
    opt.trajectory = trajectory;
    return polya::cli::run(app.get_subcommands().front()->get_name(), opt);
}
