#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "minlab/cli.hpp"
#include "minlab/errors.hpp"

namespace {

struct Cli {
    std::optional<std::string> config;
    minlab::Overrides ov;
    bool auto3 = false;
    int max_m = 16;
    int max_steps = 4;
    int seeds = 50;
};

void add_common(CLI::App* cmd, Cli& cli) {
    cmd->add_option("--config", cli.config, "config file (key = value lines)");
    cmd->add_option("--seed", cli.ov.seed, "master seed");
    cmd->add_option("--out", cli.ov.out, "output directory");
    cmd->add_option("--samples", cli.ov.samples, "Monte-Carlo sample count");
    cmd->add_option("--grid", cli.ov.grid, "circle grid size M");
    cmd->add_option("--sigma", cli.ov.sigma, "coefficient distribution width");
    cmd->add_option("--b", cli.ov.b, "first-integral drift");
    cmd->add_option("--mode", cli.ov.mode, "kicked | white:P");
    cmd->add_option("--horizons", cli.ov.horizons, "horizon range A..B");
    cmd->add_option("--t-halving", cli.ov.t_halving, "halving time increment T");
    cmd->add_option("--basis", cli.ov.basis, "basis tokens, e.g. fourier:1c,1s");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circle minimizer experiments"};
    app.require_subcommand(1);

    Cli cli;
    auto* decay = app.add_subcommand("decay", "sampled diameter decay and its fit");
    auto* fit = app.add_subcommand("fit", "refit an existing decay.csv");
    auto* halving = app.add_subcommand("halving", "diameter halving frequency");
    auto* convergence =
        app.add_subcommand("convergence", "two initial conditions, one forcing");
    auto* lyapunov =
        app.add_subcommand("lyapunov", "exponent along a backtracked minimizer");
    auto* separation =
        app.add_subcommand("separation", "separated-maxima certificate");
    auto* embed = app.add_subcommand("embed", "check the basis embeds the circle");
    auto* oracle = app.add_subcommand("oracle", "brute-force equivalence suite");
    auto* constants = app.add_subcommand("constants", "certified proof constants");
    for (auto* cmd : {decay, fit, halving, convergence, lyapunov, separation, embed,
                      oracle, constants})
        add_common(cmd, cli);
    separation->add_flag("--auto3", cli.auto3, "use the rotated cosine triple");
    oracle->add_option("--max-m", cli.max_m, "largest grid size (from 8, step 4)");
    oracle->add_option("--max-steps", cli.max_steps, "largest kick count");
    oracle->add_option("--seeds", cli.seeds, "seeds per instance");

    CLI11_PARSE(app, argc, argv);

    return minlab::run_guarded(
        [&]() -> int {
            minlab::RunConfig cfg;
            if (cli.config) cfg = minlab::load_config_file(*cli.config);
            minlab::apply_overrides(cfg, cli.ov);

            if (decay->parsed()) return minlab::run_decay(cfg, std::cout);
            if (fit->parsed()) return minlab::run_fit(cfg, std::cout);
            if (halving->parsed()) return minlab::run_halving(cfg, std::cout);
            if (convergence->parsed()) return minlab::run_convergence(cfg, std::cout);
            if (lyapunov->parsed()) return minlab::run_lyapunov(cfg, std::cout);
            if (separation->parsed())
                return minlab::run_separation(cfg, cli.auto3, std::cout);
            if (embed->parsed()) return minlab::run_embed(cfg, std::cout);
            if (oracle->parsed())
                return minlab::run_oracle(cfg, cli.max_m, cli.max_steps, cli.seeds,
                                          std::cout);
            if (constants->parsed()) return minlab::run_constants(cfg, std::cout);
            throw minlab::ConfigError("no subcommand given");
        },
        std::cerr);
}
