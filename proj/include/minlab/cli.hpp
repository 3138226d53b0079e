#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "minlab/experiments.hpp"
#include "minlab/forcing.hpp"

namespace minlab {

/// Everything a run needs, loadable from a flat `key = value` file.
/// Defaults describe the standard contraction study: unit-amplitude
/// uniform kicks on the 256-point circle, horizons 1..30.
struct RunConfig {
    std::string basis_spec = "fourier:1c,1s";
    Distribution dist{DistKind::UniformBox, 1.0};
    ModeSpec mode{ForcingMode::Kicked, 1};
    int grid_size = 256;
    double drift = 0.0;
    int winding_bound = 2;
    std::uint64_t master_seed = 0;
    int n_samples = 200;
    std::int64_t horizon_lo = 1;
    std::int64_t horizon_hi = 30;
    /// Negative means automatic: the first 20% of the horizon list.
    int burn_in = -1;
    std::int64_t t_halving = 3;
    int halving_pasts = 10;
    std::int64_t halving_base = 1;
    std::string out_dir = ".";

    std::vector<std::int64_t> horizons() const;
    int effective_burn_in() const;
    SampleConfig sample() const;
    PotentialBasis basis() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parses flat `key = value` text; `#` starts a comment. Unknown or
/// repeated keys throw ConfigError before any computation.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Canonical serialization; parse_config_text(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);

/// Command-line overrides applied on top of a loaded config.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> samples;
    std::optional<int> grid;
    std::optional<double> sigma;
    std::optional<double> b;
    std::optional<std::string> mode;
    std::optional<std::string> horizons;  // "A..B"
    std::optional<std::int64_t> t_halving;
    std::optional<std::string> basis;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov);

/// Subcommand bodies. Each writes its artifacts under cfg.out_dir, prints
/// a one-line summary to `log`, and returns a process exit code; invalid
/// configuration surfaces as ConfigError (exit 2 via run_guarded),
/// numerical failure as NumericError (exit 3).
int run_decay(const RunConfig& cfg, std::ostream& log);
int run_fit(const RunConfig& cfg, std::ostream& log);
int run_halving(const RunConfig& cfg, std::ostream& log);
int run_convergence(const RunConfig& cfg, std::ostream& log);
int run_lyapunov(const RunConfig& cfg, std::ostream& log);
int run_separation(const RunConfig& cfg, bool auto3, std::ostream& log);
int run_embed(const RunConfig& cfg, std::ostream& log);
int run_constants(const RunConfig& cfg, std::ostream& log);
int run_oracle(const RunConfig& cfg, int max_m, int max_steps, int n_seeds,
               std::ostream& log);

/// Runs `body`, mapping ConfigError/std::invalid_argument to 2,
/// NumericError and any other failure to 3, with the message on `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace minlab
