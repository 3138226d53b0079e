#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "minlab/forcing.hpp"
#include "minlab/omega.hpp"
#include "minlab/solver.hpp"

namespace minlab {

/// Knobs shared by every Monte-Carlo experiment: one realized system is
/// (grid, drift, distribution, mode) plus a seed; per-sample streams are
/// derived from master_seed, so results are reproducible and independent
/// of worker scheduling.
struct SampleConfig {
    int grid_size = 256;
    double drift = 0.0;
    /// Must satisfy winding_bound >= 1 + ceil(|drift|) so the per-segment
    /// winding minimum is attained strictly inside the search range.
    int winding_bound = 2;
    Distribution dist{};
    ModeSpec mode{};
    std::uint64_t master_seed = 0;

    SolverOptions solver() const { return {drift, mode.dt(), winding_bound}; }
};

/// Throws ConfigError on out-of-range fields.
void validate_config(const SampleConfig& cfg);

/// Diameters of the reachable-source sets, per sample and horizon.
/// Horizons count whole time units; in white mode one unit spans
/// mode.substeps solver rows. The source time s sits one unit after the
/// initial condition.
struct DecaySeries {
    std::vector<std::int64_t> horizons;
    std::vector<std::vector<double>> per_sample;  // [sample][horizon index]
    std::vector<double> mean;
    SampleConfig config;

    int n_samples() const { return static_cast<int>(per_sample.size()); }
};

/// One evolution per sample out to the largest horizon; intermediate
/// horizons reuse the same kick stream, so rows are nested set readings
/// and non-increasing exactly.
DecaySeries decay_experiment(const SampleConfig& cfg, const PotentialBasis& basis,
                             int n_samples, std::span<const std::int64_t> horizons);

struct FitResult {
    double lambda_hat = 0.0;
    double c_hat = 0.0;
    double r_squared = 0.0;
    int n_used = 0;
    int burn_in = 0;
};

/// Least squares of ln(mean) against the horizon, skipping the first
/// burn_in entries and entries whose mean sits below `floor`. A constant
/// series fits exactly with lambda_hat = 0. Throws ConfigError when fewer
/// than 4 points survive.
FitResult fit_log_linear(std::span<const std::int64_t> horizons,
                         std::span<const double> means, int burn_in, double floor);

/// fit_log_linear with the grid floor 2/M taken from the series config.
FitResult fit_lambda(const DecaySeries& series, int burn_in);

struct HalvingEstimate {
    std::int64_t t_increment = 0;
    std::int64_t base_horizon = 0;
    int successes = 0;
    int usable = 0;
    int excluded = 0;
    double frequency = 0.0;
    /// Worst per-past frequency over pasts with at least one usable trial.
    double min_past_frequency = 0.0;
    /// 1.96 * sqrt(p(1-p)/n) over the pooled usable trials.
    double half_width = 0.0;
    std::vector<int> past_successes;
    std::vector<int> past_usable;
};

/// Frequency of d(Omega_{s,t+T}) <= d(Omega_{s,t})/2 with t - s =
/// base_horizon: each of n_pasts frozen pasts is continued by
/// n_trials/n_pasts independent futures over [t, t+T]. Trials whose
/// starting diameter is already under 2/M are excluded and counted.
/// Diameters compare in exact 1/M units.
HalvingEstimate halving_frequency(const SampleConfig& cfg, const PotentialBasis& basis,
                                  std::int64_t t_increment, int n_trials,
                                  int n_pasts = 10, std::int64_t base_horizon = 3);

/// Largest over one set of the circle distance to the other, symmetrized,
/// in exact 1/M units. Inputs are grid indices.
double circle_hausdorff(std::span<const int> a, std::span<const int> b, int grid_size);

struct DistanceSeries {
    std::vector<std::int64_t> horizons;
    std::vector<double> distance;
};

/// Hausdorff distance between the source sets grown from two initial
/// conditions under one shared forcing realization, per horizon.
DistanceSeries two_solution_convergence(const SampleConfig& cfg,
                                        const PotentialBasis& basis,
                                        std::span<const double> psi1,
                                        std::span<const double> psi2,
                                        std::span<const std::int64_t> horizons);

struct LyapunovResult {
    double exponent = 0.0;
    /// Largest |det J - 1| over the per-kick Jacobians; each is
    /// unimodular in exact arithmetic.
    double max_det_error = 0.0;
    int n_kicks = 0;
};

/// Top exponent of the linearized kick dynamics along a path: at each kick
/// the tangent (dx, dv) maps through [[1 + c dt, dt], [c, 1]] with c the
/// kick curvature at the path position; the iterated vector is
/// renormalized every step and the exponent is the mean log expansion per
/// unit time. Requires at least 10 kicks.
LyapunovResult lyapunov_exponent(const MinimizerPath& path, const KickSequence& seq,
                                 const PotentialBasis& basis,
                                 std::int64_t start_time = 0);

/// Same iteration from an explicit curvature-per-kick list.
LyapunovResult lyapunov_from_curvatures(std::span<const double> curvatures, double dt);

/// Closed arc of grid points [lo, hi] (wrapping when lo > hi), with the
/// open real interval (a, b) of midpoints just outside the run.
struct CircleArc {
    int lo = 0;
    int hi = 0;
    double a = 0.0;
    double b = 0.0;
    int length = 0;

    bool contains(int x, int grid_size) const {
        const int d = (x - lo + grid_size) % grid_size;
        return d < length;
    }
};

/// Proof that the candidate potentials have unique, well-separated maxima:
/// J_i are pairwise disjoint arcs around each maximum, alpha0 is the
/// worst-case drop of candidate i outside J_i, and I_i(alpha) are the
/// tighter arcs outside of which candidate i sits at least alpha below its
/// maximum.
struct SeparationCertificate {
    bool pass = false;
    std::string failure;
    int grid_size = 0;
    std::vector<std::vector<double>> coefficients;
    std::vector<int> argmax;
    std::vector<double> peak;  // argmax / M on the unit circle
    std::vector<CircleArc> J;
    std::vector<CircleArc> I;
    double alpha0 = 0.0;
    double alpha = 0.0;
};

/// Verifies >= 3 candidate coefficient vectors on the grid. Arcs J_i grow
/// around each unique argmax until any further growth would overlap;
/// alpha_request <= alpha0 selects the certified margin (pass
/// alpha_request <= 0 to take alpha0 itself). Failures (non-unique
/// maximum, overlapping arcs, alpha_request > alpha0, a secondary peak
/// inside some J_i breaching the margin) come back as pass = false with a
/// description, not as exceptions.
SeparationCertificate separation_check(const PotentialBasis& basis,
                                       std::span<const std::vector<double>> candidates,
                                       double alpha_request = 0.0);

/// Three rotated copies of a unit cosine, maxima at 0, 1/3, 2/3: the
/// standard certificate input. Requires the basis to carry the
/// frequency-1 cosine and sine modes.
std::vector<std::vector<double>> auto_separation_candidates(const PotentialBasis& basis);

struct ProofConstants {
    /// max over candidates of (sup |F| + sup |F'|) on the grid.
    double c1_norm_max = 0.0;
    double C = 0.0;  // 3 * (c1_norm_max + 1)
    double alpha = 0.0;
    /// Smallest integer in (2 + 1/alpha^3, 2/alpha^3).
    std::int64_t n_prime = 0;
    /// Integer strictly inside (2/alpha^10 + 1, 4/alpha^10), in decimal:
    /// the value overflows 64 bits at typical certified alpha. Exactly the
    /// smallest such integer whenever the bound fits a long double
    /// mantissa; otherwise within its rounding slack (the interval is
    /// astronomically wider).
    std::string n_big;
};

/// Constants derived from a passing certificate: C from the worst C^1
/// norm, alpha = min(alpha0, 1/(10C)) with the extra white-noise factor
/// 1/(10(b+1)^2) when mode is White, then the two integer thresholds.
/// Throws NumericError if alpha >= 1/30 or an integer interval is empty.
ProofConstants proof_constants(const SeparationCertificate& cert,
                               const PotentialBasis& basis,
                               ForcingMode mode = ForcingMode::Kicked,
                               double drift = 0.0);

struct EventEstimate {
    double probability = 0.0;
    double half_width = 0.0;
    std::int64_t successes = 0;
    std::int64_t n_samples = 0;
};

/// Monte-Carlo probability that n_kicks consecutive kick potentials all
/// stay within sup-norm eps on the grid, with a 1.96-sigma binomial
/// half-width.
EventEstimate event_probability(const PotentialBasis& basis, const Distribution& dist,
                                double eps, int n_kicks, std::int64_t n_samples,
                                std::uint64_t master_seed);

}  // namespace minlab
