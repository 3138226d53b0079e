#include "minlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "minlab/pool.hpp"
#include "minlab/rng.hpp"

namespace minlab {
namespace {

/// Gap below the unique maximum that still counts as a tie.
constexpr double kPeakTolerance = 1e-9;

void check_horizons(std::span<const std::int64_t> horizons) {
    if (horizons.empty()) throw std::invalid_argument("horizons must not be empty");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (horizons[i] < 0) throw std::invalid_argument("horizons must be non-negative");
        if (i > 0 && horizons[i] <= horizons[i - 1])
            throw std::invalid_argument("horizons must be strictly increasing");
    }
}

void check_basis(const SampleConfig& cfg, const PotentialBasis& basis) {
    if (basis.grid_size() != cfg.grid_size)
        throw ConfigError("basis and config disagree on the grid size");
}

int steps_for(std::int64_t horizon, int substeps) {
    const std::int64_t rows = (1 + horizon) * substeps;
    if (rows > 1000000) throw ConfigError("horizon too large");
    return static_cast<int>(rows);
}

/// Diameter in exact 1/M units; diameter() returns k/M for integer k.
int diameter_units(const OmegaSet& omega) {
    return static_cast<int>(std::lround(diameter(omega) * omega.grid_size));
}

}  // namespace

void validate_config(const SampleConfig& cfg) {
    if (cfg.grid_size < 2) throw ConfigError("grid size must be at least 2");
    if (cfg.mode.substeps < 1) throw ConfigError("substeps must be positive");
    if (cfg.dist.sigma < 0.0) throw ConfigError("sigma must not be negative");
    const int needed = 1 + static_cast<int>(std::ceil(std::abs(cfg.drift)));
    if (cfg.winding_bound < needed)
        throw ConfigError("winding bound must be at least 1 + ceil(|b|)");
}

DecaySeries decay_experiment(const SampleConfig& cfg, const PotentialBasis& basis,
                             int n_samples, std::span<const std::int64_t> horizons) {
    validate_config(cfg);
    check_basis(cfg, basis);
    check_horizons(horizons);
    if (n_samples < 1) throw std::invalid_argument("n_samples must be positive");

    const int sub = cfg.mode.substeps;
    const std::int64_t s_row = sub;
    const int steps = steps_for(horizons.back(), sub);

    DecaySeries out;
    out.horizons.assign(horizons.begin(), horizons.end());
    out.config = cfg;
    out.per_sample.assign(n_samples, std::vector<double>(horizons.size(), 0.0));

    parallel_for(n_samples, [&](int j) {
        KickSequence seq(rng::derive_key(cfg.master_seed, j), cfg.dist, cfg.mode,
                         basis.count());
        BasisForcing forcing(seq, basis);
        const auto ev = evolve(forcing, 0, steps, cfg.solver());
        for (std::size_t h = 0; h < horizons.size(); ++h)
            out.per_sample[j][h] =
                diameter(omega_set(ev, s_row, (1 + horizons[h]) * sub));
    });

    out.mean.assign(horizons.size(), 0.0);
    for (const auto& row : out.per_sample)
        for (std::size_t h = 0; h < row.size(); ++h) out.mean[h] += row[h];
    for (auto& v : out.mean) v /= n_samples;
    return out;
}

FitResult fit_log_linear(std::span<const std::int64_t> horizons,
                         std::span<const double> means, int burn_in, double floor) {
    if (horizons.size() != means.size())
        throw std::invalid_argument("horizons and means must match in length");
    if (burn_in < 0) throw std::invalid_argument("burn_in must be non-negative");

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (static_cast<int>(i) < burn_in) continue;
        if (!(means[i] > 0.0) || means[i] < floor) continue;
        xs.push_back(static_cast<double>(horizons[i]));
        ys.push_back(std::log(means[i]));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 4) throw ConfigError("log-linear fit needs at least 4 points above the grid floor");

    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("degenerate fit: all usable horizons coincide");

    FitResult fit;
    fit.n_used = n;
    fit.burn_in = burn_in;
    if (syy == 0.0) {
        fit.lambda_hat = 0.0;
        fit.c_hat = std::exp(my);
        fit.r_squared = 1.0;
        return fit;
    }
    const double slope = sxy / sxx;
    fit.lambda_hat = -slope;
    fit.c_hat = std::exp(my - slope * mx);
    const double ss_res = std::max(0.0, syy - sxy * sxy / sxx);
    fit.r_squared = 1.0 - ss_res / syy;
    return fit;
}

FitResult fit_lambda(const DecaySeries& series, int burn_in) {
    return fit_log_linear(series.horizons, series.mean, burn_in,
                          2.0 / series.config.grid_size);
}

HalvingEstimate halving_frequency(const SampleConfig& cfg, const PotentialBasis& basis,
                                  std::int64_t t_increment, int n_trials, int n_pasts,
                                  std::int64_t base_horizon) {
    validate_config(cfg);
    check_basis(cfg, basis);
    if (t_increment < 0) throw std::invalid_argument("t_increment must be non-negative");
    if (base_horizon < 0) throw std::invalid_argument("base_horizon must be non-negative");
    if (n_pasts < 1 || n_trials < n_pasts)
        throw std::invalid_argument("need at least one future per past");

    const int n_futures = n_trials / n_pasts;
    const int sub = cfg.mode.substeps;
    const std::int64_t s_row = sub;
    const std::int64_t t_row = (1 + base_horizon) * sub;
    const int steps = steps_for(base_horizon + t_increment, sub);

    // 0 = miss, 1 = halved, 2 = excluded (start already at the grid floor).
    std::vector<unsigned char> result(
        static_cast<std::size_t>(n_pasts) * n_futures, 0);
    parallel_for(n_pasts * n_futures, [&](int idx) {
        const int p = idx / n_futures;
        const int f = idx % n_futures;
        const std::uint64_t past_seed = rng::derive_key(cfg.master_seed, p);
        const std::uint64_t future_seed =
            rng::derive_key(past_seed ^ 0x9e3779b97f4a7c15ULL, f);
        KickSequence past_seq(past_seed, cfg.dist, cfg.mode, basis.count());
        KickSequence future_seq(future_seed, cfg.dist, cfg.mode, basis.count());
        BasisForcing past(past_seq, basis);
        BasisForcing future(future_seq, basis);
        SplicedForcing spliced(past, future, t_row);
        const auto ev = evolve(spliced, 0, steps, cfg.solver());
        const int d_old = diameter_units(omega_set(ev, s_row, t_row));
        if (d_old < 2) {
            result[idx] = 2;
            return;
        }
        const int d_new =
            diameter_units(omega_set(ev, s_row, t_row + t_increment * sub));
        result[idx] = 2 * d_new <= d_old ? 1 : 0;
    });

    HalvingEstimate est;
    est.t_increment = t_increment;
    est.base_horizon = base_horizon;
    est.past_successes.assign(n_pasts, 0);
    est.past_usable.assign(n_pasts, 0);
    for (int p = 0; p < n_pasts; ++p) {
        for (int f = 0; f < n_futures; ++f) {
            const unsigned char r = result[static_cast<std::size_t>(p) * n_futures + f];
            if (r == 2) {
                ++est.excluded;
                continue;
            }
            ++est.past_usable[p];
            if (r == 1) ++est.past_successes[p];
        }
        est.successes += est.past_successes[p];
        est.usable += est.past_usable[p];
    }
    if (est.usable > 0) {
        est.frequency = static_cast<double>(est.successes) / est.usable;
        est.half_width =
            1.96 * std::sqrt(est.frequency * (1.0 - est.frequency) / est.usable);
        double worst = 1.0;
        bool any = false;
        for (int p = 0; p < n_pasts; ++p) {
            if (est.past_usable[p] == 0) continue;
            any = true;
            worst = std::min(
                worst, static_cast<double>(est.past_successes[p]) / est.past_usable[p]);
        }
        est.min_past_frequency = any ? worst : 0.0;
    }
    return est;
}

double circle_hausdorff(std::span<const int> a, std::span<const int> b, int grid_size) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff distance of an empty set");
    const auto directed = [grid_size](std::span<const int> from, std::span<const int> to) {
        int worst = 0;
        for (int p : from) {
            int best = grid_size;
            for (int q : to) {
                const int d = std::abs(p - q);
                best = std::min(best, std::min(d, grid_size - d));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return static_cast<double>(std::max(directed(a, b), directed(b, a))) / grid_size;
}

DistanceSeries two_solution_convergence(const SampleConfig& cfg,
                                        const PotentialBasis& basis,
                                        std::span<const double> psi1,
                                        std::span<const double> psi2,
                                        std::span<const std::int64_t> horizons) {
    validate_config(cfg);
    check_basis(cfg, basis);
    check_horizons(horizons);

    const int sub = cfg.mode.substeps;
    const std::int64_t s_row = sub;
    const int steps = steps_for(horizons.back(), sub);

    KickSequence seq(cfg.master_seed, cfg.dist, cfg.mode, basis.count());
    BasisForcing forcing(seq, basis);
    const auto ev1 = evolve(forcing, 0, steps, cfg.solver(), psi1);
    const auto ev2 = evolve(forcing, 0, steps, cfg.solver(), psi2);

    DistanceSeries out;
    out.horizons.assign(horizons.begin(), horizons.end());
    out.distance.reserve(horizons.size());
    for (const std::int64_t h : horizons) {
        const auto o1 = omega_set(ev1, s_row, (1 + h) * sub);
        const auto o2 = omega_set(ev2, s_row, (1 + h) * sub);
        out.distance.push_back(circle_hausdorff(o1.points, o2.points, cfg.grid_size));
    }
    return out;
}

LyapunovResult lyapunov_from_curvatures(std::span<const double> curvatures, double dt) {
    if (curvatures.empty()) throw std::invalid_argument("need at least one curvature");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    double u0 = 1.0, u1 = 0.0;
    double logsum = 0.0, det_err = 0.0;
    for (const double c : curvatures) {
        const double a = 1.0 + c * dt;
        const double v0 = a * u0 + dt * u1;
        const double v1 = c * u0 + u1;
        det_err = std::max(det_err, std::abs((a - c * dt) - 1.0));
        const double norm = std::hypot(v0, v1);
        logsum += std::log(norm);
        u0 = v0 / norm;
        u1 = v1 / norm;
    }
    LyapunovResult res;
    res.n_kicks = static_cast<int>(curvatures.size());
    res.exponent = logsum / (curvatures.size() * dt);
    res.max_det_error = det_err;
    return res;
}

LyapunovResult lyapunov_exponent(const MinimizerPath& path, const KickSequence& seq,
                                 const PotentialBasis& basis, std::int64_t start_time) {
    const int n = static_cast<int>(path.positions.size()) - 1;
    if (n < 10) throw std::invalid_argument("path too short: need at least 10 kicks");
    std::vector<double> curv(n);
    for (int k = 0; k < n; ++k) {
        const auto kick = kick_at(seq, basis, start_time + k);
        curv[k] = eval_curvature(kick, basis, path.positions[k]);
    }
    return lyapunov_from_curvatures(curv, seq.dt());
}

namespace {

/// Contiguous run of grid points with value gap strictly below g,
/// grown from the peak; saturates at the full circle.
CircleArc grow_run(const std::vector<double>& gap, int peak, double g, int m) {
    CircleArc arc;
    arc.lo = peak;
    arc.hi = peak;
    arc.length = 1;
    while (arc.length < m && gap[(arc.lo + m - 1) % m] < g) {
        arc.lo = (arc.lo + m - 1) % m;
        ++arc.length;
    }
    while (arc.length < m && gap[(arc.hi + 1) % m] < g) {
        arc.hi = (arc.hi + 1) % m;
        ++arc.length;
    }
    arc.a = (arc.lo - 0.5) / m;
    arc.b = arc.a + static_cast<double>(arc.length) / m;
    return arc;
}

bool arcs_disjoint(const std::vector<CircleArc>& arcs, int m) {
    std::vector<char> taken(m, 0);
    for (const auto& arc : arcs) {
        if (arc.length >= m) return false;
        for (int k = 0; k < arc.length; ++k) {
            const int x = (arc.lo + k) % m;
            if (taken[x]) return false;
            taken[x] = 1;
        }
    }
    return true;
}

}  // namespace

SeparationCertificate separation_check(const PotentialBasis& basis,
                                       std::span<const std::vector<double>> candidates,
                                       double alpha_request) {
    const int m = basis.grid_size();
    const int n = static_cast<int>(candidates.size());
    if (n < 3) throw ConfigError("separation needs at least 3 candidate potentials");
    for (const auto& c : candidates)
        if (static_cast<int>(c.size()) != basis.count())
            throw ConfigError("candidate length does not match the basis");

    SeparationCertificate cert;
    cert.grid_size = m;
    cert.coefficients.assign(candidates.begin(), candidates.end());

    const auto fail = [&cert](std::string why) {
        cert.pass = false;
        cert.failure = std::move(why);
        return cert;
    };

    // Values, peaks, gaps below the peak.
    std::vector<std::vector<double>> gap(n, std::vector<double>(m, 0.0));
    cert.argmax.assign(n, 0);
    cert.peak.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        std::vector<double> v(m, 0.0);
        for (int x = 0; x < m; ++x)
            for (int k = 0; k < basis.count(); ++k)
                v[x] += candidates[i][k] * basis.value(k, x);
        int best = 0;
        for (int x = 1; x < m; ++x)
            if (v[x] > v[best]) best = x;
        double second = -kValueInfinity;
        for (int x = 0; x < m; ++x)
            if (x != best) second = std::max(second, v[x]);
        if (!(v[best] - second > kPeakTolerance))
            return fail("candidate " + std::to_string(i) + " has no unique maximum");
        cert.argmax[i] = best;
        cert.peak[i] = static_cast<double>(best) / m;
        for (int x = 0; x < m; ++x) gap[i][x] = v[best] - v[x];
    }

    // Thresholds where any run can change: the distinct positive gaps.
    std::vector<double> levels;
    levels.reserve(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < m; ++x)
            if (gap[i][x] > 0.0) levels.push_back(gap[i][x]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    const auto runs_at = [&](double g) {
        std::vector<CircleArc> arcs(n);
        for (int i = 0; i < n; ++i) arcs[i] = grow_run(gap[i], cert.argmax[i], g, m);
        return arcs;
    };

    if (!arcs_disjoint(runs_at(levels.front()), m))
        return fail("maxima coincide: arcs overlap at every level");
    // Largest level whose runs stay pairwise disjoint.
    std::size_t lo = 0, hi = levels.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (arcs_disjoint(runs_at(levels[mid]), m))
            lo = mid;
        else
            hi = mid - 1;
    }
    const double beta = levels[lo];
    cert.J = runs_at(beta);

    cert.alpha0 = kValueInfinity;
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < m; ++x)
            if (!cert.J[i].contains(x, m)) cert.alpha0 = std::min(cert.alpha0, gap[i][x]);

    if (alpha_request > 0.0 && alpha_request > cert.alpha0)
        return fail("requested alpha exceeds alpha0");
    cert.alpha = alpha_request > 0.0 ? alpha_request : cert.alpha0;

    cert.I = runs_at(cert.alpha);
    for (int i = 0; i < n; ++i) {
        if (cert.I[i].length > cert.J[i].length ||
            !cert.J[i].contains(cert.I[i].lo, m) || !cert.J[i].contains(cert.I[i].hi, m))
            return fail("inner arc escapes its outer arc");
        for (int x = 0; x < m; ++x)
            if (!cert.I[i].contains(x, m) && gap[i][x] < cert.alpha)
                return fail("candidate " + std::to_string(i) +
                            " has a secondary peak breaching the margin");
    }

    cert.pass = true;
    return cert;
}

std::vector<std::vector<double>> auto_separation_candidates(const PotentialBasis& basis) {
    int k_cos = -1, k_sin = -1;
    const auto& modes = basis.modes();
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (modes[k].frequency != 1) continue;
        if (modes[k].phase == 0.0)
            k_cos = static_cast<int>(k);
        else
            k_sin = static_cast<int>(k);
    }
    if (k_cos < 0 || k_sin < 0)
        throw ConfigError("basis lacks the frequency-1 cosine/sine pair");
    std::vector<std::vector<double>> out(3, std::vector<double>(basis.count(), 0.0));
    for (int i = 0; i < 3; ++i) {
        const double theta = 2.0 * M_PI * i / 3.0;
        out[i][k_cos] = std::cos(theta);
        out[i][k_sin] = std::sin(theta);
    }
    return out;
}

namespace {

std::string decimal_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s += static_cast<char>('0' + static_cast<int>(v % 10));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

/// Smallest integer strictly above lb, nudged up so a bound that rounds a
/// hair low cannot produce an integer outside the open interval.
long double lower_integer(long double lb) {
    return std::floor(lb * (1.0L + 1e-9L)) + 1.0L;
}

}  // namespace

ProofConstants proof_constants(const SeparationCertificate& cert,
                               const PotentialBasis& basis, ForcingMode mode,
                               double drift) {
    if (!cert.pass) throw ConfigError("separation certificate did not pass");
    if (cert.grid_size != basis.grid_size())
        throw ConfigError("certificate and basis disagree on the grid size");

    ProofConstants out;
    for (const auto& c : cert.coefficients) {
        double max_v = 0.0, max_g = 0.0;
        for (int x = 0; x < basis.grid_size(); ++x) {
            double v = 0.0, g = 0.0;
            for (int k = 0; k < basis.count(); ++k) {
                v += c[k] * basis.value(k, x);
                g += c[k] * basis.gradient(k, x);
            }
            max_v = std::max(max_v, std::abs(v));
            max_g = std::max(max_g, std::abs(g));
        }
        out.c1_norm_max = std::max(out.c1_norm_max, max_v + max_g);
    }
    out.C = 3.0 * (out.c1_norm_max + 1.0);

    long double alpha = std::min<long double>(cert.alpha0, 1.0L / (10.0L * out.C));
    if (mode == ForcingMode::White)
        alpha = std::min(alpha, 1.0L / (10.0L * (drift + 1.0) * (drift + 1.0)));
    if (!(alpha > 0.0L)) throw ConfigError("alpha must be positive");
    if (!(alpha < 1.0L / 30.0L))
        throw NumericError("alpha >= 1/30: outside the admissible range");
    out.alpha = static_cast<double>(alpha);

    const long double inv = 1.0L / alpha;
    const long double cube = inv * inv * inv;
    const long double lb1 = 2.0L + cube;
    const long double ub1 = 2.0L * cube;
    const long double np = lower_integer(lb1);
    if (!(np < ub1)) throw NumericError("empty integer interval for N'");
    if (np > 9.0e18L) throw NumericError("N' exceeds the 64-bit range at this alpha");
    out.n_prime = static_cast<std::int64_t>(np);

    long double tenth = 1.0L;
    for (int k = 0; k < 10; ++k) tenth *= inv;
    const long double lb2 = 2.0L * tenth + 1.0L;
    const long double ub2 = 4.0L * tenth;
    if (ub2 > 1.6e38L) throw NumericError("N exceeds the 128-bit range at this alpha");
    const long double nb = lower_integer(lb2);
    if (!(nb < ub2)) throw NumericError("empty integer interval for N");
    out.n_big = decimal_string(static_cast<unsigned __int128>(nb));
    return out;
}

EventEstimate event_probability(const PotentialBasis& basis, const Distribution& dist,
                                double eps, int n_kicks, std::int64_t n_samples,
                                std::uint64_t master_seed) {
    if (eps < 0.0) throw std::invalid_argument("eps must not be negative");
    if (n_kicks < 1) throw std::invalid_argument("n_kicks must be positive");
    if (n_samples < 1 || n_samples > 1000000000)
        throw std::invalid_argument("n_samples out of range");

    const int m = basis.grid_size();
    std::vector<unsigned char> hit(static_cast<std::size_t>(n_samples), 0);
    parallel_for(static_cast<int>(n_samples), [&](int j) {
        KickSequence seq(rng::derive_key(master_seed, j), dist, ModeSpec{},
                         basis.count());
        for (int k = 0; k < n_kicks; ++k) {
            const auto kick = kick_at(seq, basis, k);
            for (int x = 0; x < m; ++x)
                if (std::abs(eval_potential(kick, basis, x)) > eps) return;
        }
        hit[j] = 1;
    });

    EventEstimate est;
    est.n_samples = n_samples;
    for (const auto h : hit) est.successes += h;
    est.probability = static_cast<double>(est.successes) / n_samples;
    est.half_width =
        1.96 * std::sqrt(est.probability * (1.0 - est.probability) / n_samples);
    return est;
}

}  // namespace minlab
