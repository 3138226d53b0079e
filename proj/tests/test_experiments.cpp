#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "minlab/errors.hpp"
#include "minlab/experiments.hpp"
#include "minlab/forcing.hpp"
#include "minlab/omega.hpp"
#include "minlab/solver.hpp"

using namespace minlab;

namespace {

PotentialBasis cos_sin_basis(int m) {
    return make_fourier_basis({{1, 0.0}, {1, M_PI / 2}}, m);
}

SampleConfig kicked_config(int m, double sigma, std::uint64_t seed) {
    SampleConfig cfg;
    cfg.grid_size = m;
    cfg.dist = {DistKind::UniformBox, sigma};
    cfg.mode = {ForcingMode::Kicked, 1};
    cfg.master_seed = seed;
    return cfg;
}

std::vector<std::int64_t> range_horizons(int lo, int hi) {
    std::vector<std::int64_t> hs;
    for (int h = lo; h <= hi; ++h) hs.push_back(h);
    return hs;
}

}  // namespace

TEST_CASE("config validation rejects out-of-range fields") {
    SampleConfig cfg = kicked_config(64, 1.0, 1);
    CHECK_NOTHROW(validate_config(cfg));

    SampleConfig bad = cfg;
    bad.grid_size = 1;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    bad = cfg;
    bad.mode.substeps = 0;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    bad = cfg;
    bad.dist.sigma = -0.5;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    // winding_bound must leave one spare winding beyond the drift.
    bad = cfg;
    bad.drift = 1.5;
    bad.winding_bound = 2;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad.winding_bound = 3;
    CHECK_NOTHROW(validate_config(bad));

    // Experiment entry points run the same validation.
    const auto basis = cos_sin_basis(64);
    const auto hs = range_horizons(1, 4);
    SampleConfig mismatched = kicked_config(32, 1.0, 1);
    CHECK_THROWS_AS(decay_experiment(mismatched, basis, 2, hs), ConfigError);

    // dt comes from the substep count.
    SampleConfig white = cfg;
    white.mode = {ForcingMode::White, 4};
    CHECK(white.solver().dt == doctest::Approx(0.25));
}

TEST_CASE("zero forcing keeps every grid point reachable at every horizon") {
    const int m = 64;
    const auto basis = cos_sin_basis(m);
    const auto cfg = kicked_config(m, 0.0, 5);
    const std::vector<std::int64_t> hs{1, 2, 5, 9};

    const auto series = decay_experiment(cfg, basis, 3, hs);
    CHECK(series.n_samples() == 3);
    CHECK(series.horizons == hs);
    CHECK(series.config.grid_size == m);

    const double full = 1.0 - 1.0 / m;
    for (const auto& row : series.per_sample)
        for (double d : row) CHECK(d == full);
    for (double d : series.mean) CHECK(d == full);
}

TEST_CASE("per-sample diameters are non-increasing and the mean matches") {
    const int m = 64;
    const auto basis = cos_sin_basis(m);
    const auto cfg = kicked_config(m, 0.3, 21);
    const auto hs = range_horizons(1, 12);

    const auto series = decay_experiment(cfg, basis, 10, hs);
    REQUIRE(series.n_samples() == 10);
    for (const auto& row : series.per_sample) {
        REQUIRE(row.size() == hs.size());
        for (std::size_t j = 0; j + 1 < row.size(); ++j) CHECK(row[j] >= row[j + 1]);
        for (double d : row) {
            CHECK(d >= 0.0);
            CHECK(d <= 1.0 - 1.0 / m);
        }
    }
    for (std::size_t j = 0; j < hs.size(); ++j) {
        double sum = 0.0;
        for (const auto& row : series.per_sample) sum += row[j];
        CHECK(series.mean[j] == doctest::Approx(sum / 10).epsilon(1e-14));
    }

    // The whole experiment is a pure function of its arguments.
    const auto again = decay_experiment(cfg, basis, 10, hs);
    CHECK(again.mean == series.mean);
    CHECK(again.per_sample == series.per_sample);
}

TEST_CASE("a strong kick collapses the source set within two steps") {
    const int m = 256;
    const auto basis = cos_sin_basis(m);
    const auto cfg = kicked_config(m, 5.0, 99);
    const std::vector<std::int64_t> hs{1, 2, 3};

    const auto series = decay_experiment(cfg, basis, 1, hs);
    const auto& row = series.per_sample[0];
    CHECK(row[0] >= row[1]);
    CHECK(row[1] <= 2.0 / m);
    CHECK(row[2] <= 2.0 / m);
}

TEST_CASE("weak-forcing decay fits a clean exponential") {
    const int m = 128;
    const auto basis = cos_sin_basis(m);
    const auto cfg = kicked_config(m, 0.01, 0xDECA1);

    const auto series = decay_experiment(cfg, basis, 80, range_horizons(1, 24));
    const auto fit = fit_lambda(series, 4);
    CHECK(fit.lambda_hat > 0.05);
    CHECK(fit.lambda_hat < 0.5);
    CHECK(fit.r_squared > 0.95);
    CHECK(fit.n_used >= 10);
    CHECK(fit.burn_in == 4);
}

TEST_CASE("log-linear fit recovers exact exponential parameters") {
    const auto hs = range_horizons(1, 20);
    std::vector<double> means;
    for (auto h : hs) means.push_back(0.8 * std::exp(-0.5 * static_cast<double>(h)));

    const auto fit = fit_log_linear(hs, means, 3, 1e-300);
    CHECK(fit.lambda_hat == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.c_hat == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.n_used == 17);
}

TEST_CASE("fit handles constants, floors, and noise") {
    const auto hs = range_horizons(1, 12);

    std::vector<double> flat(hs.size(), 0.25);
    const auto fit0 = fit_log_linear(hs, flat, 0, 1e-300);
    CHECK(fit0.lambda_hat == 0.0);
    CHECK(fit0.c_hat == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(fit0.r_squared == doctest::Approx(1.0));
    CHECK(fit0.n_used == 12);

    // Entries at or below the floor drop out of the regression.
    std::vector<double> floored;
    for (auto h : hs) floored.push_back(std::exp(-0.4 * static_cast<double>(h)));
    const auto full = fit_log_linear(hs, floored, 0, 1e-300);
    const auto cut = fit_log_linear(hs, floored, 0, std::exp(-0.4 * 6.5));
    CHECK(full.n_used == 12);
    CHECK(cut.n_used == 6);
    CHECK(cut.lambda_hat == doctest::Approx(0.4).epsilon(1e-10));

    // Too few survivors is a configuration error, not a garbage answer.
    CHECK_THROWS_AS(fit_log_linear(hs, floored, 0, std::exp(-0.4 * 3.5)), ConfigError);
    CHECK_THROWS_AS(fit_log_linear(hs, floored, 9, 1e-300), ConfigError);

    // One percent multiplicative noise barely moves the estimate.
    std::vector<double> noisy;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double wiggle = (i % 2 == 0) ? 1.01 : 0.99;
        noisy.push_back(0.6 * std::exp(-0.3 * static_cast<double>(hs[i])) * wiggle);
    }
    const auto fitn = fit_log_linear(hs, noisy, 0, 1e-300);
    CHECK(fitn.lambda_hat == doctest::Approx(0.3).epsilon(0.1));
    CHECK(fitn.r_squared > 0.99);
}

TEST_CASE("experiment inputs are validated") {
    const auto basis = cos_sin_basis(32);
    const auto cfg = kicked_config(32, 0.5, 3);

    CHECK_THROWS_AS(decay_experiment(cfg, basis, 2, std::vector<std::int64_t>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(decay_experiment(cfg, basis, 2, std::vector<std::int64_t>{3, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(decay_experiment(cfg, basis, 2, std::vector<std::int64_t>{2, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(decay_experiment(cfg, basis, 2, std::vector<std::int64_t>{-1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(decay_experiment(cfg, basis, 0, std::vector<std::int64_t>{1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(decay_experiment(cfg, basis, 2, std::vector<std::int64_t>{2000000}),
                    ConfigError);

    CHECK_THROWS_AS(halving_frequency(cfg, basis, -1, 20, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(halving_frequency(cfg, basis, 2, 20, 4, -1), std::invalid_argument);
    CHECK_THROWS_AS(halving_frequency(cfg, basis, 2, 3, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(halving_frequency(cfg, basis, 2, 20, 0, 1), std::invalid_argument);
}

TEST_CASE("zero forcing never halves the source diameter") {
    const int m = 32;
    const auto basis = cos_sin_basis(m);
    const auto cfg = kicked_config(m, 0.0, 11);

    const auto est = halving_frequency(cfg, basis, 3, 20, 4, 1);
    CHECK(est.t_increment == 3);
    CHECK(est.base_horizon == 1);
    CHECK(est.successes == 0);
    CHECK(est.usable == 20);
    CHECK(est.excluded == 0);
    CHECK(est.frequency == 0.0);
    CHECK(est.min_past_frequency == 0.0);
    REQUIRE(est.past_usable.size() == 4);
    for (int u : est.past_usable) CHECK(u == 5);
    for (int s : est.past_successes) CHECK(s == 0);
}

TEST_CASE("strong forcing halves the source diameter almost always") {
    const int m = 128;
    const auto basis = cos_sin_basis(m);
    const auto cfg = kicked_config(m, 1.0, 7);

    const auto est = halving_frequency(cfg, basis, 1, 60, 6, 1);
    CHECK(est.usable + est.excluded == 60);
    CHECK(est.usable >= 50);
    CHECK(est.frequency >= 0.8);
    CHECK(est.min_past_frequency >= 0.5);
    const double p = est.frequency;
    CHECK(est.half_width ==
          doctest::Approx(1.96 * std::sqrt(p * (1.0 - p) / est.usable)).epsilon(1e-12));

    const auto longer = halving_frequency(cfg, basis, 2, 60, 6, 1);
    CHECK(longer.frequency >= est.frequency);

    // A zero time increment can never halve a positive diameter.
    const auto still = halving_frequency(cfg, basis, 0, 60, 6, 1);
    CHECK(still.frequency == 0.0);
    CHECK(still.usable > 0);

    const auto again = halving_frequency(cfg, basis, 1, 60, 6, 1);
    CHECK(again.successes == est.successes);
    CHECK(again.usable == est.usable);
    CHECK(again.frequency == est.frequency);
    CHECK(again.past_successes == est.past_successes);
}

TEST_CASE("circle hausdorff measures the larger one-sided deviation") {
    const int m = 16;
    const std::vector<int> a{2, 9};
    CHECK(circle_hausdorff(a, a, m) == 0.0);

    CHECK(circle_hausdorff(std::vector<int>{0}, std::vector<int>{8}, m) == 0.5);
    CHECK(circle_hausdorff(std::vector<int>{1}, std::vector<int>{15}, m) == 2.0 / 16);
    CHECK(circle_hausdorff(std::vector<int>{0, 8}, std::vector<int>{0}, m) == 0.5);
    CHECK(circle_hausdorff(std::vector<int>{0, 4, 8, 12},
                           std::vector<int>{2, 6, 10, 14}, m) == 2.0 / 16);

    CHECK_THROWS_AS(circle_hausdorff(std::vector<int>{}, a, m), std::invalid_argument);
    CHECK_THROWS_AS(circle_hausdorff(a, std::vector<int>{}, m), std::invalid_argument);
}

TEST_CASE("two solutions under shared forcing") {
    SUBCASE("identical initial conditions stay at distance zero") {
        const int m = 32;
        const auto basis = cos_sin_basis(m);
        const auto cfg = kicked_config(m, 0.5, 13);
        std::vector<double> psi(m);
        for (int x = 0; x < m; ++x) psi[x] = 0.3 * std::sin(2.0 * M_PI * x / m);

        const auto series =
            two_solution_convergence(cfg, basis, psi, psi, std::vector<std::int64_t>{1, 3, 6});
        for (double d : series.distance) CHECK(d == 0.0);
    }

    SUBCASE("unforced deep wells pin the sets apart at a constant distance") {
        // With no forcing, each source set stays funneled at its own well;
        // growth stops once the inf-convolution cones meet, so the
        // distance is constant from then on.
        const int m = 16;
        const auto basis = cos_sin_basis(m);
        const auto cfg = kicked_config(m, 0.0, 1);
        std::vector<double> psi1(m, 0.0), psi2(m, 0.0);
        psi1[3] = -1000.0;
        psi2[11] = -1000.0;

        const std::vector<std::int64_t> hs{1, 2, 3, 8, 10, 12};
        const auto series = two_solution_convergence(cfg, basis, psi1, psi2, hs);
        REQUIRE(series.distance.size() == hs.size());
        CHECK(series.distance[0] == 4.0 / 16);
        CHECK(series.distance[1] == 5.0 / 16);
        CHECK(series.distance[2] == 6.0 / 16);
        CHECK(series.distance[3] == 7.0 / 16);
        CHECK(series.distance[4] == 7.0 / 16);
        CHECK(series.distance[5] == 7.0 / 16);
    }
}

TEST_CASE("linearized kick dynamics matches closed forms") {
    SUBCASE("zero curvature is exactly neutral") {
        const std::vector<double> curv(20, 0.0);
        const auto r = lyapunov_from_curvatures(curv, 1.0);
        CHECK(r.exponent == 0.0);
        CHECK(r.max_det_error == 0.0);
        CHECK(r.n_kicks == 20);
    }

    SUBCASE("constant curvature converges to the top eigenvalue") {
        // Per-kick matrix [[1 + c dt, dt], [c, 1]] at dt = 1.
        const std::vector<double> plus(500, 10.0);
        const auto rp = lyapunov_from_curvatures(plus, 1.0);
        CHECK(rp.exponent == doctest::Approx(std::log(6.0 + std::sqrt(35.0))).epsilon(0.005));

        const std::vector<double> minus(500, -10.0);
        const auto rm = lyapunov_from_curvatures(minus, 1.0);
        CHECK(rm.exponent == doctest::Approx(std::log(4.0 + std::sqrt(15.0))).epsilon(0.005));

        // Both sit within 15 percent of log |c|, the stiff-kick estimate.
        CHECK(std::fabs(rp.exponent - std::log(10.0)) < 0.15 * std::log(10.0));
        CHECK(std::fabs(rm.exponent - std::log(10.0)) < 0.15 * std::log(10.0));
    }

    SUBCASE("substep time scaling divides the rate") {
        const std::vector<double> curv(1000, 2.0);
        const auto r = lyapunov_from_curvatures(curv, 0.5);
        // One step is [[2, 0.5], [2, 1]]: unimodular, top eigenvalue
        // (3 + sqrt(5)) / 2, and the exponent is per unit time.
        const double expected = std::log((3.0 + std::sqrt(5.0)) / 2.0) / 0.5;
        CHECK(r.exponent == doctest::Approx(expected).epsilon(0.005));
    }

    SUBCASE("inputs are validated") {
        CHECK_THROWS_AS(lyapunov_from_curvatures(std::vector<double>{}, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(lyapunov_from_curvatures(std::vector<double>{1.0}, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("lyapunov along a recovered minimizer is positive with unimodular jacobians") {
    const int m = 256;
    const auto basis = cos_sin_basis(m);
    KickSequence seq(42, {DistKind::UniformBox, 1.0}, {ForcingMode::Kicked, 1}, 2);
    BasisForcing forcing(seq, basis);
    const SolverOptions opt{0.0, 1.0, 2};

    const auto ev = evolve(forcing, 0, 500, opt);
    const auto path = backtrack(ev, 0);
    const auto r = lyapunov_exponent(path, seq, basis, 0);
    CHECK(r.n_kicks == 500);
    CHECK(r.exponent > 1.0);
    CHECK(r.exponent < 6.0);
    CHECK(r.max_det_error <= 1e-12);

    // The path-based entry point is the curvature iteration, nothing more.
    std::vector<double> curv(500);
    for (int k = 0; k < 500; ++k) {
        const auto kick = kick_at(seq, basis, k);
        curv[k] = eval_curvature(kick, basis, path.positions[k]);
    }
    const auto direct = lyapunov_from_curvatures(curv, 1.0);
    CHECK(direct.exponent == r.exponent);
    CHECK(direct.max_det_error == r.max_det_error);

    MinimizerPath stub;
    stub.positions.assign(10, 0);  // nine kicks
    stub.windings.assign(9, 0);
    CHECK_THROWS_AS(lyapunov_exponent(stub, seq, basis, 0), std::invalid_argument);
}

TEST_CASE("separation certificate for the rotated cosine triple") {
    const int m = 256;
    const auto basis = cos_sin_basis(m);
    const auto cands = auto_separation_candidates(basis);
    REQUIRE(cands.size() == 3);

    const auto cert = separation_check(basis, cands);
    REQUIRE(cert.pass);
    CHECK(cert.failure.empty());
    CHECK(cert.grid_size == m);
    REQUIRE(cert.argmax.size() == 3);
    CHECK(cert.argmax[0] == 0);
    CHECK(cert.argmax[1] == 85);
    CHECK(cert.argmax[2] == 171);
    for (int i = 0; i < 3; ++i)
        CHECK(cert.peak[i] == doctest::Approx(cert.argmax[i] / 256.0));
    CHECK(cert.alpha0 == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(cert.alpha == cert.alpha0);

    REQUIRE(cert.J.size() == 3);
    REQUIRE(cert.I.size() == 3);
    int covered = 0;
    for (int i = 0; i < 3; ++i) {
        CHECK(cert.J[i].contains(cert.argmax[i], m));
        CHECK(cert.I[i].contains(cert.argmax[i], m));
        CHECK(cert.I[i].length <= cert.J[i].length);
        covered += cert.J[i].length;
        for (int x = 0; x < m; ++x)
            if (cert.I[i].contains(x, m)) CHECK(cert.J[i].contains(x, m));
    }
    CHECK(covered <= m);
    for (int x = 0; x < m; ++x) {
        int owners = 0;
        for (int i = 0; i < 3; ++i)
            if (cert.J[i].contains(x, m)) ++owners;
        CHECK(owners <= 1);
    }
    // The outer midpoint interval brackets the arc.
    for (int i = 0; i < 3; ++i) CHECK(cert.J[i].b > cert.J[i].a);

    // A requested margin below alpha0 shrinks only the inner arcs.
    const auto tighter = separation_check(basis, cands, 0.1);
    REQUIRE(tighter.pass);
    CHECK(tighter.alpha == 0.1);
    CHECK(tighter.alpha0 == cert.alpha0);
    for (int i = 0; i < 3; ++i) {
        CHECK(tighter.J[i].lo == cert.J[i].lo);
        CHECK(tighter.J[i].hi == cert.J[i].hi);
        CHECK(tighter.I[i].length <= cert.I[i].length);
    }

    // Doubling the grid moves alpha0 by well under a percent.
    const auto basis2 = cos_sin_basis(512);
    const auto cert2 = separation_check(basis2, auto_separation_candidates(basis2));
    REQUIRE(cert2.pass);
    CHECK(std::fabs(cert2.alpha0 - cert.alpha0) < 0.01 * cert.alpha0);
}

TEST_CASE("separation failures come back with reasons") {
    const int m = 128;
    const auto basis = make_fourier_basis({{1, 0.0}, {1, M_PI / 2}, {2, 0.0}}, m);

    SUBCASE("a two-peak candidate has no unique maximum") {
        std::vector<std::vector<double>> cands{
            {0.0, 0.0, 1.0},  // frequency-2 cosine: equal maxima at 0 and m/2
            {std::cos(2.0 * M_PI / 3), std::sin(2.0 * M_PI / 3), 0.0},
            {std::cos(4.0 * M_PI / 3), std::sin(4.0 * M_PI / 3), 0.0},
        };
        const auto cert = separation_check(basis, cands);
        CHECK_FALSE(cert.pass);
        CHECK(cert.failure == "candidate 0 has no unique maximum");
    }

    SUBCASE("coinciding maxima cannot be separated") {
        std::vector<std::vector<double>> cands{
            {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
        const auto cert = separation_check(basis, cands);
        CHECK_FALSE(cert.pass);
        CHECK(cert.failure == "maxima coincide: arcs overlap at every level");
    }

    SUBCASE("asking for more margin than certified fails") {
        const auto cands = auto_separation_candidates(basis);
        const auto cert = separation_check(basis, cands, 0.9);
        CHECK_FALSE(cert.pass);
        CHECK(cert.failure == "requested alpha exceeds alpha0");
    }

    SUBCASE("candidate count and shape are hard errors") {
        std::vector<std::vector<double>> two{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
        CHECK_THROWS_AS(separation_check(basis, two), ConfigError);
        std::vector<std::vector<double>> ragged{
            {1.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
        CHECK_THROWS_AS(separation_check(basis, ragged), ConfigError);
    }
}

TEST_CASE("auto candidates require the frequency-one pair") {
    const auto basis = make_fourier_basis({{2, 0.0}, {1, 0.0}, {1, M_PI / 2}}, 64);
    const auto cands = auto_separation_candidates(basis);
    REQUIRE(cands.size() == 3);
    for (const auto& c : cands) {
        REQUIRE(c.size() == 3);
        CHECK(c[0] == 0.0);  // the frequency-2 mode stays unused
    }
    CHECK(cands[0][1] == 1.0);
    CHECK(cands[0][2] == 0.0);
    CHECK(cands[1][1] == doctest::Approx(-0.5));
    CHECK(cands[1][2] == doctest::Approx(std::sqrt(3.0) / 2));
    CHECK(cands[2][2] == doctest::Approx(-std::sqrt(3.0) / 2));

    const auto lopsided = make_fourier_basis({{1, 0.0}, {2, 0.0}}, 64);
    CHECK_THROWS_AS(auto_separation_candidates(lopsided), ConfigError);
}

TEST_CASE("proof constants reproduce the worked scaling") {
    const int m = 256;
    const auto basis = cos_sin_basis(m);

    // Unit C^1 norm: amplitude 1 / (1 + 2 pi) makes sup|F| + sup|F'| = 1,
    // so C = 6 and the margin lands on 1 / (10 C) = 1/60 exactly.
    const double a = 1.0 / (1.0 + 2.0 * M_PI);
    auto cands = auto_separation_candidates(basis);
    for (auto& c : cands)
        for (auto& v : c) v *= a;
    const auto cert = separation_check(basis, cands);
    REQUIRE(cert.pass);

    const auto pc = proof_constants(cert, basis);
    CHECK(pc.c1_norm_max == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pc.C == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(pc.alpha == doctest::Approx(1.0 / 60).epsilon(1e-12));
    CHECK(pc.n_prime == 216003);

    // n_big sits strictly inside (2 / alpha^10 + 1, 4 / alpha^10); at
    // alpha = 1/60 both ends still fit in 64 bits.
    const long long nb = std::stoll(pc.n_big);
    CHECK(nb > 1209323520000000001LL);
    CHECK(nb < 2418647040000000000LL);

    // White-mode margin folds in the drift factor 1 / (10 (b + 1)^2).
    const auto white = proof_constants(cert, basis, ForcingMode::White, 3.0);
    CHECK(white.alpha == doctest::Approx(1.0 / 160).epsilon(1e-12));

    // The full-amplitude triple lands away from the worked scale but the
    // intervals stay honest.
    const auto raw = separation_check(basis, auto_separation_candidates(basis));
    REQUIRE(raw.pass);
    const auto pc2 = proof_constants(raw, basis);
    CHECK(pc2.alpha < 1.0 / 30);
    CHECK(pc2.alpha > 0.0);
    CHECK(static_cast<double>(pc2.n_prime) > std::pow(pc2.alpha, -3.0));
    CHECK(static_cast<double>(pc2.n_prime) < 2.0 * std::pow(pc2.alpha, -3.0));
    REQUIRE(!pc2.n_big.empty());
    const double nb2 = std::stod(pc2.n_big);
    CHECK(nb2 > 2.0 * std::pow(pc2.alpha, -10.0));
    CHECK(nb2 < 4.0 * std::pow(pc2.alpha, -10.0));
}

TEST_CASE("proof constants reject bad inputs") {
    const auto basis = cos_sin_basis(64);

    SeparationCertificate cert;
    cert.pass = false;
    cert.grid_size = 64;
    CHECK_THROWS_AS(proof_constants(cert, basis), ConfigError);

    cert.pass = true;
    cert.grid_size = 32;
    CHECK_THROWS_AS(proof_constants(cert, basis), ConfigError);

    // A zero potential gives C = 3 and alpha = 1/30, outside the range.
    cert.grid_size = 64;
    cert.alpha0 = 0.5;
    cert.coefficients = {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(proof_constants(cert, basis), NumericError);

    // Amplitudes around fifty push 4 / alpha^10 past 128 bits.
    cert.coefficients = {{50.0, 0.0}, {0.0, 50.0}, {50.0, 0.0}};
    CHECK_THROWS_AS(proof_constants(cert, basis), NumericError);

    // Much larger ones would overflow N' itself.
    cert.coefficients = {{1e5, 0.0}, {0.0, 1e5}, {1e5, 0.0}};
    CHECK_THROWS_AS(proof_constants(cert, basis), NumericError);
}

TEST_CASE("event probability matches the coefficient-disk area") {
    const auto basis = cos_sin_basis(256);
    const Distribution dist{DistKind::UniformBox, 1.0};

    // sup |c1 cos + c2 sin| <= eps cuts the disk of radius eps from the
    // coefficient square, so one kick succeeds with pi eps^2 / 4 sigma^2.
    const auto est = event_probability(basis, dist, 0.5, 1, 20000, 1234);
    CHECK(est.n_samples == 20000);
    CHECK(est.successes > 0);
    const double analytic = M_PI * 0.25 / 4.0;
    CHECK(std::fabs(est.probability - analytic) <= 3.0 * est.half_width);

    // eps beyond sqrt(2) sigma is certain; eps = 0 is null.
    const auto sure = event_probability(basis, dist, 1.5, 3, 500, 1);
    CHECK(sure.probability == 1.0);
    CHECK(sure.successes == 500);
    CHECK(sure.half_width == 0.0);
    const auto null = event_probability(basis, dist, 0.0, 2, 500, 1);
    CHECK(null.probability == 0.0);
    CHECK(null.successes == 0);

    // More consecutive quiet kicks are strictly rarer.
    const auto two = event_probability(basis, dist, 0.5, 2, 20000, 1234);
    CHECK(two.probability < est.probability);

    CHECK_THROWS_AS(event_probability(basis, dist, -0.1, 1, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(event_probability(basis, dist, 0.5, 0, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(event_probability(basis, dist, 0.5, 1, 0, 1),
                    std::invalid_argument);
}
