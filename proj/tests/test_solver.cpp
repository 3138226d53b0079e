#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "minlab/forcing.hpp"
#include "minlab/oracle.hpp"
#include "minlab/solver.hpp"

using namespace minlab;

namespace {

BasisForcing random_forcing(std::uint64_t seed, int m, double sigma = 1.0) {
    static std::vector<std::unique_ptr<PotentialBasis>> keep;
    keep.push_back(std::make_unique<PotentialBasis>(
        make_fourier_basis({{1, 0.0}, {1, M_PI / 2.0}}, m)));
    return {KickSequence(seed, {DistKind::UniformBox, sigma}, {ForcingMode::Kicked, 1}, 2),
            *keep.back()};
}

}  // namespace

TEST_CASE("kinetic cost of staying put is zero") {
    const auto r = kinetic(3, 3, 16, 0.0, 1.0, 2);
    CHECK(r.cost == 0.0);
    CHECK(r.winding == 0);
}

TEST_CASE("half-turn ties resolve to the smaller winding") {
    const auto r = kinetic(0, 8, 16, 0.0, 1.0, 1);
    CHECK(r.cost == doctest::Approx(0.125));
    CHECK(r.winding == -1);
}

TEST_CASE("unit drift is absorbed by one winding") {
    const auto r = kinetic(5, 5, 16, 1.0, 1.0, 2);
    CHECK(r.cost == 0.0);
    CHECK(r.winding == 1);
}

TEST_CASE("too small a winding bound is an error") {
    CHECK_THROWS_AS(kinetic(0, 0, 16, 5.0, 1.0, 2), NumericError);
    CHECK_THROWS_AS(kinetic_table(16, -4.0, 1.0, 2), NumericError);
}

TEST_CASE("kinetic tables agree with pointwise queries") {
    const auto costs = kinetic_table(32, 0.7, 0.5, 3);
    const auto winds = winding_table(32, 0.7, 0.5, 3);
    for (int d = 0; d < 32; ++d) {
        const auto r = kinetic(0, d, 32, 0.7, 0.5, 3);
        CHECK(costs[d] == r.cost);
        CHECK(winds[d] == r.winding);
    }
}

TEST_CASE("a constant row with zero kick is a fixed point of the step") {
    const int m = 16;
    std::vector<double> phi(m, 2.5), kick(m, 0.0), phi_next(m);
    std::vector<int> backptr(m), winding(m);
    const auto kin = kinetic_table(m, 0.0, 1.0, 2);
    const auto wind = winding_table(m, 0.0, 1.0, 2);
    lax_oleinik_step(phi, kick, kin, wind, phi_next, backptr, winding);
    for (int x = 0; x < m; ++x) {
        CHECK(phi_next[x] == 2.5);
        CHECK(backptr[x] == x);
        CHECK(winding[x] == 0);
    }
}

TEST_CASE("a point source spreads by the pure kinetic cost") {
    const int m = 8;
    std::vector<double> phi(m, kValueInfinity), kick(m, 0.0), phi_next(m);
    std::vector<int> backptr(m), winding(m);
    phi[0] = 0.0;
    const auto kin = kinetic_table(m, 0.0, 1.0, 2);
    const auto wind = winding_table(m, 0.0, 1.0, 2);
    lax_oleinik_step(phi, kick, kin, wind, phi_next, backptr, winding);
    for (int x = 0; x < m; ++x) {
        double expect = kValueInfinity;
        for (int w = -2; w <= 2; ++w) {
            const double v = static_cast<double>(x) / m + w;
            expect = std::min(expect, v * v / 2.0);
        }
        CHECK(phi_next[x] == doctest::Approx(expect).epsilon(1e-14));
        CHECK(backptr[x] == 0);
    }
}

TEST_CASE("a deep well pulls every transition toward its bottom") {
    const int m = 32;
    const auto basis = make_fourier_basis({{1, 0.0}}, m);
    std::vector<double> phi(m, 0.0), kick(m), phi_next(m);
    std::vector<int> backptr(m), winding(m);
    // F(y) = 10 cos 2pi y enters as -F: the bottom sits at y = 0.
    for (int y = 0; y < m; ++y) kick[y] = 10.0 * basis.value(0, y);
    const auto kin = kinetic_table(m, 0.0, 1.0, 2);
    const auto wind = winding_table(m, 0.0, 1.0, 2);
    lax_oleinik_step(phi, kick, kin, wind, phi_next, backptr, winding);

    for (int x = 0; x < m; ++x) {
        // Independent scan of the full transition table.
        double best = kValueInfinity;
        int best_y = -1;
        for (int y = 0; y < m; ++y) {
            for (int w = -2; w <= 2; ++w) {
                const int d = (x - y + m) % m;
                const double v = static_cast<double>(d) / m + w;
                const double cand = (phi[y] - kick[y]) + v * v / 2.0;
                if (cand < best) {
                    best = cand;
                    best_y = y;
                }
            }
        }
        CHECK(backptr[x] == best_y);
        CHECK(phi_next[x] == doctest::Approx(best).epsilon(1e-14));
        // The well is strong enough that every point within a quarter turn
        // of the bottom feeds from the bottom itself.
        const int circle = std::min(x, m - x);
        if (circle <= m / 4) CHECK(backptr[x] == 0);
    }
}

TEST_CASE("zero steps return psi unchanged") {
    const ZeroForcing forcing(16);
    std::vector<double> psi(16);
    for (int i = 0; i < 16; ++i) psi[i] = 0.1 * i;
    const auto ev = evolve(forcing, 3, 0, {}, psi);
    CHECK(ev.steps() == 0);
    CHECK(ev.start_time() == 3);
    for (int i = 0; i < 16; ++i) CHECK(ev.value(0, i) == psi[i]);
}

TEST_CASE("zero forcing keeps the value identically zero") {
    const ZeroForcing forcing(16);
    const auto ev = evolve(forcing, 0, 5, {});
    for (int n = 0; n <= 5; ++n)
        for (int i = 0; i < 16; ++i) CHECK(ev.value(n, i) == 0.0);
    const auto path = backtrack(ev, 7);
    for (const int p : path.positions) CHECK(p == 7);
    for (const int w : path.windings) CHECK(w == 0);
}

TEST_CASE("value table equals exhaustive enumeration on a small grid") {
    for (const std::uint64_t seed : {11u, 12u, 13u}) {
        const auto forcing = random_forcing(seed, 12);
        const SolverOptions opt{0.0, 1.0, 2};
        const auto ev = evolve(forcing, 0, 3, opt);
        const auto ref = oracle::enumerate_paths(forcing, 0, 3, opt);
        for (int x = 0; x < 12; ++x) {
            CHECK(ev.value(3, x) ==
                  doctest::Approx(ref.values[x]).epsilon(1e-12));
            const auto path = backtrack(ev, x);
            CHECK(path.positions == ref.positions[x]);
            CHECK(path.windings == ref.windings[x]);
        }
    }
}

TEST_CASE("backtracked paths rescore to the table value") {
    const auto forcing = random_forcing(99, 24);
    const SolverOptions opt{0.25, 1.0, 2};
    const auto ev = evolve(forcing, 0, 6, opt);
    for (int x = 0; x < 24; ++x) {
        const auto path = backtrack(ev, x);
        const double direct = path_action(forcing, 0, path.positions, path.windings, opt);
        CHECK(direct == doctest::Approx(ev.value(6, x)).epsilon(1e-12));
        CHECK(path.terminal() == x);
    }
}

TEST_CASE("one-step paths are just the backpointer pair") {
    const auto forcing = random_forcing(5, 16);
    const auto ev = evolve(forcing, 0, 1, {});
    for (int x = 0; x < 16; ++x) {
        const auto path = backtrack(ev, x);
        REQUIRE(path.positions.size() == 2);
        CHECK(path.positions[0] == ev.parent(1, x));
        CHECK(path.positions[1] == x);
    }
}

TEST_CASE("path action evaluates explicit paths") {
    const ZeroForcing forcing(16);
    const std::vector<int> constant{4, 4, 4};
    const std::vector<int> windings{0, 0};
    CHECK(path_action(forcing, 0, constant, windings, {}) == 0.0);

    const std::vector<int> half{0, 8};
    const std::vector<int> w0{0};
    CHECK(path_action(forcing, 0, half, w0, {}) == doctest::Approx(0.125));
}

TEST_CASE("drift enters the value tables modulo one") {
    const int m = 16;
    const auto forcing = random_forcing(31, m);
    const SolverOptions low{0.3, 1.0, 3};
    const SolverOptions high{1.3, 1.0, 3};
    const auto ev_low = evolve(forcing, 0, 4, low);
    const auto ev_high = evolve(forcing, 0, 4, high);

    double min_low = kValueInfinity, min_high = kValueInfinity;
    for (int x = 0; x < m; ++x) {
        min_low = std::min(min_low, ev_low.value(4, x));
        min_high = std::min(min_high, ev_high.value(4, x));
    }
    CHECK(min_low == doctest::Approx(min_high).epsilon(1e-10));

    // Same sources, windings shifted by exactly one turn per step.
    for (int n = 1; n <= 4; ++n)
        for (int x = 0; x < m; ++x) {
            CHECK(ev_low.parent(n, x) == ev_high.parent(n, x));
            CHECK(ev_low.parent_winding(n, x) + 1 == ev_high.parent_winding(n, x));
        }
}

TEST_CASE("splitting an evolution at any time and chaining is exact") {
    const auto forcing = random_forcing(47, 20);
    const SolverOptions opt{0.1, 1.0, 2};
    const auto full = evolve(forcing, 10, 5, opt);

    const auto head = evolve(forcing, 10, 3, opt);
    const auto tail = evolve(forcing, 13, 2, opt, head.value_row(3));
    for (int i = 0; i < 20; ++i) CHECK(tail.value(2, i) == full.value(5, i));
}

TEST_CASE("lifted backpointers never cross") {
    for (const std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const int m = 24;
        const auto forcing = random_forcing(seed, m);
        const auto ev = evolve(forcing, 0, 8, {});
        for (int n = 1; n <= 8; ++n) {
            std::vector<long> lifted(m);
            for (int x = 0; x < m; ++x) {
                const int y = ev.parent(n, x);
                const int d = (x - y + m) % m;
                lifted[x] = x - (d + static_cast<long>(ev.parent_winding(n, x)) * m);
            }
            for (int x = 0; x + 1 < m; ++x) CHECK(lifted[x] <= lifted[x + 1]);
            CHECK(lifted[m - 1] <= lifted[0] + m);
        }
    }
}

TEST_CASE("staying put bounds the next value row") {
    const auto forcing = random_forcing(8, 16);
    const SolverOptions opt{0.0, 1.0, 2};
    const auto ev = evolve(forcing, 0, 6, opt);
    const double stay = kinetic_cost(0, 0, 16, 0.0, 1.0, 2);
    for (int n = 0; n < 6; ++n)
        for (int x = 0; x < 16; ++x)
            CHECK(ev.value(n + 1, x) <= ev.value(n, x) - ev.kick_energy(n, x) + stay);
}

TEST_CASE("solver rejects invalid setups") {
    const ZeroForcing forcing(16);
    CHECK_THROWS_AS(evolve(forcing, 0, -1, {}), ConfigError);
    CHECK_THROWS_AS(evolve(forcing, 0, 1, SolverOptions{0.0, 0.0, 2}), ConfigError);
    CHECK_THROWS_AS(evolve(forcing, 0, 1, SolverOptions{0.0, 1.0, 0}), ConfigError);
    std::vector<double> bad_psi(7, 0.0);
    CHECK_THROWS_AS(evolve(forcing, 0, 1, {}, bad_psi), std::invalid_argument);
    const auto ev = evolve(forcing, 0, 1, {});
    CHECK_THROWS_AS(backtrack(ev, 16), std::out_of_range);
}
