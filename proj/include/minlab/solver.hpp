#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "minlab/errors.hpp"
#include "minlab/forcing.hpp"

namespace minlab {

/// Sentinel for "no admissible path"; large enough to lose every
/// comparison yet stay far from overflow under repeated addition.
inline constexpr double kValueInfinity = 1e15;

struct SolverOptions {
    /// Mean drift of the free motion (effective modulo 1 on the circle).
    double drift = 0.0;
    /// Time between consecutive kicks (1 for kicked forcing, 1/P for white
    /// forcing with P substeps).
    double dt = 1.0;
    /// Windings examined per segment: w in [-winding_bound, winding_bound].
    int winding_bound = 2;
};

struct KineticResult {
    double cost = 0.0;
    int winding = 0;
};

/// Cost (delta + w - drift*dt)^2 / (2*dt) of one lifted segment; the exact
/// expression every kinetic table entry is built from, exported so exact
/// tie scans elsewhere reproduce identical doubles.
double lifted_segment_cost(double delta, int w, double drift, double dt);

/// Cheapest free motion from grid point i_from to i_to over time dt:
/// min over w in [-W, W] of (delta + w - drift*dt)^2 / (2*dt) with
/// delta = ((i_to - i_from) mod M) / M in [0, 1).
///
/// Ties keep the smallest winding. Throws NumericError when the minimum
/// is attained only at |w| = W: the bound truncated the search.
KineticResult kinetic(int i_from, int i_to, int grid_size, double drift, double dt,
                      int winding_bound);

inline double kinetic_cost(int i_from, int i_to, int grid_size, double drift, double dt,
                           int winding_bound) {
    return kinetic(i_from, i_to, grid_size, drift, dt, winding_bound).cost;
}

/// Tables over the displacement d = (i_to - i_from) mod M; the segment
/// cost depends on the endpoints only through d.
std::vector<double> kinetic_table(int grid_size, double drift, double dt,
                                  int winding_bound);
std::vector<int> winding_table(int grid_size, double drift, double dt,
                               int winding_bound);

/// Backward-constructed minimum-action table on the grid.
///
/// Row n holds phi_n(x) = min over grid paths from start_time to
/// start_time + n ending at x of
///   psi(path start) + sum of segment kinetic costs
///                   - kick energies collected at the departure times,
/// with no kick at the final time (half-open time sum). Row 0 is psi.
class ValueEvolution {
public:
    ValueEvolution(int grid_size, int steps, std::int64_t start_time);

    int grid_size() const { return grid_size_; }
    int steps() const { return steps_; }
    std::int64_t start_time() const { return start_time_; }
    std::int64_t end_time() const { return start_time_ + steps_; }

    double value(int step, int i) const { return values_[row(step) + i]; }
    std::span<const double> value_row(int step) const {
        return {values_.data() + row(step), static_cast<std::size_t>(grid_size_)};
    }

    /// Source grid point of the optimal final segment into (step, i);
    /// defined for step in [1, steps].
    int parent(int step, int i) const { return parents_[row(step - 1) + i]; }
    /// Winding of that segment.
    int parent_winding(int step, int i) const { return windings_[row(step - 1) + i]; }

    /// Kick energies F(start_time + step)(x_i) collected while evolving;
    /// step in [0, steps). Kept so provenance scans can re-rank exact ties.
    double kick_energy(int step, int i) const { return kicks_[row(step) + i]; }
    std::span<const double> kick_row(int step) const {
        return {kicks_.data() + row(step), static_cast<std::size_t>(grid_size_)};
    }

    const SolverOptions& options() const { return options_; }
    void set_options(const SolverOptions& options) { options_ = options; }

    void set_value(int step, int i, double v) { values_[row(step) + i] = v; }
    void set_parent(int step, int i, int p, int w) {
        parents_[row(step - 1) + i] = p;
        windings_[row(step - 1) + i] = w;
    }
    void set_kick(int step, int i, double f) { kicks_[row(step) + i] = f; }

private:
    std::size_t row(int step) const {
        return static_cast<std::size_t>(step) * grid_size_;
    }

    int grid_size_;
    int steps_;
    std::int64_t start_time_;
    SolverOptions options_;
    std::vector<double> values_;  // (steps + 1) x M
    std::vector<int> parents_;    // steps x M
    std::vector<int> windings_;   // steps x M
    std::vector<double> kicks_;   // steps x M
};

/// One dynamic-programming transition:
///   phi_next[x] = min over y of (phi[y] - kick[y]) + kin[(x - y) mod M].
/// Ties keep the smallest source y; segment windings come from
/// winding_table. Outputs must be sized M.
void lax_oleinik_step(std::span<const double> phi, std::span<const double> kick,
                      std::span<const double> kin, std::span<const int> wind,
                      std::span<double> phi_next, std::span<int> backptr,
                      std::span<int> winding);

/// Runs the dynamic programming over `steps` kicks starting at time
/// `start_time`: kicks are collected at start_time, ..., start_time +
/// steps - 1 and the final time receives none. Row 0 is psi when given,
/// zero otherwise.
ValueEvolution evolve(const ForcingField& forcing, std::int64_t start_time, int steps,
                      const SolverOptions& options,
                      std::span<const double> psi = {});

/// One minimizing discrete path recovered from the back-pointers,
/// positions[n] for n = 0..steps with positions[steps] = terminal.
struct MinimizerPath {
    std::vector<int> positions;
    std::vector<int> windings;
    double action = 0.0;

    int terminal() const { return positions.back(); }
};

MinimizerPath backtrack(const ValueEvolution& ev, int terminal);

/// Action of an explicit path under the same forcing and association
/// order as evolve(); used to cross-check recovered minimizers.
double path_action(const ForcingField& forcing, std::int64_t start_time,
                   std::span<const int> positions, std::span<const int> windings,
                   const SolverOptions& options, std::span<const double> psi = {});

}  // namespace minlab
