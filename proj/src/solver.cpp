#include "minlab/solver.hpp"

#include <cmath>
#include <string>

namespace minlab {
namespace {

void validate(int grid_size, double dt, int winding_bound) {
    if (grid_size < 2) throw ConfigError("grid size must be at least 2");
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (winding_bound < 1) throw ConfigError("winding bound must be at least 1");
}

/// Cost of the lifted segment delta + w traversed in time dt.
double segment_cost(double delta, int w, double drift, double dt) {
    const double v = delta + w - drift * dt;
    return v * v / (2.0 * dt);
}

/// Minimum over w in [-W, W]; ties keep the smallest winding. Errors when
/// the bound truncated the search: the minimum sits at |w| = W and no
/// interior winding attains it.
KineticResult best_segment(double delta, double drift, double dt, int winding_bound) {
    KineticResult best{segment_cost(delta, -winding_bound, drift, dt), -winding_bound};
    for (int w = -winding_bound + 1; w <= winding_bound; ++w) {
        const double c = segment_cost(delta, w, drift, dt);
        if (c < best.cost) best = {c, w};
    }
    if (std::abs(best.winding) == winding_bound) {
        bool interior_hit = false;
        for (int w = -winding_bound + 1; w < winding_bound; ++w)
            if (segment_cost(delta, w, drift, dt) == best.cost) {
                interior_hit = true;
                break;
            }
        if (!interior_hit)
            throw NumericError("winding bound " + std::to_string(winding_bound) +
                               " truncates the kinetic minimum (drift " +
                               std::to_string(drift) + ")");
    }
    return best;
}

}  // namespace

double lifted_segment_cost(double delta, int w, double drift, double dt) {
    return segment_cost(delta, w, drift, dt);
}

KineticResult kinetic(int i_from, int i_to, int grid_size, double drift, double dt,
                      int winding_bound) {
    validate(grid_size, dt, winding_bound);
    const int d = ((i_to - i_from) % grid_size + grid_size) % grid_size;
    const double delta = static_cast<double>(d) / grid_size;
    return best_segment(delta, drift, dt, winding_bound);
}

std::vector<double> kinetic_table(int grid_size, double drift, double dt,
                                  int winding_bound) {
    validate(grid_size, dt, winding_bound);
    std::vector<double> table(grid_size);
    for (int d = 0; d < grid_size; ++d) {
        const double delta = static_cast<double>(d) / grid_size;
        table[d] = best_segment(delta, drift, dt, winding_bound).cost;
    }
    return table;
}

std::vector<int> winding_table(int grid_size, double drift, double dt,
                               int winding_bound) {
    validate(grid_size, dt, winding_bound);
    std::vector<int> table(grid_size);
    for (int d = 0; d < grid_size; ++d) {
        const double delta = static_cast<double>(d) / grid_size;
        table[d] = best_segment(delta, drift, dt, winding_bound).winding;
    }
    return table;
}

ValueEvolution::ValueEvolution(int grid_size, int steps, std::int64_t start_time)
    : grid_size_(grid_size), steps_(steps), start_time_(start_time) {
    if (grid_size < 2) throw ConfigError("grid size must be at least 2");
    if (steps < 0) throw ConfigError("step count must be non-negative");
    const auto m = static_cast<std::size_t>(grid_size);
    values_.assign((steps + 1) * m, 0.0);
    parents_.assign(steps * m, 0);
    windings_.assign(steps * m, 0);
    kicks_.assign(steps * m, 0.0);
}

void lax_oleinik_step(std::span<const double> phi, std::span<const double> kick,
                      std::span<const double> kin, std::span<const int> wind,
                      std::span<double> phi_next, std::span<int> backptr,
                      std::span<int> winding) {
    const int m = static_cast<int>(phi.size());
    if (kick.size() != phi.size() || kin.size() != phi.size() ||
        wind.size() != phi.size() || phi_next.size() != phi.size() ||
        backptr.size() != phi.size() || winding.size() != phi.size())
        throw std::invalid_argument("lax_oleinik_step tables must all have size M");

    std::vector<double> departure(m);
    for (int y = 0; y < m; ++y) departure[y] = phi[y] - kick[y];

    for (int x = 0; x < m; ++x) {
        // Ascending source scan with strict improvement keeps the smallest
        // y on exact ties; windings inherit the per-segment smallest-w rule
        // from the table.
        double best = kValueInfinity;
        int best_y = 0;
        for (int y = 0; y < m; ++y) {
            const int d = x - y < 0 ? x - y + m : x - y;
            const double cand = departure[y] + kin[d];
            if (cand < best) {
                best = cand;
                best_y = y;
            }
        }
        const int d = x - best_y < 0 ? x - best_y + m : x - best_y;
        phi_next[x] = best;
        backptr[x] = best_y;
        winding[x] = wind[d];
    }
}

ValueEvolution evolve(const ForcingField& forcing, std::int64_t start_time, int steps,
                      const SolverOptions& options, std::span<const double> psi) {
    const int m = forcing.grid_size();
    validate(m, options.dt, options.winding_bound);
    if (!psi.empty() && static_cast<int>(psi.size()) != m)
        throw std::invalid_argument("psi must have one value per grid point");

    ValueEvolution ev(m, steps, start_time);
    ev.set_options(options);
    for (int i = 0; i < m; ++i) ev.set_value(0, i, psi.empty() ? 0.0 : psi[i]);
    if (steps == 0) return ev;

    const auto kin = kinetic_table(m, options.drift, options.dt, options.winding_bound);
    const auto wind = winding_table(m, options.drift, options.dt, options.winding_bound);

    std::vector<double> kick(m);
    std::vector<double> phi_next(m);
    std::vector<int> backptr(m);
    std::vector<int> winding(m);

    for (int n = 0; n < steps; ++n) {
        forcing.kick_values(start_time + n, kick);
        for (int y = 0; y < m; ++y) {
            if (!std::isfinite(kick[y]))
                throw NumericError("non-finite kick energy at time " +
                                   std::to_string(start_time + n));
            ev.set_kick(n, y, kick[y]);
        }
        lax_oleinik_step(ev.value_row(n), kick, kin, wind, phi_next, backptr, winding);
        for (int x = 0; x < m; ++x) {
            ev.set_value(n + 1, x, phi_next[x]);
            ev.set_parent(n + 1, x, backptr[x], winding[x]);
        }
    }
    return ev;
}

MinimizerPath backtrack(const ValueEvolution& ev, int terminal) {
    if (terminal < 0 || terminal >= ev.grid_size())
        throw std::out_of_range("terminal index outside the grid");
    const int steps = ev.steps();
    MinimizerPath path;
    path.positions.resize(steps + 1);
    path.windings.resize(steps);
    path.action = ev.value(steps, terminal);
    path.positions[steps] = terminal;
    for (int n = steps; n >= 1; --n) {
        path.positions[n - 1] = ev.parent(n, path.positions[n]);
        path.windings[n - 1] = ev.parent_winding(n, path.positions[n]);
    }
    return path;
}

double path_action(const ForcingField& forcing, std::int64_t start_time,
                   std::span<const int> positions, std::span<const int> windings,
                   const SolverOptions& options, std::span<const double> psi) {
    const int m = forcing.grid_size();
    validate(m, options.dt, options.winding_bound);
    if (positions.size() != windings.size() + 1)
        throw std::invalid_argument("path needs one more position than windings");
    if (!psi.empty() && static_cast<int>(psi.size()) != m)
        throw std::invalid_argument("psi must have one value per grid point");

    std::vector<double> kick(m);
    double action = psi.empty() ? 0.0 : psi[positions[0]];
    for (std::size_t n = 0; n < windings.size(); ++n) {
        forcing.kick_values(start_time + static_cast<std::int64_t>(n), kick);
        const int d = ((positions[n + 1] - positions[n]) % m + m) % m;
        const double delta = static_cast<double>(d) / m;
        // Same association order as the table recursion: subtract the kick,
        // then add the segment cost.
        action = (action - kick[positions[n]]) +
                 segment_cost(delta, windings[n], options.drift, options.dt);
    }
    return action;
}

}  // namespace minlab
