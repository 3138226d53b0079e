#include "minlab/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

// Reference implementation built straight from the action definition: walk
// every sequence of grid points, pay (delta + w - b*dt)^2/(2*dt) per
// segment minimized over the winding w, collect the kick energy at each
// departure. Deliberately free of solver machinery so the two sides can
// disagree.

namespace minlab::oracle {
namespace {

struct SegmentTable {
    std::vector<double> cost;  // per displacement d = 0..M-1
    std::vector<int> winding;  // smallest winding attaining the cost
    std::vector<int> winding_max;  // largest winding attaining the cost
};

SegmentTable build_segments(int m, const SolverOptions& options) {
    SegmentTable table;
    table.cost.resize(m);
    table.winding.resize(m);
    table.winding_max.resize(m);
    const int bound = options.winding_bound;
    for (int d = 0; d < m; ++d) {
        const double delta = static_cast<double>(d) / m;
        double best = 0.0;
        int best_w = 0;
        bool first = true;
        for (int w = -bound; w <= bound; ++w) {
            const double v = delta + w - options.drift * options.dt;
            const double c = v * v / (2.0 * options.dt);
            if (first || c < best) {
                best = c;
                best_w = w;
                first = false;
            }
        }
        int w_max = best_w;
        bool interior = false;
        for (int w = -bound; w <= bound; ++w) {
            const double v = delta + w - options.drift * options.dt;
            if (v * v / (2.0 * options.dt) == best) {
                w_max = w;
                if (std::abs(w) < bound) interior = true;
            }
        }
        if (!interior)
            throw NumericError("winding bound too small for displacement " +
                               std::to_string(d));
        table.cost[d] = best;
        table.winding[d] = best_w;
        table.winding_max[d] = w_max;
    }
    return table;
}

struct Enumerator {
    int m;
    int steps;
    SegmentTable seg;
    std::vector<std::vector<double>> kicks;  // [row][point], rows 0..steps-1

    PathEnumeration out;
    std::vector<int> current;    // positions along the walk
    std::vector<double> action;  // running action at each row

    /// True when the current path beats the stored one for its terminal:
    /// smaller source sequence read from the terminal downwards.
    bool lex_smaller_from_top(int terminal) const {
        const auto& stored = out.positions[terminal];
        for (int row = steps - 1; row >= 0; --row) {
            if (current[row] != stored[row]) return current[row] < stored[row];
        }
        return false;
    }

    void record_leaf() {
        const int terminal = current[steps];
        const double a = action[steps];
        auto& best = out.values[terminal];
        if (a > best) return;
        const bool strict = a < best;
        auto& lo = out.min_lift[terminal];
        auto& hi = out.max_lift[terminal];
        if (strict) {
            best = a;
            lo.assign(steps + 1, terminal);
            hi.assign(steps + 1, terminal);
        }
        // Lifts anchored at the terminal; tied windings per segment widen
        // the reachable lift range of every earlier row.
        long tail_min = 0, tail_max = 0;
        for (int row = steps - 1; row >= 0; --row) {
            const int diff = current[row + 1] - current[row];
            const int d = diff < 0 ? diff + m : diff;
            tail_min += d + static_cast<long>(seg.winding[d]) * m;
            tail_max += d + static_cast<long>(seg.winding_max[d]) * m;
            lo[row] = strict ? terminal - tail_max
                             : std::min(lo[row], terminal - tail_max);
            hi[row] = strict ? terminal - tail_min
                             : std::max(hi[row], terminal - tail_min);
        }
        if (strict || lex_smaller_from_top(terminal)) {
            out.positions[terminal] = current;
            for (int row = 0; row < steps; ++row) {
                const int diff = current[row + 1] - current[row];
                const int d = diff < 0 ? diff + m : diff;
                out.windings[terminal][row] = seg.winding[d];
            }
        }
    }

    void walk(int row) {
        if (row == steps) {
            record_leaf();
            return;
        }
        const int from = current[row];
        const double depart = action[row] - kicks[row][from];
        for (int to = 0; to < m; ++to) {
            const int d = to - from < 0 ? to - from + m : to - from;
            current[row + 1] = to;
            action[row + 1] = depart + seg.cost[d];
            walk(row + 1);
        }
    }
};

}  // namespace

PathEnumeration enumerate_paths(const ForcingField& forcing, std::int64_t start_time,
                                int steps, const SolverOptions& options,
                                std::span<const double> psi) {
    const int m = forcing.grid_size();
    if (steps < 0) throw ConfigError("step count must be non-negative");
    if (!psi.empty() && static_cast<int>(psi.size()) != m)
        throw std::invalid_argument("psi must have one value per grid point");

    Enumerator e;
    e.m = m;
    e.steps = steps;
    e.seg = build_segments(m, options);
    e.kicks.assign(steps, std::vector<double>(m));
    for (int row = 0; row < steps; ++row)
        forcing.kick_values(start_time + row, e.kicks[row]);

    e.out.values.assign(m, kValueInfinity);
    e.out.positions.assign(m, std::vector<int>(steps + 1, 0));
    e.out.windings.assign(m, std::vector<int>(std::max(steps, 0), 0));
    e.out.min_lift.assign(m, std::vector<long>(steps + 1, 0));
    e.out.max_lift.assign(m, std::vector<long>(steps + 1, 0));

    e.current.assign(steps + 1, 0);
    e.action.assign(steps + 1, 0.0);

    for (int start = 0; start < m; ++start) {
        e.current[0] = start;
        e.action[0] = psi.empty() ? 0.0 : psi[start];
        e.walk(0);
    }
    return e.out;
}

}  // namespace minlab::oracle
