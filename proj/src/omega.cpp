#include "minlab/omega.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace minlab {
namespace {

struct Segment {
    int parent = 0;
    int winding = 0;
};

long floordiv(long a, long b) {
    long q = a / b;
    if (a % b != 0 && (a < 0) != (b < 0)) --q;
    return q;
}

/// Optimal source of (row, z) under an extreme tie rule: among the exact
/// minimizers of the transition into z, Leftmost takes the largest lifted
/// displacement (source furthest left), Rightmost the smallest.
Segment extreme_parent(const ValueEvolution& ev, int row, int z, TieRule rule) {
    const int m = ev.grid_size();
    const auto& opt = ev.options();
    const double target = ev.value(row, z);
    bool found = false;
    Segment best;
    long best_lift = 0;
    for (int y = 0; y < m; ++y) {
        const double dep = ev.value(row - 1, y) - ev.kick_energy(row - 1, y);
        const int d = z - y < 0 ? z - y + m : z - y;
        const double delta = static_cast<double>(d) / m;
        for (int w = -opt.winding_bound; w <= opt.winding_bound; ++w) {
            if (dep + lifted_segment_cost(delta, w, opt.drift, opt.dt) != target)
                continue;
            const long lift = d + static_cast<long>(w) * m;
            if (!found || (rule == TieRule::Leftmost ? lift > best_lift
                                                     : lift < best_lift)) {
                found = true;
                best = {y, w};
                best_lift = lift;
            }
        }
    }
    if (!found)
        throw NumericError("tie scan found no optimal source at row " +
                           std::to_string(row));
    return best;
}

Segment step_parent(const ValueEvolution& ev, int row, int z, TieRule rule) {
    if (rule == TieRule::Canonical)
        return {ev.parent(row, z), ev.parent_winding(row, z)};
    return extreme_parent(ev, row, z, rule);
}

/// Lifted position at row_s of the optimal path into (row_t, terminal):
/// terminal minus the accumulated lifted displacement.
long lifted_source(const ValueEvolution& ev, int terminal, int row_t, int row_s,
                   TieRule rule) {
    const int m = ev.grid_size();
    int z = terminal;
    long lift = terminal;
    for (int row = row_t; row > row_s; --row) {
        const Segment seg = step_parent(ev, row, z, rule);
        const int d = z - seg.parent < 0 ? z - seg.parent + m : z - seg.parent;
        lift -= d + static_cast<long>(seg.winding) * m;
        z = seg.parent;
    }
    return lift;
}

void validate_span(const ValueEvolution& ev, std::int64_t s, std::int64_t t) {
    if (s < ev.start_time() || s > t || t > ev.end_time())
        throw std::out_of_range("requested times outside the evolution span");
}

int wrap_index(long lift, int m) {
    return static_cast<int>(lift - floordiv(lift, m) * m);
}

/// One representative terminal per reached point: the cyclic start of the
/// run of terminals backtracking to it. Runs are cyclically contiguous by
/// backpointer monotonicity, and the rule commutes with grid rotations.
std::vector<int> run_start_reps(const std::vector<int>& src, int m) {
    std::vector<int> rep(m, -1);
    bool boundary = false;
    for (int x = 0; x < m; ++x) {
        if (src[(x + m - 1) % m] == src[x]) continue;
        boundary = true;
        if (rep[src[x]] < 0) rep[src[x]] = x;
    }
    // Every terminal shares one source: the full circle is a single run
    // with no start, so anchor at the terminal above the source itself.
    // Any fixed terminal index would break under grid rotation.
    if (!boundary) rep[src[0]] = src[0];
    return rep;
}

}  // namespace

MinimizerPath backtrack_extreme(const ValueEvolution& ev, int terminal, TieRule rule) {
    if (rule == TieRule::Canonical) return backtrack(ev, terminal);
    if (terminal < 0 || terminal >= ev.grid_size())
        throw std::out_of_range("terminal index outside the grid");
    const int steps = ev.steps();
    MinimizerPath path;
    path.positions.resize(steps + 1);
    path.windings.resize(steps);
    path.action = ev.value(steps, terminal);
    path.positions[steps] = terminal;
    for (int row = steps; row >= 1; --row) {
        const Segment seg = extreme_parent(ev, row, path.positions[row], rule);
        path.positions[row - 1] = seg.parent;
        path.windings[row - 1] = seg.winding;
    }
    return path;
}

OmegaSet omega_set(const ValueEvolution& ev, std::int64_t s, std::int64_t t) {
    validate_span(ev, s, t);
    const int m = ev.grid_size();
    const int row_s = static_cast<int>(s - ev.start_time());
    const int row_t = static_cast<int>(t - ev.start_time());

    std::vector<int> src(m);
    for (int x = 0; x < m; ++x) {
        int z = x;
        for (int row = row_t; row > row_s; --row) z = ev.parent(row, z);
        src[x] = z;
    }
    const auto rep = run_start_reps(src, m);

    OmegaSet omega;
    omega.grid_size = m;
    omega.s = s;
    omega.t = t;
    for (int p = 0; p < m; ++p) {
        if (rep[p] < 0) continue;
        omega.points.push_back(p);
        omega.provenance.push_back(rep[p]);
    }
    return omega;
}

OmegaSet omega_set(const ValueEvolution& ev, std::int64_t s) {
    return omega_set(ev, s, ev.end_time());
}

double diameter(const OmegaSet& omega) {
    if (omega.points.empty())
        throw std::invalid_argument("diameter of an empty set");
    const int m = omega.grid_size;
    const auto& p = omega.points;
    int max_gap = p.front() + m - p.back();
    for (std::size_t i = 1; i < p.size(); ++i)
        max_gap = std::max(max_gap, p[i] - p[i - 1]);
    return static_cast<double>(m - max_gap) / m;
}

ShockMapTable shock_map(const ValueEvolution& ev, std::int64_t s, std::int64_t t) {
    validate_span(ev, s, t);
    const int m = ev.grid_size();
    const int row_s = static_cast<int>(s - ev.start_time());
    const int row_t = static_cast<int>(t - ev.start_time());

    ShockMapTable table;
    table.grid_size = m;
    table.s = s;
    table.t = t;
    table.terminal.resize(m);
    table.kind.assign(m, ShockKind::Minimizer);

    if (row_s == row_t) {
        for (int y = 0; y < m; ++y) table.terminal[y] = y;
        return table;
    }

    std::vector<long> src_c(m), src_l(m), src_r(m);
    for (int x = 0; x < m; ++x) {
        src_c[x] = lifted_source(ev, x, row_t, row_s, TieRule::Canonical);
        src_l[x] = lifted_source(ev, x, row_t, row_s, TieRule::Leftmost);
        src_r[x] = lifted_source(ev, x, row_t, row_s, TieRule::Rightmost);
        if (src_l[x] > src_c[x] || src_c[x] > src_r[x])
            throw NumericError("tie funnel does not contain the canonical source");
    }
    for (int x = 0; x < m; ++x) {
        // Non-crossing: lifted sources are cyclically monotone and the
        // tie funnels of consecutive terminals do not overlap.
        const int nx = x + 1 == m ? 0 : x + 1;
        const long shift = x + 1 == m ? m : 0;
        if (src_c[x] > src_c[nx] + shift || src_l[x] > src_l[nx] + shift ||
            src_r[x] > src_r[nx] + shift || src_r[x] > src_l[nx] + shift)
            throw NumericError("back-pointer monotonicity violated between terminals " +
                               std::to_string(x) + " and " + std::to_string(nx));
    }

    std::vector<int> src(m);
    for (int x = 0; x < m; ++x) src[x] = wrap_index(src_c[x], m);
    const auto rep = run_start_reps(src, m);

    for (int y = 0; y < m; ++y) {
        if (rep[y] >= 0) {
            table.terminal[y] = rep[y];
            table.kind[y] = ShockKind::Minimizer;
            continue;
        }
        bool assigned = false;
        for (int x = 0; x < m && !assigned; ++x) {
            const int nx = x + 1 == m ? 0 : x + 1;
            const long shift = x + 1 == m ? m : 0;
            const long lo = src_c[x];
            const long hi = src_c[nx] + shift;
            if (hi <= lo) continue;
            // Unique lift of y strictly inside (lo, hi), if any.
            const long lift = y + (floordiv(lo - y, m) + 1) * m;
            if (lift >= hi) continue;
            const long right_a = src_r[x];
            const long left_b = src_l[nx] + shift;
            if (lift <= right_a)
                table.terminal[y] = x;
            else if (lift >= left_b)
                table.terminal[y] = nx;
            else
                table.terminal[y] = lift - right_a <= left_b - lift ? x : nx;
            table.kind[y] = ShockKind::Shock;
            assigned = true;
        }
        if (!assigned)
            throw NumericError("shock assignment failed to bracket point " +
                               std::to_string(y));
    }
    return table;
}

ShockMapTable shock_map(const ValueEvolution& ev, std::int64_t s) {
    return shock_map(ev, s, ev.end_time());
}

}  // namespace minlab
