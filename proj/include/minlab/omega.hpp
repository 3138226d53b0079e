#pragma once

#include <cstdint>
#include <vector>

#include "minlab/solver.hpp"

namespace minlab {

/// Positions reached at time s by the optimal paths ending at the grid
/// terminals at time t.
struct OmegaSet {
    std::vector<int> points;      // sorted, distinct grid indices at time s
    std::vector<int> provenance;  // run-start terminal backtracking to each point
    int grid_size = 0;
    std::int64_t s = 0;
    std::int64_t t = 0;
};

enum class ShockKind { Minimizer, Shock };

/// Forward assignment y at time s -> terminal at time t. The lifted map
/// is monotone non-decreasing with total winding M.
struct ShockMapTable {
    std::vector<int> terminal;
    std::vector<ShockKind> kind;
    int grid_size = 0;
    std::int64_t s = 0;
    std::int64_t t = 0;
};

/// Backtrack tie handling. Canonical follows the stored back-pointers
/// (smallest source, then smallest winding). Leftmost / Rightmost re-rank
/// exact-equal optimal segments by lifted displacement, tracing the two
/// extreme optimal paths into a terminal.
enum class TieRule { Canonical, Leftmost, Rightmost };

MinimizerPath backtrack_extreme(const ValueEvolution& ev, int terminal, TieRule rule);

/// Distinct backtrack positions at time s of the paths ending at every
/// grid terminal at time t (default: the evolution's end time). Requires
/// start_time <= s <= t <= end_time.
OmegaSet omega_set(const ValueEvolution& ev, std::int64_t s, std::int64_t t);
OmegaSet omega_set(const ValueEvolution& ev, std::int64_t s);

/// 1 - (largest circular gap between consecutive points), computed in
/// exact units of 1/M; equals the minimal arc length containing the set.
double diameter(const OmegaSet& omega);

/// Assigns every grid point y at time s a terminal at time t.
///
/// Reached y map to the cyclic run start of the consecutive terminals
/// whose backtracks land on them (kind Minimizer); if every terminal
/// shares one source the anchor is the terminal above that source.
/// Unreached y fall between the lifted sources of two
/// consecutive terminals a < b; they join a while inside a's tie funnel
/// [leftmost_a, rightmost_a], join b inside b's, and otherwise the gap is
/// split at its midpoint (left half to a). Back-pointer monotonicity
/// violations throw NumericError.
ShockMapTable shock_map(const ValueEvolution& ev, std::int64_t s, std::int64_t t);
ShockMapTable shock_map(const ValueEvolution& ev, std::int64_t s);

}  // namespace minlab
