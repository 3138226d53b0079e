#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "minlab/forcing.hpp"
#include "minlab/solver.hpp"

namespace minlab::oracle {

/// Exhaustive minimum over every grid path, one terminal per grid point.
struct PathEnumeration {
    /// Minimal action per terminal.
    std::vector<double> values;
    /// Optimal path per terminal, lexicographically smallest source
    /// sequence read from the terminal downwards.
    std::vector<std::vector<int>> positions;
    std::vector<std::vector<int>> windings;
    /// Extremes of the lifted positions over all exactly-optimal paths
    /// per terminal, indexed [terminal][row]; row runs 0..steps. Lifts are
    /// anchored so the value at the final row equals the terminal index.
    std::vector<std::vector<long>> min_lift;
    std::vector<std::vector<long>> max_lift;
};

/// Enumerates all grid_size^(steps+1) paths directly from the action
/// definition, minimizing each segment over its winding. Shares no code
/// with the dynamic-programming evolution; exponential in steps, intended
/// for small grids only.
PathEnumeration enumerate_paths(const ForcingField& forcing, std::int64_t start_time,
                                int steps, const SolverOptions& options,
                                std::span<const double> psi = {});

}  // namespace minlab::oracle
