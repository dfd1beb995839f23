#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "upsilon/space_form.hpp"

namespace upsilon {

struct Assignment {
  /// row i is assigned to column row_to_col[i]; empty when infeasible.
  std::vector<std::size_t> row_to_col;
  /// Total cost, +infinity when no perfect matching of finite cost exists.
  double cost = 0.0;
  bool feasible() const { return std::isfinite(cost); }
};

/// Exact linear assignment on a square cost matrix (entries may be +infinity).
///
/// Shortest-augmenting-path Hungarian method, O(n^3). Among all cost-minimizing
/// permutations the lexicographically smallest row_to_col is returned: after the
/// solve, the tight subgraph of the final dual potentials contains exactly the
/// optimal permutations and is searched greedily row by row.
Assignment solve_assignment(const Matrix& cost);

/// Bipartite perfect matching test; adjacency[i] lists the right vertices of left vertex i.
bool has_perfect_matching(const std::vector<std::vector<std::size_t>>& adjacency,
                          std::size_t n_right);

}  // namespace upsilon
