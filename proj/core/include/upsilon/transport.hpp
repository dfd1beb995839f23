#pragma once

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <utility>
#include <vector>

#include "upsilon/configuration.hpp"

namespace upsilon {

/// A value in [0, +inf]: squared transport cost and its square root.
struct ExtendedCost {
  double squared = 0.0;

  static ExtendedCost infinite() { return {std::numeric_limits<double>::infinity()}; }
  bool is_infinite() const { return std::isinf(squared); }
  double distance() const { return std::sqrt(squared); }
};

/// A bijection i -> sigma(i) between equal-cardinality configurations.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double squared_cost = 0.0;

  std::vector<std::size_t> permutation() const;
};

/// Pairwise squared base distances d^2(x_i, y_j).
Matrix squared_distance_matrix(const Configuration& gamma, const Configuration& omega);

/// The L^2 transport distance between configurations; +inf across cardinalities.
ExtendedCost d_upsilon(const Configuration& gamma, const Configuration& omega);

/// Cost-minimizing matching; ties resolved to the lexicographically smallest permutation.
Matching optimal_matching(const Configuration& gamma, const Configuration& omega);

/// Point s of the configuration geodesic obtained by moving matched pairs along base geodesics.
Configuration config_geodesic(const Configuration& gamma, const Configuration& omega, double s);
Configuration config_geodesic(const Configuration& gamma, const Configuration& omega,
                              const Matching& matching, double s);

struct EmpiricalW2 {
  /// W_2^2 = mean matched d_Upsilon^2 over the optimal outer assignment.
  ExtendedCost cost;
  /// sample of a is matched with sample b[assignment[k]]
  std::vector<std::size_t> assignment;
  std::vector<double> matched_costs;
};

/// W_2 between two empirical measures with uniform weights on equally many samples.
/// The N x N matrix of d_Upsilon^2 entries is filled by `workers` threads.
EmpiricalW2 empirical_w2_detailed(const std::vector<Configuration>& a,
                                  const std::vector<Configuration>& b, int workers = 1);
ExtendedCost empirical_w2(const std::vector<Configuration>& a, const std::vector<Configuration>& b,
                          int workers = 1);

/// {"d2": ..., "d": ..., "pairs": [[i, j], ...]}; +inf encoded as the string "inf".
nlohmann::json transport_to_json(const ExtendedCost& cost, const Matching* matching);
nlohmann::json extended_number(double value);

}  // namespace upsilon
