#include "upsilon/transport.hpp"

#include <thread>

#include "upsilon/assignment.hpp"
#include "upsilon/errors.hpp"

namespace upsilon {

namespace {

void require_same_space(const Configuration& a, const Configuration& b) {
  if (!(a.space() == b.space())) {
    throw DomainError("configurations live on different spaces: " + a.space().name() + " vs " +
                      b.space().name());
  }
}

}  // namespace

std::vector<std::size_t> Matching::permutation() const {
  std::vector<std::size_t> perm(pairs.size());
  for (const auto& [i, j] : pairs) perm[i] = j;
  return perm;
}

Matrix squared_distance_matrix(const Configuration& gamma, const Configuration& omega) {
  require_same_space(gamma, omega);
  Matrix c(gamma.size(), omega.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    for (std::size_t j = 0; j < omega.size(); ++j) {
      const double d = geodesic_distance(gamma.space(), gamma[i], omega[j]);
      c(i, j) = d * d;
    }
  }
  return c;
}

ExtendedCost d_upsilon(const Configuration& gamma, const Configuration& omega) {
  require_same_space(gamma, omega);
  if (gamma.size() != omega.size()) return ExtendedCost::infinite();
  return {optimal_matching(gamma, omega).squared_cost};
}

Matching optimal_matching(const Configuration& gamma, const Configuration& omega) {
  require_same_space(gamma, omega);
  if (gamma.size() != omega.size()) {
    throw InfiniteDistanceError("cannot match configurations with " + std::to_string(gamma.size()) +
                                " and " + std::to_string(omega.size()) + " points");
  }
  const Assignment a = solve_assignment(squared_distance_matrix(gamma, omega));
  Matching m;
  m.pairs.reserve(gamma.size());
  for (std::size_t i = 0; i < a.row_to_col.size(); ++i) m.pairs.emplace_back(i, a.row_to_col[i]);
  m.squared_cost = a.cost;
  return m;
}

Configuration config_geodesic(const Configuration& gamma, const Configuration& omega, double s) {
  return config_geodesic(gamma, omega, optimal_matching(gamma, omega), s);
}

Configuration config_geodesic(const Configuration& gamma, const Configuration& omega,
                              const Matching& matching, double s) {
  require_same_space(gamma, omega);
  if (gamma.size() != omega.size()) throw InfiniteDistanceError("configuration geodesic needs finite distance");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("geodesic parameter must lie in [0, 1]");
  std::vector<BasePoint> pts;
  pts.reserve(gamma.size());
  for (const auto& [i, j] : matching.pairs) {
    pts.push_back(geodesic_point(gamma.space(), gamma[i], omega[j], s));
  }
  return Configuration::unchecked(gamma.space(), std::move(pts));
}

EmpiricalW2 empirical_w2_detailed(const std::vector<Configuration>& a,
                                  const std::vector<Configuration>& b, int workers) {
  if (a.empty() || b.empty()) throw DomainError("empirical W2 needs at least one sample on each side");
  if (a.size() != b.size()) throw DomainError("empirical W2 needs equally many samples on both sides");
  const std::size_t n = a.size();
  Matrix cost(n, n);
  auto fill_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) cost(i, j) = d_upsilon(a[i], b[j]).squared;
    }
  };
  const std::size_t w = std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, n);
  if (w == 1) {
    fill_rows(0, n);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t begin = k * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end) threads.emplace_back(fill_rows, begin, end);
    }
    for (auto& t : threads) t.join();
  }
  const Assignment assignment = solve_assignment(cost);
  EmpiricalW2 out;
  if (!assignment.feasible()) {
    out.cost = ExtendedCost::infinite();
    return out;
  }
  out.assignment = assignment.row_to_col;
  out.matched_costs.reserve(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.matched_costs.push_back(cost(i, out.assignment[i]));
    total += out.matched_costs.back();
  }
  out.cost = {total / static_cast<double>(n)};
  return out;
}

ExtendedCost empirical_w2(const std::vector<Configuration>& a, const std::vector<Configuration>& b,
                          int workers) {
  return empirical_w2_detailed(a, b, workers).cost;
}

nlohmann::json extended_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

nlohmann::json transport_to_json(const ExtendedCost& cost, const Matching* matching) {
  nlohmann::json pairs = nlohmann::json::array();
  if (matching != nullptr && !cost.is_infinite()) {
    for (const auto& [i, j] : matching->pairs) pairs.push_back({i, j});
  }
  return {{"d2", extended_number(cost.squared)},
          {"d", extended_number(cost.distance())},
          {"pairs", pairs}};
}

}  // namespace upsilon
