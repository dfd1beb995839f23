#include "upsilon/assignment.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "upsilon/errors.hpp"

namespace upsilon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool try_kuhn(std::size_t v, const std::vector<std::vector<std::size_t>>& adj,
              std::vector<std::size_t>& match_right, std::vector<char>& seen) {
  for (std::size_t w : adj[v]) {
    if (seen[w]) continue;
    seen[w] = 1;
    if (match_right[w] == SIZE_MAX || try_kuhn(match_right[w], adj, match_right, seen)) {
      match_right[w] = v;
      return true;
    }
  }
  return false;
}

struct Duals {
  std::vector<std::size_t> row_to_col;
  Vector u;
  Vector v;
};

// Hungarian method with potentials; cost must be finite.
Duals hungarian(const Matrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  Vector u = Vector::Zero(n + 1);
  Vector v = Vector::Zero(n + 1);
  std::vector<std::size_t> p(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Duals d;
  d.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) d.row_to_col[p[j] - 1] = j - 1;
  d.u = u.tail(n);
  d.v = v.tail(n);
  return d;
}

}  // namespace

bool has_perfect_matching(const std::vector<std::vector<std::size_t>>& adjacency,
                          std::size_t n_right) {
  if (adjacency.size() != n_right) return false;
  std::vector<std::size_t> match_right(n_right, SIZE_MAX);
  for (std::size_t v = 0; v < adjacency.size(); ++v) {
    std::vector<char> seen(n_right, 0);
    if (!try_kuhn(v, adjacency, match_right, seen)) return false;
  }
  return true;
}

Assignment solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw DomainError("assignment needs a square cost matrix");
  const auto n = static_cast<std::size_t>(cost.rows());
  if (n == 0) return Assignment{{}, 0.0};

  double max_finite = 0.0;
  bool any_infinite = false;
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      const double c = cost(i, j);
      if (std::isnan(c) || c == -kInf) throw DomainError("assignment costs must be finite or +inf");
      if (c == kInf) {
        any_infinite = true;
      } else {
        max_finite = std::max(max_finite, std::abs(c));
      }
    }
  }

  Matrix work = cost;
  if (any_infinite) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(cost(i, j))) adj[i].push_back(j);
      }
    }
    if (!has_perfect_matching(adj, n)) return Assignment{{}, kInf};
    // Any finite perfect matching is cheaper than a single penalized edge.
    const double big = (max_finite + 1.0) * static_cast<double>(n + 1);
    work = cost.unaryExpr([big](double c) { return std::isfinite(c) ? c : big; });
  }

  Duals duals = hungarian(work);

  // Every optimal permutation uses only tight edges of an optimal dual, and every
  // perfect matching of tight edges is optimal.
  const double scale = std::max(1.0, work.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  auto tight = [&](std::size_t i, std::size_t j) {
    return work(i, j) - duals.u[i] - duals.v[j] <= tol;
  };

  std::vector<std::size_t>& row_to_col = duals.row_to_col;
  std::vector<std::size_t> col_to_row(n);
  for (std::size_t i = 0; i < n; ++i) col_to_row[row_to_col[i]] = i;
  std::vector<char> locked(n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < row_to_col[i]; ++j) {
      if (locked[j] || !tight(i, j)) continue;
      // Free column target = row_to_col[i]; reroute owner of j through unlocked rows > i.
      const std::size_t target = row_to_col[i];
      std::vector<char> seen(n, 0);
      std::vector<std::size_t> path_rows;
      std::vector<std::size_t> path_cols;
      std::function<bool(std::size_t)> reroute = [&](std::size_t r) -> bool {
        for (std::size_t c = 0; c < n; ++c) {
          if (locked[c] || seen[c] || c == j || !tight(r, c)) continue;
          seen[c] = 1;
          if (c == target || (col_to_row[c] > i && reroute(col_to_row[c]))) {
            path_rows.push_back(r);
            path_cols.push_back(c);
            return true;
          }
        }
        return false;
      };
      const std::size_t owner = col_to_row[j];
      if (owner > i && reroute(owner)) {
        for (std::size_t k = 0; k < path_rows.size(); ++k) {
          row_to_col[path_rows[k]] = path_cols[k];
          col_to_row[path_cols[k]] = path_rows[k];
        }
        row_to_col[i] = j;
        col_to_row[j] = i;
        break;
      }
    }
    locked[row_to_col[i]] = 1;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost(i, row_to_col[i]);
  return Assignment{std::move(row_to_col), total};
}

}  // namespace upsilon
