#include "upsilon/hopf_lax.hpp"

#include <cmath>
#include <limits>

#include "upsilon/errors.hpp"
#include "upsilon/transport.hpp"

namespace upsilon {

namespace {

struct Problem {
  const Functional& f;
  const Configuration& gamma;
  double t;

  // Objective with eta[j] paired to gamma[partner[j]].
  double fixed(const std::vector<BasePoint>& eta, const std::vector<std::size_t>& partner) const {
    const SpaceForm& space = gamma.space();
    double cost = 0.0;
    for (std::size_t j = 0; j < eta.size(); ++j) {
      const double d = geodesic_distance(space, gamma[partner[j]], eta[j]);
      cost += d * d;
    }
    return f.value(Configuration::unchecked(space, eta)) + cost / (2.0 * t);
  }

  // Re-match; returns the partner map and the objective under the optimal matching.
  double rematch(const std::vector<BasePoint>& eta, std::vector<std::size_t>& partner) const {
    const Matching m = optimal_matching(gamma, Configuration::unchecked(gamma.space(), eta));
    partner.assign(eta.size(), 0);
    for (const auto& [i, j] : m.pairs) partner[j] = i;
    return f.value(Configuration::unchecked(gamma.space(), eta)) + m.squared_cost / (2.0 * t);
  }
};

// Gradient descent with the matching fixed. Returns the final objective.
double descend_gradient(const Problem& p, std::vector<BasePoint>& eta,
                        const std::vector<std::size_t>& partner, double value, double tol) {
  const SpaceForm& space = p.gamma.space();
  for (int iter = 0; iter < 200; ++iter) {
    const auto grad_f = p.f.gradient(Configuration::unchecked(space, eta));
    std::vector<Vector> g(eta.size());
    double norm2 = 0.0;
    for (std::size_t j = 0; j < eta.size(); ++j) {
      g[j] = grad_f[j] - log_map(space, eta[j], p.gamma[partner[j]]) / p.t;
      norm2 += tangent_inner(space, g[j], g[j]);
    }
    // Objective gap of a 1/t-strongly convex model is about t |g|^2 / 2.
    if (p.t * norm2 < 1e-3 * tol) break;
    double step = p.t;
    bool moved = false;
    for (int k = 0; k < 60; ++k) {
      std::vector<BasePoint> trial(eta.size());
      for (std::size_t j = 0; j < eta.size(); ++j) trial[j] = exp_map(space, eta[j], -step * g[j]);
      const double v = p.fixed(trial, partner);
      if (v <= value - 1e-4 * step * norm2) {
        const double decrease = value - v;
        eta = std::move(trial);
        value = v;
        moved = true;
        if (decrease < 1e-3 * tol) return value;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return value;
}

// Golden-section minimization of the objective along each frame direction of each point.
double descend_coordinate(const Problem& p, std::vector<BasePoint>& eta,
                          const std::vector<std::size_t>& partner, double value, double tol) {
  const SpaceForm& space = p.gamma.space();
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double half_width = 2.0 * std::sqrt(p.t);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    const Matrix frame = tangent_frame(space, eta[j]);
    for (Eigen::Index k = 0; k < frame.cols(); ++k) {
      const BasePoint base = eta[j];
      const Vector dir = frame.col(k);
      auto along = [&](double s) {
        std::vector<BasePoint> trial = eta;
        trial[j] = exp_map(space, base, s * dir);
        return p.fixed(trial, partner);
      };
      double a = -half_width, b = half_width;
      double c = b - invphi * (b - a), d = a + invphi * (b - a);
      double fc = along(c), fd = along(d);
      while (b - a > 1e-10) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - invphi * (b - a);
          fc = along(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + invphi * (b - a);
          fd = along(d);
        }
      }
      const double s = 0.5 * (a + b);
      const double v = along(s);
      if (v < value) {
        eta[j] = exp_map(space, base, s * dir);
        value = v;
      }
    }
  }
  (void)tol;
  return value;
}

HopfLaxResult solve_from(const Problem& p, std::vector<BasePoint> eta, const HopfLaxOptions& opts) {
  HopfLaxResult result;
  std::vector<std::size_t> partner;
  double value = p.rematch(eta, partner);
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    result.sweeps = sweep;
    const double before = value;
    value = opts.method == HopfLaxMethod::gradient
                ? descend_gradient(p, eta, partner, value, opts.tolerance)
                : descend_coordinate(p, eta, partner, value, opts.tolerance);
    value = std::min(value, p.rematch(eta, partner));
    if (before - value < opts.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.value = value;
  result.minimizer = Configuration::unchecked(p.gamma.space(), std::move(eta));
  return result;
}

}  // namespace

HopfLaxResult hopf_lax(const Functional& f, const Configuration& gamma, double t,
                       const HopfLaxOptions& opts) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("Hopf-Lax time must be positive");
  if (opts.starts < 1) throw DomainError("Hopf-Lax needs at least one start");
  const double at_gamma = f.value(gamma);
  HopfLaxResult best;
  best.value = at_gamma;
  best.minimizer = gamma;
  best.converged = true;
  if (gamma.empty()) return best;

  const Problem p{f, gamma, t};
  const SpaceForm& space = gamma.space();
  const RandomStream master(opts.seed);
  bool have = false;
  for (int s = 0; s < opts.starts; ++s) {
    std::vector<BasePoint> start = gamma.points();
    if (s > 0) {
      RandomStream rng = master.derive(static_cast<std::uint64_t>(s));
      for (auto& x : start) x = exp_map(space, x, tangent_gaussian(space, x, t, rng));
    }
    HopfLaxResult r = solve_from(p, std::move(start), opts);
    if (!have || r.value < best.value) {
      best = std::move(r);
      have = true;
    }
  }
  // eta = gamma is always admissible.
  if (at_gamma < best.value) {
    best.value = at_gamma;
    best.minimizer = gamma;
  }
  return best;
}

}  // namespace upsilon
