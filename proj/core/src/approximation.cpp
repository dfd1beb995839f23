#include "upsilon/approximation.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include "upsilon/errors.hpp"
#include "upsilon/log.hpp"
#include "upsilon/transport.hpp"

namespace upsilon {

Configuration xi_construction(const Configuration& gamma, const Configuration& omega,
                              const Region& ball) {
  const Matching eta = optimal_matching(gamma, omega);
  const SpaceForm& space = gamma.space();
  std::vector<BasePoint> pts;
  pts.reserve(eta.pairs.size());
  for (const auto& [i, j] : eta.pairs) {
    const bool inside = ball.contains(space, gamma[i]) && ball.contains(space, omega[j]);
    pts.push_back(inside ? gamma[i] : omega[j]);
  }
  return Configuration::unchecked(space, std::move(pts));
}

double smear_radius(std::size_t k, std::size_t n) {
  if (k == 0 || n == 0) throw DomainError("smearing radius needs k >= 1 and n >= 1");
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(n) * static_cast<double>(k)));
}

BasePoint smear_center(const SpaceForm& space, const BallRegion& ball, const BasePoint& x,
                       double alpha) {
  const double s = geodesic_distance(space, ball.center, x);
  if (s <= ball.radius - alpha) return x;
  if (s <= alpha) return ball.center;
  return geodesic_point(space, ball.center, x, (s - alpha) / s);
}

SmearResult smear_alpha(const Configuration& xi, const Region& ball, std::size_t n,
                        RandomStream& rng) {
  if (!ball.is_ball()) throw DomainError("smearing needs a ball region");
  if (n == 0) throw DomainError("smearing needs n >= 1");
  const SpaceForm& space = xi.space();
  const BallRegion& b = ball.as_ball();
  std::size_t k = 0;
  for (const auto& x : xi.points()) k += ball.contains(space, x) ? 1 : 0;
  SmearResult out{xi, std::nullopt, {}};
  if (k == 0) return out;
  const double alpha = smear_radius(k, n);
  out.alpha = alpha;
  std::vector<BasePoint> pts;
  pts.reserve(xi.size());
  for (const auto& x : xi.points()) {
    if (!ball.contains(space, x)) {
      pts.push_back(x);
      continue;
    }
    BasePoint chi = smear_center(space, b, x, alpha);
    pts.push_back(sample_uniform_ball(space, chi, alpha, rng));
    out.centers.push_back(std::move(chi));
  }
  out.smeared = Configuration::unchecked(space, std::move(pts));
  return out;
}

double small_ball_constant(const SpaceForm& space) {
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      const double d = space.dim();
      return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    }
    case SpaceKind::sphere2: {
      // 4 pi rho^2 sin^2(r / 2 rho) >= pi r^2 (1 - u^2 / 3) with u = r / (2 rho) <= 1 / (4 rho).
      const double u = 1.0 / (4.0 * space.radius());
      return std::numbers::pi * (1.0 - u * u / 3.0);
    }
    case SpaceKind::hyperbolic2:
      return std::numbers::pi;  // 4 pi sinh^2(r/2) >= pi r^2
  }
  return 0.0;
}

EntropyBound entropy_smear_bound(const Configuration& xi, const Region& ball, std::size_t n) {
  if (!ball.is_ball()) throw DomainError("entropy bound needs a ball region");
  const SpaceForm& space = xi.space();
  EntropyBound e;
  for (const auto& x : xi.points()) e.k += ball.contains(space, x) ? 1 : 0;
  if (e.k == 0) throw DomainError("entropy bound needs at least one point in the ball");
  e.alpha = smear_radius(e.k, n);
  const double m_ball = ball.volume(space);
  for (const auto& x : xi.points()) {
    if (!ball.contains(space, x)) continue;
    // m(B(chi, alpha)) does not depend on chi on a homogeneous space.
    e.value += std::log(m_ball / ball_volume(space, e.alpha));
  }
  const double dim = space.dim();
  const double a = std::log(m_ball) - std::log(small_ball_constant(space)) + dim * std::log(2.0);
  e.constant = dim / 2.0 + std::max(a, 0.0) / std::log(2.0);
  const double kk = static_cast<double>(e.k);
  e.envelope = e.constant * kk * std::max(std::log(kk) + std::log(static_cast<double>(n)), std::log(2.0));
  return e;
}

std::vector<ConvergencePoint> check_appendix_convergence(
    const std::vector<Configuration>& mu_samples, const std::vector<Configuration>& nu_samples,
    const std::vector<std::size_t>& n_grid, std::uint64_t seed, const ConvergenceOptions& opts) {
  if (mu_samples.empty()) throw DomainError("convergence check needs samples");
  if (mu_samples.size() != nu_samples.size()) throw DomainError("mu and nu need equally many samples");
  const SpaceForm& space = mu_samples.front().space();
  const BasePoint x0 = opts.x0 ? *opts.x0 : model_origin(space);

  std::vector<std::size_t> partner(nu_samples.size());
  for (std::size_t k = 0; k < partner.size(); ++k) partner[k] = k;
  if (opts.pair_by_assignment) {
    const EmpiricalW2 w = empirical_w2_detailed(mu_samples, nu_samples, opts.workers);
    if (!w.cost.is_infinite()) partner = w.assignment;
  }

  std::vector<std::size_t> usable;
  for (std::size_t k = 0; k < mu_samples.size(); ++k) {
    if (mu_samples[k].size() != nu_samples[partner[k]].size()) {
      warn("appendix convergence: skipping sample pair " + std::to_string(k) + " with unequal cardinalities");
      continue;
    }
    usable.push_back(k);
  }
  if (usable.empty()) throw DomainError("no sample pair with matching cardinalities");

  std::vector<ConvergencePoint> out(n_grid.size());
  const RandomStream master(seed);
  auto run = [&](std::size_t g) {
    const std::size_t n = n_grid[g];
    const Region ball = Region::ball(x0, static_cast<double>(n));
    const RandomStream stream = master.derive(g);
    std::vector<Configuration> mu, mu_n;
    mu.reserve(usable.size());
    mu_n.reserve(usable.size());
    for (std::size_t k : usable) {
      RandomStream rng = stream.derive(k);
      const Configuration xi = xi_construction(mu_samples[k], nu_samples[partner[k]], ball);
      mu.push_back(mu_samples[k]);
      mu_n.push_back(smear_alpha(xi, ball, n, rng).smeared);
    }
    const EmpiricalW2 w = empirical_w2_detailed(mu, mu_n);
    ConvergencePoint p;
    p.n = n;
    p.w2_squared = w.cost.squared;
    const double m = static_cast<double>(w.matched_costs.size());
    double var = 0.0;
    for (double c : w.matched_costs) var += (c - p.w2_squared) * (c - p.w2_squared);
    var = m > 1 ? var / (m - 1.0) : 0.0;
    p.w2_squared_std_error = std::sqrt(var / m);
    p.w2_estimate = std::sqrt(p.w2_squared);
    p.std_error = p.w2_estimate > 0.0 ? p.w2_squared_std_error / (2.0 * p.w2_estimate) : 0.0;
    out[g] = p;
  };
  if (opts.workers <= 1 || n_grid.size() <= 1) {
    for (std::size_t g = 0; g < n_grid.size(); ++g) run(g);
  } else {
    std::vector<std::thread> pool;
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(opts.workers), n_grid.size());
    for (std::size_t id = 0; id < w; ++id) {
      pool.emplace_back([&, id] {
        for (std::size_t g = id; g < n_grid.size(); g += w) run(g);
      });
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergencePoint>& points) {
  out << "n,w2_estimate,std_error\n";
  for (const auto& p : points) {
    out << p.n << ',' << format_double(p.w2_estimate) << ',' << format_double(p.std_error) << '\n';
  }
}

}  // namespace upsilon
