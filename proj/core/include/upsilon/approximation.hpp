#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "upsilon/configuration.hpp"

namespace upsilon {

/// Along the optimal matching of gamma and omega, keep the gamma endpoint of every
/// pair lying in ball x ball and the omega endpoint of every other pair. The result
/// agrees with omega outside the ball and has omega's mass inside it.
Configuration xi_construction(const Configuration& gamma, const Configuration& omega,
                              const Region& ball);

/// alpha = 1 / (2 sqrt(n k)) for k points in the ball.
double smear_radius(std::size_t k, std::size_t n);

/// Inward shift: a point within alpha of the boundary of B(x0, R) moves alpha closer to
/// x0 (clamped at x0), so that B(chi(x), alpha) stays inside the ball.
BasePoint smear_center(const SpaceForm& space, const BallRegion& ball, const BasePoint& x,
                       double alpha);

struct SmearResult {
  Configuration smeared;
  /// Unset when the ball holds no point of xi (nothing is smeared).
  std::optional<double> alpha;
  /// chi(x) for the smeared points, in order of appearance.
  std::vector<BasePoint> centers;
};

/// Replace each point of xi in the ball by a uniform draw on B(chi(x), alpha).
SmearResult smear_alpha(const Configuration& xi, const Region& ball, std::size_t n,
                        RandomStream& rng);

struct EntropyBound {
  std::size_t k = 0;
  double alpha = 0.0;
  /// sum_i log(m(B) / m(B(chi(x_i), alpha)))
  double value = 0.0;
  /// C k max(log k + log n, log 2)
  double envelope = 0.0;
  double constant = 0.0;
};

/// Lower volume constant kappa with m(B(x, r)) >= kappa r^dim for 0 < r <= 1/2.
double small_ball_constant(const SpaceForm& space);

/// Relative entropy of the product of uniform smearing laws against normalized volume
/// on the ball, and its envelope. Requires at least one point of xi in the ball.
EntropyBound entropy_smear_bound(const Configuration& xi, const Region& ball, std::size_t n);

struct ConvergencePoint {
  std::size_t n = 0;
  double w2_squared = 0.0;
  double w2_squared_std_error = 0.0;
  double w2_estimate = 0.0;
  double std_error = 0.0;
};

struct ConvergenceOptions {
  /// Center of the balls B(x0, n); defaults to the model origin.
  std::optional<BasePoint> x0;
  /// Re-pair nu_samples with mu_samples by the empirical optimal assignment first.
  bool pair_by_assignment = false;
  int workers = 1;
};

/// W_2(mu, mu_n) for each n in n_grid, where mu_n is obtained from paired samples by
/// xi_construction on B(x0, n) followed by smear_alpha.
std::vector<ConvergencePoint> check_appendix_convergence(
    const std::vector<Configuration>& mu_samples, const std::vector<Configuration>& nu_samples,
    const std::vector<std::size_t>& n_grid, std::uint64_t seed, const ConvergenceOptions& opts = {});

/// Rows n,w2_estimate,std_error.
void write_convergence_csv(std::ostream& out, const std::vector<ConvergencePoint>& points);

}  // namespace upsilon
