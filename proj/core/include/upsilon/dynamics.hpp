#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "upsilon/configuration.hpp"
#include "upsilon/random.hpp"

namespace upsilon {

/// Independent heat steps of every point; t = 0 is the identity.
Configuration heat_step_config(const Configuration& gamma, double t, RandomStream& rng,
                               const HeatOptions& opts = {});

struct McOptions {
  /// Average each draw with its sign-flipped partner path.
  bool antithetic = false;
  double substep = 1e-3;
  int workers = 1;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Sample means of a vector statistic and the covariance of those means.
struct McMoments {
  Vector mean;
  Matrix covariance;
  std::size_t samples = 0;
};

/// Draw k receives master.derive(k) and the heat options to use. With antithetic
/// sampling the draw is evaluated twice on copies of the same stream, once negated,
/// and the two results are averaged. Results do not depend on the worker count.
using McDraw = std::function<Vector(RandomStream& rng, const HeatOptions& heat)>;
McMoments monte_carlo(const McDraw& draw, int width, std::size_t n_samples,
                      const RandomStream& master, const McOptions& opts = {});

using ConfigFunction = std::function<double(const Configuration&)>;

/// T_t F(gamma) by Monte Carlo over n_samples heat_step_config draws.
McEstimate semigroup_expectation(const ConfigFunction& f, const Configuration& gamma, double t,
                                 std::size_t n_samples, const RandomStream& master,
                                 const McOptions& opts = {});

/// Synchronous coupling along the optimal matching: matched points receive the same
/// Gaussian increments, parallel transported from the gamma point to its partner on
/// curved models. Both outputs keep the labels of their inputs.
std::pair<Configuration, Configuration> coupled_heat_step(const Configuration& gamma,
                                                          const Configuration& sigma, double t,
                                                          RandomStream& rng,
                                                          const HeatOptions& opts = {});

/// Rows sample_id,time,point_id,x0,x1,... of n_samples heat paths observed at `times`
/// (nondecreasing, starting at or after 0).
void write_trajectories_csv(std::ostream& out, const Configuration& gamma,
                            const std::vector<double>& times, std::size_t n_samples,
                            const RandomStream& master, const HeatOptions& opts = {});

}  // namespace upsilon
