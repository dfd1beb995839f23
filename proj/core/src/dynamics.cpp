#include "upsilon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include "upsilon/errors.hpp"
#include "upsilon/transport.hpp"

namespace upsilon {

Configuration heat_step_config(const Configuration& gamma, double t, RandomStream& rng,
                               const HeatOptions& opts) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("heat time must be nonnegative");
  if (t == 0.0) return gamma;
  std::vector<BasePoint> pts;
  pts.reserve(gamma.size());
  for (const auto& x : gamma.points()) pts.push_back(heat_step(gamma.space(), x, t, rng, opts));
  return Configuration::unchecked(gamma.space(), std::move(pts));
}

McMoments monte_carlo(const McDraw& draw, int width, std::size_t n_samples,
                      const RandomStream& master, const McOptions& opts) {
  if (n_samples == 0) throw DomainError("Monte Carlo needs at least one sample");
  if (width < 1) throw DomainError("statistic width must be positive");
  Matrix values(width, static_cast<Eigen::Index>(n_samples));

  auto run_range = [&](std::size_t begin, std::size_t end) {
    HeatOptions plus{opts.substep, false};
    HeatOptions minus{opts.substep, true};
    for (std::size_t k = begin; k < end; ++k) {
      RandomStream rng = master.derive(k);
      if (opts.antithetic) {
        RandomStream twin = rng;
        const Vector a = draw(rng, plus);
        const Vector b = draw(twin, minus);
        values.col(static_cast<Eigen::Index>(k)) = 0.5 * (a + b);
      } else {
        values.col(static_cast<Eigen::Index>(k)) = draw(rng, plus);
      }
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.workers, 1)), 1, n_samples);
  if (workers == 1) {
    run_range(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_samples + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n_samples, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  McMoments m;
  m.samples = n_samples;
  m.mean = values.rowwise().mean();
  // Constant rows are reported exactly, without summation rounding.
  for (Eigen::Index r = 0; r < width; ++r) {
    if (values.row(r).minCoeff() == values.row(r).maxCoeff()) m.mean[r] = values(r, 0);
  }
  const Matrix centered = values.colwise() - m.mean;
  const double n = static_cast<double>(n_samples);
  if (n_samples > 1) {
    m.covariance = centered * centered.transpose() / ((n - 1.0) * n);
  } else {
    m.covariance = Matrix::Zero(width, width);
  }
  return m;
}

McEstimate semigroup_expectation(const ConfigFunction& f, const Configuration& gamma, double t,
                                 std::size_t n_samples, const RandomStream& master,
                                 const McOptions& opts) {
  if (n_samples == 0) throw DomainError("semigroup expectation needs at least one sample");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("heat time must be nonnegative");
  if (t == 0.0) return {f(gamma), 0.0};
  const McMoments m = monte_carlo(
      [&](RandomStream& rng, const HeatOptions& heat) {
        Vector v(1);
        v[0] = f(heat_step_config(gamma, t, rng, heat));
        return v;
      },
      1, n_samples, master, opts);
  return {m.mean[0], std::sqrt(std::max(0.0, m.covariance(0, 0)))};
}

std::pair<Configuration, Configuration> coupled_heat_step(const Configuration& gamma,
                                                          const Configuration& sigma, double t,
                                                          RandomStream& rng,
                                                          const HeatOptions& opts) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("heat time must be nonnegative");
  const Matching matching = optimal_matching(gamma, sigma);
  if (t == 0.0) return {gamma, sigma};
  const SpaceForm& space = gamma.space();
  const double sign = opts.negate ? -1.0 : 1.0;
  std::vector<BasePoint> a = gamma.points();
  std::vector<BasePoint> b = sigma.points();
  const int steps = heat_substeps(space, t, opts);
  const double h = t / steps;
  const double antipodal = std::numbers::pi * space.radius() * (1.0 - 1e-9);
  for (const auto& [i, j] : matching.pairs) {
    BasePoint x = a[i];
    BasePoint y = b[j];
    for (int k = 0; k < steps; ++k) {
      const Vector xi = sign * tangent_gaussian(space, x, 2.0 * h, rng);
      Vector eta;
      if (space.kind() == SpaceKind::sphere2 && geodesic_distance(space, x, y) >= antipodal) {
        // No unique connecting geodesic: this pair moves independently for one substep.
        eta = sign * tangent_gaussian(space, y, 2.0 * h, rng);
      } else {
        eta = parallel_transport(space, x, y, xi);
      }
      if (space.kind() == SpaceKind::euclidean) {
        x = BasePoint(x.coords + xi);
        y = BasePoint(y.coords + eta);
      } else {
        x = exp_map(space, x, xi);
        y = exp_map(space, y, eta);
      }
    }
    a[i] = std::move(x);
    b[j] = std::move(y);
  }
  return {Configuration::unchecked(space, std::move(a)), Configuration::unchecked(space, std::move(b))};
}

void write_trajectories_csv(std::ostream& out, const Configuration& gamma,
                            const std::vector<double>& times, std::size_t n_samples,
                            const RandomStream& master, const HeatOptions& opts) {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] < times[k - 1]) throw DomainError("trajectory times must be nondecreasing");
  }
  if (!times.empty() && times.front() < 0.0) throw DomainError("trajectory times must be nonnegative");
  const int n = gamma.space().ambient_dim();
  out << "sample_id,time,point_id";
  for (int i = 0; i < n; ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t s = 0; s < n_samples; ++s) {
    RandomStream rng = master.derive(s);
    Configuration current = gamma;
    double now = 0.0;
    for (double time : times) {
      current = heat_step_config(current, time - now, rng, opts);
      now = time;
      for (std::size_t p = 0; p < current.size(); ++p) {
        out << s << ',' << format_double(time) << ',' << p;
        for (int i = 0; i < n; ++i) out << ',' << format_double(current[p].coords[i]);
        out << '\n';
      }
    }
  }
}

}  // namespace upsilon
