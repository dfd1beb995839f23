#include "upsilon/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "upsilon/errors.hpp"
#include "upsilon/transport.hpp"

namespace upsilon {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

double json_number(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ParseError("expected a number, got \"" + s + "\"");
  }
  return j.get<double>();
}

}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["check"] = check_name;
  j["params"] = params;
  j["statistic"] = extended_number(statistic);
  j["bound"] = extended_number(bound);
  j["margin"] = extended_number(margin);
  j["tolerance"] = extended_number(tolerance);
  j["std_error"] = std_error ? extended_number(*std_error) : nlohmann::json(nullptr);
  j["passed"] = passed;
  j["skipped"] = skipped;
  j["flags"] = flags;
  j["seed"] = seed;
  j["runtime_ms"] = runtime_ms;
  return j;
}

CheckReport CheckReport::from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kReportSchema) throw ParseError("unknown report schema");
    CheckReport r;
    r.check_name = j.at("check").get<std::string>();
    r.params = j.at("params");
    r.statistic = json_number(j.at("statistic"));
    r.bound = json_number(j.at("bound"));
    r.margin = json_number(j.at("margin"));
    r.tolerance = json_number(j.at("tolerance"));
    if (!j.at("std_error").is_null()) r.std_error = json_number(j.at("std_error"));
    r.passed = j.at("passed").get<bool>();
    r.skipped = j.value("skipped", false);
    r.flags = j.value("flags", std::vector<std::string>{});
    r.seed = j.at("seed").get<std::uint64_t>();
    r.runtime_ms = j.at("runtime_ms").get<std::int64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad report: ") + e.what());
  }
}

void finalize_report(CheckReport& r) {
  if (r.skipped) {
    r.margin = std::numeric_limits<double>::infinity();
    r.passed = true;
    return;
  }
  r.margin = r.bound - r.statistic;
  const double slack = r.tolerance + (r.std_error ? kReportZ * *r.std_error : 0.0);
  r.passed = std::isfinite(r.statistic) && !std::isnan(r.margin) && r.margin >= -slack;
}

CheckReport skipped_report(std::string name, nlohmann::json params, std::string reason) {
  CheckReport r;
  r.check_name = std::move(name);
  r.params = std::move(params);
  r.statistic = 0.0;
  r.bound = 0.0;
  r.skipped = true;
  r.flags.push_back(std::move(reason));
  finalize_report(r);
  return r;
}

QuadrupleSides quadruple_sides(const double d0[3], const double d[3][3], double k) {
  QuadrupleSides s;
  if (k == 0.0) {
    for (int i = 0; i < 3; ++i) s.bound += d0[i] * d0[i];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) s.statistic += d[i][j] * d[i][j];
    }
    s.statistic /= 6.0;
    return s;
  }
  const double lambda = std::sqrt(std::abs(k));
  if (k < 0.0) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += std::cosh(lambda * d0[i]);
    s.bound = sum * sum;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) s.statistic += std::cosh(lambda * d[i][j]);
    }
    return s;
  }
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += std::cos(lambda * d0[i]);
  s.statistic = sum * sum;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) s.bound += std::cos(lambda * d[i][j]);
  }
  return s;
}

CheckReport check_quadruple(const Configuration& g0, const Configuration& g1,
                            const Configuration& g2, const Configuration& g3, double curvature,
                            double tolerance) {
  const auto start = Clock::now();
  const double k = std::min(curvature, 0.0);
  nlohmann::json params = {{"curvature", curvature}, {"effective_curvature", k}, {"n_points", g0.size()}};
  const Configuration* others[3] = {&g1, &g2, &g3};
  for (const auto* g : others) {
    if (g->size() != g0.size()) {
      auto r = skipped_report("quadruple", params, "infinite_distance");
      r.runtime_ms = elapsed_ms(start);
      return r;
    }
  }
  double d0[3];
  double d[3][3];
  for (int i = 0; i < 3; ++i) {
    d0[i] = d_upsilon(g0, *others[i]).distance();
    for (int j = 0; j < 3; ++j) d[i][j] = i == j ? 0.0 : d_upsilon(*others[i], *others[j]).distance();
  }
  const QuadrupleSides s = quadruple_sides(d0, d, k);
  CheckReport r;
  r.check_name = "quadruple";
  r.params = std::move(params);
  r.statistic = s.statistic;
  r.bound = s.bound;
  r.tolerance = tolerance;
  finalize_report(r);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

CheckReport check_bochner(const CylinderFunction& f, const Configuration& gamma, double tolerance) {
  const auto start = Clock::now();
  validate_cylinder(gamma.space(), f);
  const double k = gamma.space().ricci_lower();
  const double g1 = gamma_cylinder(f, gamma);
  const double g2 = gamma2_cylinder(f, gamma);
  CheckReport r;
  r.check_name = "bochner";
  r.params = {{"ricci_lower", k}, {"gamma", g1}, {"gamma2", g2}, {"n_points", gamma.size()}};
  r.statistic = k * g1 - g2;
  r.bound = 0.0;
  r.tolerance = tolerance;
  finalize_report(r);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

CheckReport check_gradient_estimate(const CylinderFunction& f, const Configuration& gamma,
                                    double t, std::size_t n_samples, std::uint64_t seed,
                                    const GradientEstimateOptions& opts) {
  const auto start = Clock::now();
  if (!(t >= 0.0)) throw DomainError("gradient estimate needs t >= 0");
  validate_cylinder(gamma.space(), f);
  const SpaceForm& space = gamma.space();
  const double k = space.ricci_lower();
  const double decay = std::exp(-2.0 * k * t);
  CheckReport r;
  r.check_name = "gradient_estimate";
  r.seed = seed;
  r.params = {{"t", t}, {"n_samples", n_samples}, {"ricci_lower", k}, {"n_points", gamma.size()}};

  if (t == 0.0 || gamma.empty()) {
    const double g = gamma_cylinder(f, gamma);
    r.statistic = g;
    r.bound = g;
    r.std_error = 0.0;
    finalize_report(r);
    r.runtime_ms = elapsed_ms(start);
    return r;
  }

  const int dim = space.dim();
  const auto n_points = static_cast<int>(gamma.size());
  const int width = 1 + n_points * dim;
  McDraw draw;
  std::vector<Matrix> frames;
  if (space.kind() == SpaceKind::euclidean) {
    // Heat flow commutes with the gradient: grad T_t F = T_t grad F.
    r.params["method"] = "commuting_gradient";
    draw = [&](RandomStream& rng, const HeatOptions& heat) {
      const Configuration moved = heat_step_config(gamma, t, rng, heat);
      Vector v(width);
      v[0] = gamma_cylinder(f, moved);
      const auto grads = grad_cylinder(f, moved);
      for (int p = 0; p < n_points; ++p) v.segment(1 + p * dim, dim) = grads[p];
      return v;
    };
  } else {
    // Central differences of the sample functional in normal coordinates, with the
    // same noise on both sides.
    r.params["method"] = "crn_finite_difference";
    r.params["fd_step"] = opts.fd_step;
    for (const auto& x : gamma.points()) frames.push_back(tangent_frame(space, x));
    const double h = opts.fd_step;
    draw = [&, h](RandomStream& rng, const HeatOptions& heat) {
      Vector v(width);
      const RandomStream state = rng;
      v[0] = gamma_cylinder(f, heat_step_config(gamma, t, rng, heat));
      for (int p = 0; p < n_points; ++p) {
        for (int c = 0; c < dim; ++c) {
          const Vector e = frames[p].col(c);
          RandomStream plus_rng = state;
          RandomStream minus_rng = state;
          const Configuration plus = gamma.with_point(p, exp_map(space, gamma[p], h * e));
          const Configuration minus = gamma.with_point(p, exp_map(space, gamma[p], -h * e));
          const double fp = eval_cylinder(f, heat_step_config(plus, t, plus_rng, heat));
          const double fm = eval_cylinder(f, heat_step_config(minus, t, minus_rng, heat));
          v[1 + p * dim + c] = (fp - fm) / (2.0 * h);
        }
      }
      return v;
    };
  }
  McOptions mc = opts.mc;
  const McMoments m = monte_carlo(draw, width, n_samples, RandomStream(seed), mc);
  const Vector grad = m.mean.tail(width - 1);
  // margin = decay * mean_Gamma - |mean_grad|^2, linearized for the standard error.
  Vector w(width);
  w[0] = decay;
  w.tail(width - 1) = -2.0 * grad;
  r.statistic = grad.squaredNorm();
  r.bound = decay * m.mean[0];
  r.std_error = std::sqrt(std::max(0.0, w.dot(m.covariance * w)));
  r.params["antithetic"] = mc.antithetic;
  finalize_report(r);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

CheckReport check_contraction(const Configuration& gamma, const Configuration& sigma, double t,
                              std::size_t n_samples, std::uint64_t seed, ContractionMode mode,
                              const McOptions& mc) {
  const auto start = Clock::now();
  const double k = gamma.space().ricci_lower();
  nlohmann::json params = {{"t", t},
                           {"n_samples", n_samples},
                           {"ricci_lower", k},
                           {"mode", mode == ContractionMode::coupled ? "coupled" : "independent"},
                           {"n_points", gamma.size()}};
  const ExtendedCost d0 = d_upsilon(gamma, sigma);
  if (d0.is_infinite()) {
    auto r = skipped_report("contraction", params, "infinite_distance");
    r.seed = seed;
    r.runtime_ms = elapsed_ms(start);
    return r;
  }
  if (n_samples == 0) throw DomainError("contraction check needs at least one sample");
  CheckReport r;
  r.check_name = "contraction";
  r.seed = seed;
  r.params = std::move(params);
  r.params["d_upsilon"] = d0.distance();
  r.bound = std::exp(-k * t) * d0.distance();
  // Round-off allowance: the Euclidean coupling reproduces the bound only up to summation error.
  r.tolerance = 1e-12 * std::max(1.0, d0.distance());

  const RandomStream master(seed);
  HeatOptions heat{mc.substep, false};
  std::vector<Configuration> a, b;
  a.reserve(n_samples);
  b.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    RandomStream rng = master.derive(s);
    if (mode == ContractionMode::coupled) {
      auto [x, y] = coupled_heat_step(gamma, sigma, t, rng, heat);
      a.push_back(std::move(x));
      b.push_back(std::move(y));
    } else {
      a.push_back(heat_step_config(gamma, t, rng, heat));
      RandomStream other = master.derive(s + n_samples);
      b.push_back(heat_step_config(sigma, t, other, heat));
    }
  }
  const EmpiricalW2 w2 = empirical_w2_detailed(a, b, mc.workers);
  r.params["empirical_w2"] = extended_number(w2.cost.distance());

  if (mode == ContractionMode::coupled) {
    // Cost of the synchronous coupling itself, pair by pair along the initial matching.
    const Matching matching = optimal_matching(gamma, sigma);
    std::vector<double> costs;
    costs.reserve(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) {
      double c = 0.0;
      for (const auto& [i, j] : matching.pairs) {
        const double d = geodesic_distance(gamma.space(), a[s][i], b[s][j]);
        c += d * d;
      }
      costs.push_back(c);
    }
    double mean = 0.0;
    for (double c : costs) mean += c;
    mean /= static_cast<double>(n_samples);
    double var = 0.0;
    for (double c : costs) var += (c - mean) * (c - mean);
    var = n_samples > 1 ? var / (static_cast<double>(n_samples) - 1.0) : 0.0;
    const double se_mean = std::sqrt(var / static_cast<double>(n_samples));
    r.statistic = std::sqrt(mean);
    r.std_error = mean > 0.0 ? se_mean / (2.0 * r.statistic) : 0.0;
  } else {
    const std::vector<double>& c = w2.matched_costs;
    double mean = w2.cost.squared;
    double var = 0.0;
    for (double x : c) var += (x - mean) * (x - mean);
    var = c.size() > 1 ? var / (static_cast<double>(c.size()) - 1.0) : 0.0;
    const double se_mean = std::sqrt(var / static_cast<double>(c.size()));
    r.statistic = w2.cost.distance();
    r.std_error = mean > 0.0 ? se_mean / (2.0 * r.statistic) : 0.0;
  }
  finalize_report(r);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

double log_harnack_constant(double k, double t) {
  if (!(t > 0.0)) throw DomainError("log-Harnack constant needs t > 0");
  if (std::abs(k * t) < 1e-8) return (1.0 + k * t) / (4.0 * t);
  return k / (2.0 * (1.0 - std::exp(-2.0 * k * t)));
}

CheckReport check_log_harnack(const Functional& f, const Configuration& gamma,
                              const Configuration& sigma, double t, std::size_t n_samples,
                              std::uint64_t seed, const McOptions& mc) {
  const auto start = Clock::now();
  const double k = gamma.space().ricci_lower();
  nlohmann::json params = {{"t", t}, {"n_samples", n_samples}, {"ricci_lower", k}, {"n_points", gamma.size()}};
  const ExtendedCost d = d_upsilon(gamma, sigma);
  if (d.is_infinite()) {
    auto r = skipped_report("log_harnack", params, "infinite_distance");
    r.seed = seed;
    r.runtime_ms = elapsed_ms(start);
    return r;
  }
  const double c = log_harnack_constant(k, t);
  const McMoments m = monte_carlo(
      [&](RandomStream& rng, const HeatOptions& heat) {
        RandomStream twin = rng;
        Vector v(2);
        const double fg = f.value(heat_step_config(gamma, t, rng, heat));
        const double fs = f.value(heat_step_config(sigma, t, twin, heat));
        if (!(fg > 0.0) || !(fs > 0.0)) throw DomainError("log-Harnack needs a positive functional");
        v << std::log(fg), fs;
        return v;
      },
      2, n_samples, RandomStream(seed), mc);
  CheckReport r;
  r.check_name = "log_harnack";
  r.seed = seed;
  r.params = std::move(params);
  r.params["constant"] = c;
  r.params["d_upsilon_squared"] = d.squared;
  r.statistic = m.mean[0];
  r.bound = std::log(m.mean[1]) + c * d.squared;
  Vector w(2);
  w << -1.0, 1.0 / m.mean[1];
  r.std_error = std::sqrt(std::max(0.0, w.dot(m.covariance * w)));
  finalize_report(r);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

CheckReport check_hj(const Functional& f, const Configuration& gamma,
                     const std::vector<double>& t_grid, double tolerance,
                     const HopfLaxOptions& opts) {
  const auto start = Clock::now();
  if (t_grid.size() < 3) throw DomainError("Hamilton-Jacobi check needs at least three grid times");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1]))) {
      throw DomainError("grid times must be positive and increasing");
    }
  }
  std::vector<double> q(t_grid.size());
  std::vector<double> slope(t_grid.size());
  bool converged = true;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const HopfLaxResult hl = hopf_lax(f, gamma, t_grid[k], opts);
    q[k] = hl.value;
    slope[k] = d_upsilon(gamma, hl.minimizer).distance() / t_grid[k];
    converged = converged && hl.converged;
  }
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < t_grid.size(); ++k) {
    const double dq = (q[k + 1] - q[k - 1]) / (t_grid[k + 1] - t_grid[k - 1]);
    worst = std::max(worst, std::abs(dq + 0.5 * slope[k] * slope[k]));
  }
  CheckReport r;
  r.check_name = "hamilton_jacobi";
  r.params = {{"t_min", t_grid.front()},
              {"t_max", t_grid.back()},
              {"grid_points", t_grid.size()},
              {"n_points", gamma.size()},
              {"functional", f.to_json()}};
  r.statistic = worst;
  r.bound = tolerance;
  if (!converged) r.flags.push_back("hopf_lax_not_converged");
  finalize_report(r);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

double wilson_std_error(std::size_t hits, std::size_t n) {
  if (n == 0) throw DomainError("frequency of zero trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  // Upper limit of the z = 1 Wilson score interval, measured from the raw frequency.
  const double denom = 1.0 + 1.0 / nn;
  const double center = (p + 0.5 / nn) / denom;
  const double half = std::sqrt(p * (1.0 - p) / nn + 0.25 / (nn * nn)) / denom;
  return center + half - p;
}

CheckReport check_heat_tail(const SpaceForm& space, double r_tail, double t, std::size_t n_samples,
                            double lambda, std::uint64_t seed, const McOptions& mc) {
  const auto start = Clock::now();
  if (!(lambda > 0.0 && lambda <= 0.5)) throw DomainError("heat tail check needs lambda in (0, 1/2]");
  if (!(t > 0.0)) throw DomainError("heat tail check needs t > 0");
  if (!(r_tail >= 0.0)) throw DomainError("heat tail check needs r >= 0");
  const BasePoint x = model_origin(space);
  const McMoments m = monte_carlo(
      [&](RandomStream& rng, const HeatOptions& heat) {
        Vector v(1);
        v[0] = geodesic_distance(space, x, heat_step(space, x, t, rng, heat)) >= r_tail ? 1.0 : 0.0;
        return v;
      },
      1, n_samples, RandomStream(seed), McOptions{false, mc.substep, mc.workers});
  const auto hits = static_cast<std::size_t>(std::llround(m.mean[0] * static_cast<double>(n_samples)));
  CheckReport r;
  r.check_name = "heat_tail";
  r.seed = seed;
  r.params = {{"space", space_to_json(space)}, {"r", r_tail}, {"t", t}, {"lambda", lambda}, {"n_samples", n_samples}};
  r.statistic = m.mean[0];
  r.bound = heat_tail_bound(space, r_tail, t, lambda);
  r.std_error = wilson_std_error(hits, n_samples);
  finalize_report(r);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

double bishop_gromov_exponent(const SpaceForm& space) {
  return space.kind() == SpaceKind::hyperbolic2 ? 2.0 : static_cast<double>(space.dim());
}

CheckReport check_bishop_gromov(const SpaceForm& space, const std::vector<double>& r_grid) {
  const auto start = Clock::now();
  if (r_grid.empty()) throw DomainError("Bishop-Gromov check needs a radius grid");
  const double c = bishop_gromov_exponent(space);
  const double r_cap = space.kind() == SpaceKind::sphere2 ? std::numbers::pi * space.radius()
                                                           : std::numeric_limits<double>::infinity();
  const double v1 = ball_volume(space, std::min(1.0, r_cap));
  double worst = 0.0;
  for (double r : r_grid) {
    if (!(r >= 1.0)) throw DomainError("Bishop-Gromov radii must be at least 1");
    // vol(B_r) / (vol(B_1) e^{c r}) in log form to survive large r.
    const double ratio = std::exp(std::log(ball_volume(space, std::min(r, r_cap))) - std::log(v1) - c * r);
    worst = std::max(worst, ratio);
  }
  CheckReport r;
  r.check_name = "bishop_gromov";
  r.params = {{"space", space_to_json(space)}, {"exponent", c}, {"r_max", *std::max_element(r_grid.begin(), r_grid.end())}};
  r.statistic = worst;
  r.bound = 1.0;
  finalize_report(r);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

}  // namespace upsilon
