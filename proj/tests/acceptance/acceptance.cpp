// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "upsilon/approximation.hpp"
#include "upsilon/dynamics.hpp"
#include "upsilon/generators.hpp"
#include "upsilon/runner.hpp"
#include "upsilon/transport.hpp"
#include "upsilon/verify.hpp"

using namespace upsilon;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // <= 0: no limit
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

Configuration points_near_bumps(const SpaceForm& space, const CylinderFunction& f, std::size_t n, RandomStream& rng) {
  std::vector<BasePoint> pts;
  for (std::size_t k = 0; k < n; ++k) {
    const TestFunction& phi = f.inners[k % f.inners.size()];
    pts.push_back(sample_uniform_ball(space, phi.center, 0.8 * phi.radius, rng));
  }
  return Configuration(space, pts);
}

// Points kept a few diffusion lengths away from the steep outer band of every bump, where the
// short-time expansion of the heat semigroup is still far from its limit at t ~ 1e-3.
std::optional<Configuration> resolved_points(const SpaceForm& space, const CylinderFunction& f, std::size_t n,
                                             RandomStream& rng) {
  constexpr double kClearance = 0.2;
  std::vector<BasePoint> pts;
  for (std::size_t k = 0; k < n; ++k) {
    const TestFunction& phi = f.inners[k % f.inners.size()];
    bool found = false;
    for (int attempt = 0; attempt < 100 && !found; ++attempt) {
      BasePoint p = sample_uniform_ball(space, phi.center, 0.7 * phi.radius, rng);
      bool clear = true;
      for (const auto& other : f.inners) {
        const double d = geodesic_distance(space, p, other.center);
        clear = clear && (d <= 0.7 * other.radius - kClearance || d >= other.radius + kClearance);
      }
      if (clear) {
        pts.push_back(std::move(p));
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }
  return Configuration(space, pts);
}

const std::vector<SpaceForm> kModels{SpaceForm::euclidean(2), SpaceForm::sphere(1.0), SpaceForm::hyperbolic()};

// 1. Assignment against factorial enumeration.
Outcome matching_oracle() {
  RandomStream rng(101);
  double worst = 0.0;
  for (const auto& space : {SpaceForm::euclidean(2), SpaceForm::hyperbolic()}) {
    for (std::size_t n = 2; n <= 7; ++n) {
      for (int trial = 0; trial < 1000; ++trial) {
        const Configuration a = random_configuration(space, n, 2.0, rng);
        const Configuration b = random_configuration(space, n, 2.0, rng);
        const double bf = oracle::brute_force_assignment(squared_distance_matrix(a, b)).cost;
        worst = std::max(worst, std::abs(d_upsilon(a, b).squared - bf) / std::max(bf, 1e-300));
      }
    }
  }
  return {worst <= 1e-12, fmt("12000 instances, worst relative error %.3g (limit 1e-12)", worst)};
}

// 2. Configuration geodesics have constant speed.
Outcome geodesic_property() {
  RandomStream rng(102);
  double worst = 0.0;
  for (int pair = 0; pair < 1000; ++pair) {
    const SpaceForm& space = kModels[pair % kModels.size()];
    const std::size_t n = 1 + pair % 5;
    const double extent = space.kind() == SpaceKind::sphere2 ? 1.2 : 2.0;
    const Configuration g0 = random_configuration(space, n, extent, rng);
    const Configuration g1 = random_configuration(space, n, extent, rng);
    const Matching m = optimal_matching(g0, g1);
    const double d = std::sqrt(m.squared_cost);
    for (int k = 0; k < 10; ++k) {
      const double s = rng.uniform(), t = rng.uniform();
      const double dst = d_upsilon(config_geodesic(g0, g1, m, s), config_geodesic(g0, g1, m, t)).distance();
      worst = std::max(worst, std::abs(dst - std::abs(t - s) * d));
    }
  }
  return {worst <= 1e-9, fmt("1000 pairs x 10 (s,t), worst deviation %.3g (limit 1e-9)", worst)};
}

// 3. Four-point comparison.
Outcome quadruple() {
  RandomStream rng(103);
  std::string detail;
  bool pass = true;
  const std::pair<SpaceForm, double> cases[] = {
      {SpaceForm::euclidean(2), 0.0}, {SpaceForm::hyperbolic(), -1.0}, {SpaceForm::sphere(1.0), 1.0}};
  for (const auto& [space, k] : cases) {
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 10000; ++trial) {
      const std::size_t n = 1 + trial % 5;
      Configuration g[4] = {random_configuration(space, n, 2.0, rng), random_configuration(space, n, 2.0, rng),
                            random_configuration(space, n, 2.0, rng), random_configuration(space, n, 2.0, rng)};
      worst = std::min(worst, check_quadruple(g[0], g[1], g[2], g[3], k).margin);
    }
    pass = pass && worst >= -1e-9;
    detail += space.name() + " min margin " + fmt("%.3g", worst) + "; ";
  }
  return {pass, detail + "10^4 each, limit -1e-9"};
}

// 4. Bochner inequality and the closed-form Gamma_2.
Outcome bochner() {
  RandomStream rng(104);
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& space : kModels) {
    for (int trial = 0; trial < 1000; ++trial) {
      const CylinderFunction f = random_cylinder(space, 1 + trial % 4, 1.5, rng);
      const Configuration g = random_configuration(space, 1 + trial % 5, 1.5, rng);
      worst_margin = std::min(worst_margin, check_bochner(f, g).margin);
    }
  }
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SpaceForm& space = kModels[trial % kModels.size()];
    const CylinderFunction f = random_cylinder(space, 1 + trial % 3, 1.0, rng);
    const Configuration g = points_near_bumps(space, f, 1 + trial % 3, rng);
    const oracle::ConfigFn fn = [&](const Configuration& c) { return eval_cylinder(f, c); };
    const double fd = oracle::fd_gamma2(fn, g, 1e-3, 2.5e-3);
    const double closed = gamma2_cylinder(f, g);
    worst_rel = std::max(worst_rel, std::abs(closed - fd) / std::max(std::abs(fd), 1e-12));
  }
  return {worst_margin >= -1e-8 && worst_rel <= 1e-4,
          fmt("3000 instances min margin %.3g (limit -1e-8); nested-FD worst relative error %.3g (limit 1e-4)",
              worst_margin, worst_rel)};
}

// 5. Closed-form Laplacian against the generator quotient of the heat semigroup.
Outcome laplacian_consistency() {
  RandomStream rng(105);
  int failures = 0;
  double worst_z = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const SpaceForm& space = kModels[inst % kModels.size()];
    CylinderFunction f;
    std::optional<Configuration> drawn;
    while (!drawn) {
      f = random_cylinder(space, 1 + inst % 3, 1.0, rng);
      drawn = resolved_points(space, f, 1 + inst % 3, rng);
    }
    const Configuration& g = *drawn;
    const ConfigFunction fn = [&](const Configuration& c) { return eval_cylinder(f, c); };
    const double f0 = fn(g);
    McOptions mc;
    mc.antithetic = true;
    auto quotient = [&](double t, std::uint64_t seed) {
      const McEstimate e = semigroup_expectation(fn, g, t, 100000, RandomStream(seed), mc);
      return std::pair{(e.estimate - f0) / t, e.std_error / t};
    };
    const auto [q1, s1] = quotient(1e-3, rng.next());
    const auto [q2, s2] = quotient(5e-4, rng.next());
    const double extrapolated = 2.0 * q2 - q1;
    const double se = std::sqrt(4.0 * s2 * s2 + s1 * s1);
    const double z = std::abs(laplacian_cylinder(f, g) - extrapolated) / se;
    worst_z = std::max(worst_z, z);
    failures += z > 3.0 ? 1 : 0;
  }
  return {failures == 0, fmt("20 instances, worst |closed - FD| / se = %.3g (limit 3), failures %.0f", worst_z, failures)};
}

// 6. Gradient estimate, Euclidean.
Outcome gradient_estimate() {
  RandomStream rng(106);
  const SpaceForm e2 = SpaceForm::euclidean(2);
  const double ts[] = {0.05, 0.1, 0.5};
  int failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 50; ++inst) {
    const CylinderFunction f = random_cylinder(e2, 1 + inst % 3, 1.0, rng);
    const Configuration g = points_near_bumps(e2, f, 1 + inst % 3, rng);
    const CheckReport r = check_gradient_estimate(f, g, ts[inst % 3], 100000, rng.next());
    const double z = *r.std_error > 0 ? r.margin / *r.std_error : (r.margin >= 0 ? 0.0 : -INFINITY);
    worst = std::min(worst, z);
    failures += r.margin >= -2.0 * *r.std_error ? 0 : 1;
  }
  return {failures == 0, fmt("50 instances, min margin / se = %.3g (limit -2), failures %.0f", worst, failures)};
}

// 7. Wasserstein contraction.
Outcome contraction() {
  RandomStream rng(107);
  const SpaceForm e2 = SpaceForm::euclidean(2), h = SpaceForm::hyperbolic();
  double worst_flat = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 1 + inst % 4;
    const Configuration g = random_configuration(e2, n, 2.0, rng), s = random_configuration(e2, n, 2.0, rng);
    worst_flat = std::max(worst_flat, std::abs(check_contraction(g, s, 0.1 + 0.02 * inst, 200, rng.next()).margin));
  }
  int failures = 0;
  double worst_ratio = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 1 + inst % 4;
    const Configuration g = random_configuration(h, n, 1.5, rng), s = random_configuration(h, n, 1.5, rng);
    const CheckReport r = check_contraction(g, s, 0.05, 200, rng.next());
    const double d = d_upsilon(g, s).distance();
    failures += r.statistic <= std::exp(0.05) * d + 2.0 * *r.std_error ? 0 : 1;
    worst_ratio = std::max(worst_ratio, r.statistic / (std::exp(0.05) * d));
  }
  return {worst_flat <= 1e-12 && failures == 0,
          fmt("Euclidean worst |margin| %.3g (limit 1e-12); hyperbolic worst W2 / (e^t d) = %.4f", worst_flat,
              worst_ratio) +
              (failures ? ", failures " + std::to_string(failures) : std::string())};
}

// 8. Heat-kernel tail bound with a chi-square cross-check.
Outcome heat_tail() {
  bool pass = true;
  std::string detail;
  const double t = 1.0;
  std::uint64_t seed = 108;
  for (int d : {1, 2}) {
    const SpaceForm space = SpaceForm::euclidean(d);
    for (double m : {4.0, 6.0, 8.0}) {
      const double r = m * std::sqrt(t);
      const CheckReport rep = check_heat_tail(space, r, t, 1000000, 0.45, seed++);
      const double x = r * r / (2.0 * t);
      const double chi = d == 1 ? std::erfc(std::sqrt(x / 2.0)) : std::exp(-x / 2.0);
      const bool below = rep.statistic <= rep.bound;
      const bool matches = std::abs(rep.statistic - chi) <= 3.0 * *rep.std_error;
      pass = pass && below && matches;
      detail += "d=" + std::to_string(d) + " r=" + fmt("%g", m) + "sqrt(t): " + fmt("%.3g vs chi2 %.3g", rep.statistic, chi) +
                (below && matches ? "; " : " FAILED; ");
    }
  }
  return {pass, detail};
}

// 9. Hamilton-Jacobi residual of the Hopf-Lax semigroup.
Outcome hamilton_jacobi() {
  std::vector<double> grid;
  for (int k = 0; k < 5; ++k) grid.push_back(0.1 + 1e-3 * k);
  HopfLaxOptions opts;
  opts.tolerance = 1e-10;
  const CheckReport fixture =
      check_hj(Functional::distance_sum(BasePoint{0.0}), Configuration(SpaceForm::euclidean(1), {BasePoint{1.5}}), grid,
               1e-3, opts);
  RandomStream rng(109);
  const SpaceForm e2 = SpaceForm::euclidean(2);
  double worst = 0.0;
  bool flagged = !fixture.flags.empty();
  for (int inst = 0; inst < 10; ++inst) {
    const CylinderFunction c = random_cylinder(e2, 2, 1.0, rng);
    const Configuration g = points_near_bumps(e2, c, 1 + inst % 3, rng);
    opts.seed = rng.next();
    const CheckReport r = check_hj(Functional::cylinder(c), g, grid, 5e-3, opts);
    worst = std::max(worst, r.statistic);
    flagged = flagged || !r.flags.empty();
  }
  return {fixture.statistic <= 1e-3 && worst <= 5e-3,
          fmt("fixture residual %.3g (limit 1e-3); multi-point worst residual %.3g (limit 5e-3)", fixture.statistic, worst) +
              (flagged ? "; solver non-convergence flagged" : "")};
}

// 10. Log-Harnack inequality, Euclidean.
Outcome log_harnack() {
  RandomStream rng(110);
  const SpaceForm e2 = SpaceForm::euclidean(2);
  int failures = 0, jensen_failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 1 + inst % 3;
    const CylinderFunction c = random_cylinder(e2, 2, 1.0, rng);
    const Functional f = Functional::exp_cylinder(c);
    const Configuration g = points_near_bumps(e2, c, n, rng);
    const Configuration s = random_configuration(e2, n, 1.0, rng);
    const CheckReport r = check_log_harnack(f, g, s, 0.1, 100000, rng.next());
    const CheckReport j = check_log_harnack(f, g, g, 0.1, 100000, rng.next());
    failures += r.margin >= -2.0 * *r.std_error ? 0 : 1;
    jensen_failures += j.margin >= -2.0 * *j.std_error ? 0 : 1;
    if (*j.std_error > 0) worst = std::min(worst, j.margin / *j.std_error);
  }
  return {failures == 0 && jensen_failures == 0,
          fmt("20 instances, failures %.0f; Jensen failures %.0f", failures, jensen_failures) +
              fmt(", Jensen min margin / se %.3g", worst)};
}

// 11. Smeared approximation.
Outcome smeared_convergence() {
  RandomStream rng(111);
  bool pass = true;
  std::string detail;
  const std::vector<std::size_t> grid{1, 2, 4, 8, 16};
  for (const auto& space : kModels) {
    const Configuration g = random_configuration(space, 4, 3.0, rng);
    const std::vector<Configuration> mu(200, g);
    for (const auto& p : check_appendix_convergence(mu, mu, grid, rng.next())) {
      pass = pass && p.w2_squared <= 1.0 / static_cast<double>(p.n) + 2.0 * p.w2_squared_std_error;
    }
  }
  detail += pass ? "identical measures within 1/n; " : "identical measures exceed 1/n; ";

  const SpaceForm e2 = SpaceForm::euclidean(2);
  std::vector<Configuration> mu, nu;
  for (int k = 0; k < 100; ++k) {
    mu.push_back(random_configuration(e2, 3, 2.0, rng));
    nu.push_back(random_configuration(e2, 3, 8.0, rng));
  }
  const auto seq = check_appendix_convergence(mu, nu, grid, rng.next());
  const bool decreasing = seq.back().w2_estimate < seq.front().w2_estimate;
  pass = pass && decreasing;
  detail += fmt("generic pair W2 at n=1 %.4g, at n=16 %.4g; ", seq.front().w2_estimate, seq.back().w2_estimate);

  // Ball volumes depend only on the radius in a space form, so the entropy is k log(m(B) / m(B_alpha)).
  auto volume = [](const SpaceForm& s, double r) {
    switch (s.kind()) {
      case SpaceKind::euclidean:
        return s.dim() == 1 ? 2 * r : s.dim() == 2 ? std::numbers::pi * r * r : 4.0 / 3.0 * std::numbers::pi * r * r * r;
      case SpaceKind::sphere2:
        return 2 * std::numbers::pi * s.radius() * s.radius() * (1 - std::cos(r / s.radius()));
      case SpaceKind::hyperbolic2:
        return 2 * std::numbers::pi * (std::cosh(r) - 1);
    }
    return 0.0;
  };
  double worst = 0.0;
  for (const auto& space : {SpaceForm::euclidean(1), SpaceForm::euclidean(2), SpaceForm::euclidean(3),
                            SpaceForm::sphere(2.0), SpaceForm::hyperbolic()}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Configuration xi = random_configuration(space, 1 + trial % 6, 2.0, rng);
      const double radius = 1.0 + 2.0 * rng.uniform();
      const Region ball = Region::ball(model_origin(space), radius);
      const auto k = restrict(xi, ball).size();
      if (k == 0) continue;
      const std::size_t n = 1 + trial;
      const double alpha = 1.0 / (2.0 * std::sqrt(static_cast<double>(n * k)));
      const double closed = static_cast<double>(k) * std::log(volume(space, radius) / volume(space, alpha));
      const EntropyBound e = entropy_smear_bound(xi, ball, n);
      worst = std::max(worst, std::abs(e.value - closed));
    }
  }
  pass = pass && worst <= 1e-10;
  detail += fmt("entropy closed form worst deviation %.3g (limit 1e-10)", worst);
  return {pass, detail};
}

// 12. Whole-suite determinism through the runner.
Outcome determinism() {
  const std::string text = R"(
seed = 20240601
[space]
kind = "hyperbolic2"
[samples]
default = 300
[[checks]]
name = "quadruple"
instances = 20
[[checks]]
name = "bochner"
instances = 10
[[checks]]
name = "gradient_estimate"
t = 0.05
instances = 2
[[checks]]
name = "contraction"
t = 0.05
instances = 3
[[checks]]
name = "log_harnack"
t = 0.1
instances = 2
[[checks]]
name = "hamilton_jacobi"
points = 1
instances = 1
[[checks]]
name = "heat_tail"
r = 1.5
t = 0.3
lambda = 0.45
[[checks]]
name = "bishop_gromov"
r_grid = [1.0, 2.0, 4.0, 8.0]
[[checks]]
name = "appendix_convergence"
n_grid = [1, 2, 4]
samples = 30
[[checks]]
name = "entropy_smear"
n = 5
radius = 2.0
[[checks]]
name = "quadruple"
space = { kind = "sphere2", radius = 1.0 }
instances = 5
[[checks]]
name = "gradient_estimate"
space = { kind = "euclidean", dim = 2 }
t = 0.1
instances = 2
)";
  const RunConfig cfg = parse_run_config(text, "acceptance-suite");
  std::ostringstream a, b, diag;
  const int ca = run(cfg, a, diag, 1);
  const int cb = run(cfg, b, diag, 2);
  std::istringstream ia(a.str()), ib(b.str());
  std::string la, lb;
  std::size_t lines = 0, mismatches = 0;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(ia, la));
    const bool gb = static_cast<bool>(std::getline(ib, lb));
    if (!ga && !gb) break;
    ++lines;
    if (ga != gb || strip_runtime(la) != strip_runtime(lb)) ++mismatches;
  }
  const bool pass = ca == cb && ca != 2 && mismatches == 0 && lines > 0;
  return {pass, std::to_string(lines) + " report lines, " + std::to_string(mismatches) + " differ after removing runtime" +
                    (ca == 2 ? "; setup error: " + diag.str() : "")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "matching oracle", 60, matching_oracle},
      {2, "geodesic property", 30, geodesic_property},
      {3, "quadruple comparison", 300, quadruple},
      {4, "Bochner inequality", 300, bochner},
      {5, "Laplacian consistency", 600, laplacian_consistency},
      {6, "gradient estimate", 600, gradient_estimate},
      {7, "contraction", 900, contraction},
      {8, "heat tail", 300, heat_tail},
      {9, "Hamilton-Jacobi", 600, hamilton_jacobi},
      {10, "log-Harnack", 600, log_harnack},
      {11, "smeared approximation convergence", 600, smeared_convergence},
      {12, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s <= 0 || secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s [%2d] %s: %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), secs,
                in_time ? "" : fmt(", over the %.0f s limit", c.time_limit_s).c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
