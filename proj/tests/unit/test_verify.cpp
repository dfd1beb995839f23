#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "upsilon/errors.hpp"
#include "upsilon/generators.hpp"
#include "upsilon/transport.hpp"
#include "upsilon/verify.hpp"

using namespace upsilon;

namespace {

Configuration line(std::initializer_list<double> xs) {
  std::vector<BasePoint> pts;
  for (double x : xs) pts.push_back(BasePoint{x});
  return Configuration(SpaceForm::euclidean(1), pts);
}

Configuration scaled(const Configuration& g, double s) {
  std::vector<BasePoint> pts;
  for (const auto& p : g.points()) pts.emplace_back(s * p.coords);
  return Configuration(g.space(), pts);
}

CylinderFunction single(const TestFunction& phi) {
  CylinderFunction f;
  f.outer = OuterFunction::linear(Vector::Ones(1));
  f.inners = {phi};
  return f;
}

}  // namespace

TEST(CheckReport, FinalizeAndSkip) {
  CheckReport r;
  r.statistic = 1.0;
  r.bound = 0.9;
  r.tolerance = 0.05;
  r.std_error = 0.03;
  finalize_report(r);
  EXPECT_NEAR(r.margin, -0.1, 1e-15);
  EXPECT_TRUE(r.passed);  // -0.1 >= -(0.05 + 2 * 0.03)
  r.std_error = 0.02;
  finalize_report(r);
  EXPECT_FALSE(r.passed);
  const CheckReport s = skipped_report("contraction", {}, "infinite_distance");
  EXPECT_TRUE(s.passed);
  EXPECT_TRUE(s.skipped);
  EXPECT_TRUE(std::isinf(s.margin));
}

TEST(CheckReport, JsonRoundTrip) {
  CheckReport r;
  r.check_name = "x";
  r.params = {{"a", 1}};
  r.statistic = 0.1;
  r.bound = 1.0 / 3.0;
  r.tolerance = 1e-9;
  r.std_error = 0.5;
  r.flags = {"f"};
  r.seed = 18446744073709551615ull;
  r.runtime_ms = 12;
  finalize_report(r);
  const nlohmann::json j = r.to_json();
  EXPECT_EQ(j.at("schema"), kReportSchema);
  const CheckReport back = CheckReport::from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.to_json(), j);
  EXPECT_EQ(back.bound, r.bound);
  const CheckReport skipped = skipped_report("quadruple", {}, "infinite_distance");
  const nlohmann::json k = skipped.to_json();
  EXPECT_EQ(k.at("margin"), "inf");
  EXPECT_TRUE(std::isinf(CheckReport::from_json(nlohmann::json::parse(k.dump())).margin));
  EXPECT_THROW(CheckReport::from_json(nlohmann::json::parse(R"({"schema":"other"})")), ParseError);
}

TEST(CheckQuadruple, Examples) {
  const SpaceForm h = SpaceForm::hyperbolic();
  const Configuration g(h, {model_origin(h), hyperboloid_point(0.7, 1.0)});
  const CheckReport same = check_quadruple(g, g, g, g, -1.0);
  EXPECT_EQ(same.statistic, 9.0);
  EXPECT_EQ(same.bound, 9.0);
  EXPECT_EQ(same.margin, 0.0);
  EXPECT_TRUE(same.passed);

  const CheckReport flat = check_quadruple(line({0.0}), line({1.0}), line({2.0}), line({3.0}), 0.0);
  EXPECT_DOUBLE_EQ(flat.bound, 14.0);
  EXPECT_DOUBLE_EQ(flat.statistic, 2.0);
  EXPECT_DOUBLE_EQ(flat.margin, 12.0);

  const CheckReport skip = check_quadruple(line({0.0}), line({1.0, 2.0}), line({2.0}), line({3.0}), 0.0);
  EXPECT_TRUE(skip.skipped);
  EXPECT_TRUE(skip.passed);
}

TEST(CheckQuadruple, PositiveCurvatureUsesTheFlatComparison) {
  const CheckReport pos = check_quadruple(line({0.0}), line({1.0}), line({2.0}), line({3.0}), 1.0);
  EXPECT_EQ(pos.params.at("effective_curvature"), 0.0);
  EXPECT_DOUBLE_EQ(pos.margin, 12.0);
}

TEST(CheckQuadruple, SidesForPositiveCurvature) {
  // Roles swap for K > 0: statistic (sum cos)^2, bound the nine-term cosine sum.
  const double d0[3] = {0.0, 0.0, 0.0};
  const double d[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  const QuadrupleSides s = quadruple_sides(d0, d, 1.0);
  EXPECT_EQ(s.statistic, 9.0);
  EXPECT_EQ(s.bound, 9.0);
}

TEST(CheckQuadruple, RandomHyperbolicQuadruples) {
  RandomStream rng(1);
  const SpaceForm h = SpaceForm::hyperbolic();
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 4;
    Configuration g[4] = {random_configuration(h, n, 2.0, rng), random_configuration(h, n, 2.0, rng),
                          random_configuration(h, n, 2.0, rng), random_configuration(h, n, 2.0, rng)};
    const CheckReport r = check_quadruple(g[0], g[1], g[2], g[3], -1.0);
    ASSERT_GE(r.margin, -1e-9);
  }
}

TEST(CheckQuadruple, ScaleCovarianceInTheFlatCase) {
  RandomStream rng(2);
  const SpaceForm e2 = SpaceForm::euclidean(2);
  for (int trial = 0; trial < 200; ++trial) {
    Configuration g[4] = {random_configuration(e2, 3, 2.0, rng), random_configuration(e2, 3, 2.0, rng),
                          random_configuration(e2, 3, 2.0, rng), random_configuration(e2, 3, 2.0, rng)};
    const double s = 0.1 + 3.0 * rng.uniform();
    const CheckReport a = check_quadruple(g[0], g[1], g[2], g[3], 0.0);
    const CheckReport b = check_quadruple(scaled(g[0], s), scaled(g[1], s), scaled(g[2], s), scaled(g[3], s), 0.0);
    ASSERT_NEAR(b.statistic, s * s * a.statistic, 1e-10 * std::max(1.0, b.statistic));
    ASSERT_NEAR(b.bound, s * s * a.bound, 1e-10 * std::max(1.0, b.bound));
    ASSERT_EQ(a.passed, b.passed);
  }
}

TEST(CheckBochner, Examples) {
  const SpaceForm e2 = SpaceForm::euclidean(2);
  const TestFunction phi{BasePoint{0.0, 0.0}, 1.0, 1.0};
  const Configuration g(e2, {BasePoint{0.2, 0.3}});
  const CheckReport r = check_bochner(single(phi), g);
  EXPECT_NEAR(r.margin, gamma2_cylinder(single(phi), g), 1e-15);
  EXPECT_GT(r.margin, 0.0);
  const CheckReport empty = check_bochner(single(phi), Configuration(e2));
  EXPECT_EQ(empty.margin, 0.0);
  EXPECT_TRUE(empty.passed);
}

TEST(CheckBochner, RandomInstancesOnEveryModel) {
  RandomStream rng(3);
  for (const auto& space : {SpaceForm::euclidean(2), SpaceForm::sphere(1.0), SpaceForm::hyperbolic()}) {
    for (int trial = 0; trial < 300; ++trial) {
      const CylinderFunction f = random_cylinder(space, 1 + trial % 3, 1.5, rng);
      const Configuration g = random_configuration(space, 1 + trial % 4, 1.5, rng);
      const CheckReport r = check_bochner(f, g);
      ASSERT_GE(r.margin, -1e-8) << space.name();
      ASSERT_TRUE(r.passed);
    }
  }
}

TEST(CheckBochner, MarginIsContinuousInTheConfiguration) {
  RandomStream rng(4);
  for (const auto& space : {SpaceForm::euclidean(2), SpaceForm::sphere(1.0), SpaceForm::hyperbolic()}) {
    for (int trial = 0; trial < 50; ++trial) {
      const CylinderFunction f = random_cylinder(space, 2, 1.0, rng);
      const Configuration g = random_configuration(space, 3, 1.0, rng);
      const Vector e = tangent_frame(space, g[0]).col(0);
      const Configuration h = g.with_point(0, exp_map(space, g[0], 1e-8 * e));
      const double m = check_bochner(f, g).margin;
      ASSERT_LT(std::abs(m - check_bochner(f, h).margin), 1e-5 * std::max(1.0, std::abs(m)));
    }
  }
}

TEST(CheckGradientEstimate, TrivialCases) {
  const SpaceForm e2 = SpaceForm::euclidean(2);
  const TestFunction phi{BasePoint{0.0, 0.0}, 1.0, 1.0};
  const Configuration g(e2, {BasePoint{0.3, 0.1}});
  const CheckReport zero = check_gradient_estimate(single(phi), g, 0.0, 100, 1);
  EXPECT_EQ(zero.statistic, gamma_cylinder(single(phi), g));
  EXPECT_EQ(zero.margin, 0.0);
  CylinderFunction c = single(phi);
  c.outer = OuterFunction::linear(Vector::Zero(1), 1.0);
  const CheckReport constant = check_gradient_estimate(c, g, 0.2, 100, 1);
  EXPECT_EQ(constant.statistic, 0.0);
  EXPECT_EQ(constant.bound, 0.0);
  EXPECT_TRUE(constant.passed);
}

TEST(CheckGradientEstimate, EuclideanSingleBump) {
  const SpaceForm e2 = SpaceForm::euclidean(2);
  const TestFunction phi{BasePoint{0.0, 0.0}, 1.0, 1.0};
  const Configuration g(e2, {BasePoint{0.3, 0.1}, BasePoint{-0.2, 0.5}});
  const CheckReport r = check_gradient_estimate(single(phi), g, 0.1, 100000, 7);
  EXPECT_GE(r.margin, -2.0 * *r.std_error);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.params.at("method"), "commuting_gradient");
}

TEST(CheckGradientEstimate, CurvedModelsWithCommonRandomNumbers) {
  RandomStream rng(5);
  for (const auto& space : {SpaceForm::sphere(1.0), SpaceForm::hyperbolic()}) {
    const CylinderFunction f = random_cylinder(space, 2, 0.8, rng);
    const Configuration g = random_configuration(space, 2, 0.8, rng);
    GradientEstimateOptions opts;
    opts.mc.antithetic = true;
    const CheckReport r = check_gradient_estimate(f, g, 0.05, 2000, 9, opts);
    EXPECT_TRUE(r.passed) << space.name() << " " << r.to_json().dump();
    EXPECT_EQ(r.params.at("method"), "crn_finite_difference");
  }
}

TEST(CheckContraction, EqualConfigurations) {
  const SpaceForm h = SpaceForm::hyperbolic();
  const Configuration g(h, {model_origin(h), hyperboloid_point(1.0)});
  const CheckReport r = check_contraction(g, g, 0.1, 50, 3);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(CheckContraction, EuclideanCouplingIsExact) {
  RandomStream rng(6);
  const SpaceForm e2 = SpaceForm::euclidean(2);
  const Configuration g = random_configuration(e2, 3, 2.0, rng), s = random_configuration(e2, 3, 2.0, rng);
  const CheckReport r = check_contraction(g, s, 0.5, 100, 4);
  EXPECT_NEAR(r.statistic, d_upsilon(g, s).distance(), 1e-12);
  EXPECT_NEAR(r.margin, 0.0, 1e-12);
  EXPECT_TRUE(r.passed);
}

TEST(CheckContraction, HyperbolicCoupled) {
  RandomStream rng(7);
  const SpaceForm h = SpaceForm::hyperbolic();
  const Configuration g = random_configuration(h, 3, 1.5, rng), s = random_configuration(h, 3, 1.5, rng);
  const CheckReport r = check_contraction(g, s, 0.05, 200, 8);
  EXPECT_LE(r.statistic, std::exp(0.05) * d_upsilon(g, s).distance() + 2.0 * *r.std_error);
  EXPECT_TRUE(r.passed);
}

// For one flat particle the synchronous coupling is optimal and the independent estimator is
// biased upward by convexity. With several particles the optimal coupling may swap labels, and
// on curved models parallel transport is not optimal, so independent sampling can come out lower.
TEST(CheckContraction, IndependentSamplingIsNotTighter) {
  RandomStream rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const SpaceForm space = SpaceForm::euclidean(2);
    const Configuration g = random_configuration(space, 1, 1.0, rng), s = random_configuration(space, 1, 1.0, rng);
    const CheckReport coupled = check_contraction(g, s, 0.1, 150, 9, ContractionMode::coupled);
    const CheckReport indep = check_contraction(g, s, 0.1, 150, 9, ContractionMode::independent);
    const double se = std::hypot(*coupled.std_error, *indep.std_error);
    EXPECT_GE(indep.statistic, coupled.statistic - 2.0 * se) << trial;
  }
}

TEST(CheckContraction, InfiniteDistanceSkips) {
  const CheckReport r = check_contraction(line({0.0}), line({0.0, 1.0}), 0.1, 10, 1);
  EXPECT_TRUE(r.skipped);
  EXPECT_TRUE(r.passed);
}

TEST(LogHarnack, Constant) {
  EXPECT_DOUBLE_EQ(log_harnack_constant(0.0, 0.5), 0.5);
  EXPECT_NEAR(log_harnack_constant(1e-12, 0.5), 0.5, 1e-12);
  EXPECT_NEAR(log_harnack_constant(-1.0, 0.1), -1.0 / (2.0 * (1.0 - std::exp(0.2))), 1e-15);
  // Continuity through K = 0.
  EXPECT_NEAR(log_harnack_constant(1e-7, 0.5), log_harnack_constant(-1e-7, 0.5), 1e-7);
  EXPECT_THROW(log_harnack_constant(1.0, 0.0), DomainError);
}

TEST(CheckLogHarnack, Examples) {
  const SpaceForm e1 = SpaceForm::euclidean(1);
  const Configuration g(e1, {BasePoint{0.0}}), s(e1, {BasePoint{1.0}});
  const CheckReport one = check_log_harnack(Functional::constant(1.0), g, s, 0.1, 100, 1);
  EXPECT_EQ(one.statistic, 0.0);
  EXPECT_NEAR(one.bound, log_harnack_constant(0.0, 0.1), 1e-15);

  const CylinderFunction f = single({BasePoint{0.3}, 1.0, 1.0});
  const CheckReport jensen = check_log_harnack(Functional::exp_cylinder(f), g, g, 0.1, 20000, 2);
  EXPECT_GE(jensen.margin, -2.0 * *jensen.std_error);
  EXPECT_TRUE(jensen.passed);

  const CheckReport sep = check_log_harnack(Functional::exp_cylinder(f), g, s, 0.1, 20000, 3);
  EXPECT_TRUE(sep.passed);
}

TEST(CheckLogHarnack, CurvedModels) {
  RandomStream rng(9);
  for (const auto& space : {SpaceForm::sphere(1.0), SpaceForm::hyperbolic()}) {
    const Functional f = Functional::exp_cylinder(random_cylinder(space, 2, 1.0, rng));
    const Configuration g = random_configuration(space, 2, 1.0, rng), s = random_configuration(space, 2, 1.0, rng);
    const CheckReport r = check_log_harnack(f, g, s, 0.1, 2000, 4);
    EXPECT_TRUE(r.passed) << space.name();
  }
}

TEST(CheckHj, ZeroFunctional) {
  const CheckReport r = check_hj(Functional::zero(), line({0.5}), {0.1, 0.101, 0.102});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.flags.empty());
}

TEST(CheckHj, AbsoluteValue) {
  const CheckReport r =
      check_hj(Functional::distance_sum(BasePoint{0.0}), line({1.5}), {0.1, 0.101, 0.102, 0.103, 0.104});
  EXPECT_LT(r.statistic, 1e-4);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.bound, 1e-3);
  EXPECT_THROW(check_hj(Functional::zero(), line({0.5}), {0.1, 0.2}), DomainError);
  EXPECT_THROW(check_hj(Functional::zero(), line({0.5}), {0.1, 0.3, 0.2}), DomainError);
}

TEST(CheckHj, NonConvergenceIsFlagged) {
  HopfLaxOptions opts;
  opts.max_sweeps = 1;
  opts.tolerance = 0.0;
  RandomStream rng(10);
  const SpaceForm e2 = SpaceForm::euclidean(2);
  const Functional f = Functional::cylinder(random_cylinder(e2, 2, 1.0, rng));
  const CheckReport r = check_hj(f, random_configuration(e2, 3, 1.0, rng), {0.5, 0.501, 0.502}, 1e-3, opts);
  ASSERT_EQ(r.flags.size(), 1u);
  EXPECT_EQ(r.flags[0], "hopf_lax_not_converged");
}

TEST(CheckHeatTail, Examples) {
  const SpaceForm e2 = SpaceForm::euclidean(2);
  const CheckReport zero = check_heat_tail(e2, 0.0, 1.0, 100, 0.5, 1);
  EXPECT_EQ(zero.statistic, 1.0);
  EXPECT_GT(zero.bound, 1.0);
  EXPECT_TRUE(zero.passed);

  const CheckReport chi = check_heat_tail(e2, 2.0, 1.0, 100000, 0.45, 2);
  const double p = std::exp(-4.0 / 4.0);  // P[chi^2_2 >= r^2 / (2t)]
  EXPECT_NEAR(chi.statistic, p, 3.0 * *chi.std_error);
  EXPECT_TRUE(chi.passed);
  EXPECT_THROW(check_heat_tail(e2, 1.0, 1.0, 10, 0.6, 1), DomainError);
}

TEST(WilsonStdError, Limits) {
  EXPECT_GT(wilson_std_error(0, 100), 0.0);
  EXPECT_NEAR(wilson_std_error(500, 1000), std::sqrt(0.25 / 1000), 1e-4);
  EXPECT_THROW(wilson_std_error(0, 0), DomainError);
}

TEST(CheckBishopGromov, Examples) {
  const CheckReport e = check_bishop_gromov(SpaceForm::euclidean(2), {1.0, 2.0, 5.0, 10.0});
  EXPECT_GT(e.margin, 0.0);
  EXPECT_NEAR(e.statistic, std::exp(-2.0), 1e-15);
  const CheckReport s = check_bishop_gromov(SpaceForm::sphere(1.0), {1.0, 2.0, 3.0, 10.0});
  EXPECT_TRUE(s.passed);
  const CheckReport h = check_bishop_gromov(SpaceForm::hyperbolic(), {1.0, 5.0, 50.0, 400.0});
  EXPECT_TRUE(h.passed);
  EXPECT_EQ(bishop_gromov_exponent(SpaceForm::hyperbolic()), 2.0);
  EXPECT_EQ(bishop_gromov_exponent(SpaceForm::euclidean(3)), 3.0);
}

TEST(Determinism, ReportsRepeatBitForBit) {
  RandomStream rng(11);
  const SpaceForm h = SpaceForm::hyperbolic();
  const Configuration g = random_configuration(h, 2, 1.0, rng), s = random_configuration(h, 2, 1.0, rng);
  auto strip = [](CheckReport r) {
    r.runtime_ms = 0;
    return r.to_json().dump();
  };
  EXPECT_EQ(strip(check_contraction(g, s, 0.1, 40, 5)), strip(check_contraction(g, s, 0.1, 40, 5)));
  McOptions par;
  par.workers = 3;
  EXPECT_EQ(strip(check_heat_tail(h, 0.5, 0.1, 500, 0.5, 6)), strip(check_heat_tail(h, 0.5, 0.1, 500, 0.5, 6, par)));
}
