#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "upsilon/calculus.hpp"
#include "upsilon/configuration.hpp"
#include "upsilon/dynamics.hpp"
#include "upsilon/functional.hpp"
#include "upsilon/hopf_lax.hpp"

namespace upsilon {

inline constexpr const char* kReportSchema = "upsilon-lab/report/1";
/// One-sided z used wherever a Monte Carlo standard error is present.
inline constexpr double kReportZ = 2.0;

/// Outcome of one inequality check: statistic <= bound up to tolerance (and z standard
/// errors when the statistic is a Monte Carlo estimate). margin = bound - statistic.
struct CheckReport {
  std::string check_name;
  nlohmann::json params = nlohmann::json::object();
  double statistic = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  std::optional<double> std_error;
  bool passed = false;
  /// The inequality does not apply (e.g. infinite distance); counts as passed.
  bool skipped = false;
  std::vector<std::string> flags;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;

  nlohmann::json to_json() const;
  static CheckReport from_json(const nlohmann::json& j);
};

/// Fills margin and passed from statistic, bound, tolerance and std_error.
void finalize_report(CheckReport& report);
CheckReport skipped_report(std::string name, nlohmann::json params, std::string reason);

/// Four-point comparison of a metric of curvature >= K, with d0[i] = d(x0, x_{i+1}) and
/// d[i][j] = d(x_{i+1}, x_{j+1}). Returns bound - statistic as a report skeleton.
struct QuadrupleSides {
  double statistic = 0.0;
  double bound = 0.0;
};
QuadrupleSides quadruple_sides(const double d0[3], const double d[3][3], double curvature);

/// Quadruple comparison on the fiber of g0 with curvature bound min(K, 0).
CheckReport check_quadruple(const Configuration& g0, const Configuration& g1,
                            const Configuration& g2, const Configuration& g3, double curvature,
                            double tolerance = 1e-9);

/// Gamma_2(F) >= K Gamma(F) with K the Ricci constant of the base.
CheckReport check_bochner(const CylinderFunction& f, const Configuration& gamma,
                          double tolerance = 1e-8);

struct GradientEstimateOptions {
  McOptions mc;
  /// Step of the common-random-number finite differences on curved models.
  double fd_step = 1e-4;
};

/// Gamma(T_t F)(gamma) <= e^{-2Kt} T_t Gamma(F)(gamma).
CheckReport check_gradient_estimate(const CylinderFunction& f, const Configuration& gamma,
                                    double t, std::size_t n_samples, std::uint64_t seed,
                                    const GradientEstimateOptions& opts = {});

enum class ContractionMode { coupled, independent };

/// W_2(p_t(gamma, .), p_t(sigma, .)) <= e^{-Kt} d_Upsilon(gamma, sigma).
CheckReport check_contraction(const Configuration& gamma, const Configuration& sigma, double t,
                              std::size_t n_samples, std::uint64_t seed,
                              ContractionMode mode = ContractionMode::coupled,
                              const McOptions& mc = {});

/// Log-Harnack constant K / (2 (1 - e^{-2Kt})), equal to 1/(4t) at K = 0.
double log_harnack_constant(double k, double t);

/// T_t(log f)(gamma) <= log T_t f(sigma) + c_K(t) d_Upsilon^2(gamma, sigma), both sides
/// estimated from the same heat noise.
CheckReport check_log_harnack(const Functional& f, const Configuration& gamma,
                              const Configuration& sigma, double t, std::size_t n_samples,
                              std::uint64_t seed, const McOptions& mc = {});

/// Hamilton-Jacobi residual |d/dt Q_t f + |D Q_t f|^2 / 2| over the interior of t_grid.
CheckReport check_hj(const Functional& f, const Configuration& gamma,
                     const std::vector<double>& t_grid, double tolerance = 1e-3,
                     const HopfLaxOptions& opts = {});

/// Empirical P[d(x, X_t) >= r] from the model origin against heat_tail_bound.
CheckReport check_heat_tail(const SpaceForm& space, double r, double t, std::size_t n_samples,
                            double lambda, std::uint64_t seed, const McOptions& mc = {});

/// max over r of vol(B_r) / (vol(B_1) e^{c r}) <= 1.
CheckReport check_bishop_gromov(const SpaceForm& space, const std::vector<double>& r_grid);
double bishop_gromov_exponent(const SpaceForm& space);

/// Wilson score interval half-width-based standard error of a binomial frequency.
double wilson_std_error(std::size_t hits, std::size_t n);

}  // namespace upsilon
