#pragma once

#include <cstdint>

#include "upsilon/configuration.hpp"
#include "upsilon/functional.hpp"

namespace upsilon {

enum class HopfLaxMethod {
  /// Riemannian gradient descent with Armijo backtracking on all points at once.
  gradient,
  /// Golden-section search along the tangent frame directions of one point at a time.
  coordinate,
};

struct HopfLaxOptions {
  /// gamma itself plus (starts - 1) Gaussian perturbations of scale sqrt(t).
  int starts = 8;
  /// Stop once a sweep lowers the objective by less than this.
  double tolerance = 1e-8;
  int max_sweeps = 500;
  std::uint64_t seed = 0;
  HopfLaxMethod method = HopfLaxMethod::gradient;
};

struct HopfLaxResult {
  double value = 0.0;
  Configuration minimizer{SpaceForm::euclidean(1)};
  bool converged = false;
  int sweeps = 0;
};

/// Q_t f(gamma) = inf over eta with |eta| = |gamma| of f(eta) + d_Upsilon^2(gamma, eta) / (2t).
///
/// Block-coordinate descent: re-match eta against gamma, then move the points of eta
/// with the matching held fixed. The returned value never exceeds f(gamma).
HopfLaxResult hopf_lax(const Functional& f, const Configuration& gamma, double t,
                       const HopfLaxOptions& opts = {});

}  // namespace upsilon
