#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "upsilon/calculus.hpp"
#include "upsilon/configuration.hpp"

namespace upsilon {

enum class FunctionalKind { zero, constant, distance_sum, cylinder, exp_cylinder };

/// Functionals on configurations used by the semigroup, Hopf-Lax and Harnack checks.
///
///   zero, constant(c)
///   distance_sum(center, w):  w * sum_x d(center, x)        (Lipschitz, unbounded)
///   cylinder(F):              F(gamma)                       (bounded, smooth)
///   exp_cylinder(F):          exp(F(gamma))                  (positive, bounded)
class Functional {
 public:
  static Functional zero();
  static Functional constant(double c);
  static Functional distance_sum(BasePoint center, double weight = 1.0);
  static Functional cylinder(CylinderFunction f);
  static Functional exp_cylinder(CylinderFunction f);

  FunctionalKind kind() const { return kind_; }
  double value(const Configuration& gamma) const;
  double operator()(const Configuration& gamma) const { return value(gamma); }

  /// Per-point gradients as ambient tangent vectors. distance_sum uses the zero
  /// subgradient at its center.
  std::vector<Vector> gradient(const Configuration& gamma) const;

  const CylinderFunction* cylinder_function() const { return cylinder_ ? &*cylinder_ : nullptr; }

  nlohmann::json to_json() const;
  static Functional from_json(const nlohmann::json& j);

 private:
  Functional() = default;

  FunctionalKind kind_ = FunctionalKind::zero;
  double constant_ = 0.0;
  double weight_ = 1.0;
  BasePoint center_;
  std::optional<CylinderFunction> cylinder_;
};

}  // namespace upsilon
