#pragma once

#include <memory>
#include <nlohmann/json.hpp>
#include <vector>

#include "upsilon/configuration.hpp"

namespace upsilon {

/// Radial bump psi(u) = exp(1 - 1/(1 - u^2)) on [0, 1), zero beyond; psi(0) = 1.
double bump_profile(double u);
double bump_profile_d1(double u);
double bump_profile_d2(double u);

/// phi(x) = amplitude * psi(d(center, x) / radius), compactly supported in B(center, radius).
struct TestFunction {
  BasePoint center;
  double radius = 1.0;
  double amplitude = 1.0;
};

/// Second-order jet of a function at a point, in the coordinates of an orthonormal
/// tangent frame at that point.
struct Jet {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
  double laplacian = 0.0;
};

void validate_test_function(const SpaceForm& space, const TestFunction& phi);
double eval_test_function(const SpaceForm& space, const TestFunction& phi, const BasePoint& x);
/// Jet of phi at x in the given frame (columns of tangent_frame(space, x)).
Jet test_function_jet(const SpaceForm& space, const TestFunction& phi, const BasePoint& x,
                      const Matrix& frame);

enum class OuterKind { linear, product, power_saturated, tanh_composed, sum };

/// Smooth outer function g: R^n -> R from a fixed catalog with analytic first and
/// second derivatives.
class OuterFunction {
 public:
  /// offset + w . s
  static OuterFunction linear(Vector weights, double offset = 0.0);
  /// scale * prod_i s_i
  static OuterFunction product(int arity, double scale = 1.0);
  /// scale * u^p / (1 + saturation * u^p) with u = w . s; saturation = 0 is a pure power.
  static OuterFunction power_saturated(Vector weights, int power, double saturation,
                                       double scale = 1.0);
  /// scale * tanh(offset + w . s)
  static OuterFunction tanh_composed(Vector weights, double offset = 0.0, double scale = 1.0);
  /// sum_k coefficient_k * g_k(s restricted to the k-th block of slots)
  static OuterFunction sum(std::vector<std::pair<OuterFunction, double>> terms);

  OuterKind kind() const { return kind_; }
  int arity() const { return arity_; }

  double value(const Vector& s) const;
  Vector gradient(const Vector& s) const;
  Matrix hessian(const Vector& s) const;

  nlohmann::json to_json() const;
  static OuterFunction from_json(const nlohmann::json& j);

 private:
  OuterFunction() = default;
  // Scalar profile h(u) and derivatives for the kinds of the form h(w . s).
  void profile(double u, double& h, double& h1, double& h2) const;

  OuterKind kind_ = OuterKind::linear;
  int arity_ = 0;
  Vector weights_;
  double offset_ = 0.0;
  double scale_ = 1.0;
  int power_ = 1;
  double saturation_ = 0.0;
  std::vector<std::pair<OuterFunction, double>> terms_;
};

/// F(gamma) = g(<phi_1, gamma>, ..., <phi_n, gamma>).
struct CylinderFunction {
  OuterFunction outer = OuterFunction::linear(Vector());
  std::vector<TestFunction> inners;

  /// a F + b G, with the inner lists concatenated.
  static CylinderFunction combine(const CylinderFunction& f, double a, const CylinderFunction& g,
                                  double b);
};

void validate_cylinder(const SpaceForm& space, const CylinderFunction& f);

/// Pairings <phi_i, gamma> = sum over points of phi_i.
Vector pairings(const CylinderFunction& f, const Configuration& gamma);
double eval_cylinder(const CylinderFunction& f, const Configuration& gamma);
/// Gradient at every point of gamma, as ambient tangent vectors.
std::vector<Vector> grad_cylinder(const CylinderFunction& f, const Configuration& gamma);
/// Carre du champ Gamma(F)(gamma) = sum_{i,j} g_i g_j <Gamma(phi_i, phi_j), gamma>.
double gamma_cylinder(const CylinderFunction& f, const Configuration& gamma);
/// Bilinear Gamma(F, G) = sum over points of <grad F, grad G>.
double gamma_cylinder(const CylinderFunction& f, const CylinderFunction& g,
                      const Configuration& gamma);
/// Delta F = sum_i g_i <Delta phi_i, gamma> + sum_{i,j} g_ij <Gamma(phi_i, phi_j), gamma>.
double laplacian_cylinder(const CylinderFunction& f, const Configuration& gamma);
/// Iterated carre du champ via the three-group chain-rule expansion.
double gamma2_cylinder(const CylinderFunction& f, const Configuration& gamma);

nlohmann::json test_function_to_json(const TestFunction& phi);
TestFunction test_function_from_json(const nlohmann::json& j);
nlohmann::json cylinder_to_json(const CylinderFunction& f);
CylinderFunction cylinder_from_json(const nlohmann::json& j);

}  // namespace upsilon
