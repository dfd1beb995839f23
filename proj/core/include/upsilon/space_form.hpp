#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "upsilon/random.hpp"

namespace upsilon {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class SpaceKind { euclidean, sphere2, hyperbolic2 };

/// A complete simply connected space of constant sectional curvature.
///
/// Points are stored in ambient coordinates: R^d for the Euclidean model, the
/// round sphere |x| = radius in R^3, and the upper sheet of the hyperboloid
/// <x,x>_{1,2} = -1 in Minkowski space R^{1,2}.
class SpaceForm {
 public:
  static SpaceForm euclidean(int dim);
  static SpaceForm sphere(double radius = 1.0);
  static SpaceForm hyperbolic();

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }
  int ambient_dim() const { return kind_ == SpaceKind::euclidean ? dim_ : 3; }

  /// Sectional curvature constant: 0, 1/radius^2 or -1.
  double sectional_curvature() const;
  /// Ricci lower bound K = (dim - 1) * sectional curvature.
  double ricci_lower() const { return (dim_ - 1) * sectional_curvature(); }

  std::string name() const;

  bool operator==(const SpaceForm&) const = default;

 private:
  SpaceForm(SpaceKind kind, int dim, double radius) : kind_(kind), dim_(dim), radius_(radius) {}

  SpaceKind kind_;
  int dim_;
  double radius_;
};

struct BasePoint {
  Vector coords;

  BasePoint() = default;
  explicit BasePoint(Vector c) : coords(std::move(c)) {}
  BasePoint(std::initializer_list<double> c);

  bool operator==(const BasePoint& other) const {
    return coords.size() == other.coords.size() && coords == other.coords;
  }
};

// Model plumbing.
bool is_valid_point(const SpaceForm& space, const BasePoint& x);
void validate_point(const SpaceForm& space, const BasePoint& x);
/// Nearest point on the model surface (renormalization).
BasePoint project_to_model(const SpaceForm& space, const Vector& ambient);
/// Canonical base point: 0, the north pole, or the hyperboloid vertex (1,0,0).
BasePoint model_origin(const SpaceForm& space);
/// Point of H^2 at distance s from the vertex along the first spatial axis.
BasePoint hyperboloid_point(double s, double angle = 0.0);
/// Point of the sphere at the given colatitude/longitude.
BasePoint sphere_point(const SpaceForm& space, double colatitude, double longitude);

/// Riemannian inner product of two tangent vectors at the same point.
double tangent_inner(const SpaceForm& space, const Vector& u, const Vector& v);
double tangent_norm(const SpaceForm& space, const Vector& v);
/// Orthogonal projection of an ambient vector onto T_x.
Vector project_tangent(const SpaceForm& space, const BasePoint& x, const Vector& v);
/// An orthonormal basis of T_x, one ambient vector per column.
Matrix tangent_frame(const SpaceForm& space, const BasePoint& x);

double geodesic_distance(const SpaceForm& space, const BasePoint& x, const BasePoint& y);
BasePoint exp_map(const SpaceForm& space, const BasePoint& x, const Vector& v);
/// Initial velocity of the unit-time geodesic from x to y; throws on antipodal pairs.
Vector log_map(const SpaceForm& space, const BasePoint& x, const BasePoint& y);
BasePoint geodesic_point(const SpaceForm& space, const BasePoint& x, const BasePoint& y, double s);
/// Parallel transport of v in T_x to T_y along the unique minimizing geodesic.
Vector parallel_transport(const SpaceForm& space, const BasePoint& x, const BasePoint& y,
                          const Vector& v);

struct HeatOptions {
  /// Step length of the geodesic random walk on curved models.
  double substep = 1e-3;
  /// Flip the sign of every Gaussian increment (antithetic partner path).
  bool negate = false;
};

/// Isotropic Gaussian tangent vector at x with the given variance per tangent coordinate.
Vector tangent_gaussian(const SpaceForm& space, const BasePoint& x, double variance,
                        RandomStream& rng);

/// One draw from the heat kernel p_t(x, .) of the generator Delta (variance 2t per
/// coordinate). Exact on R^d, a geodesic random walk on S^2 and H^2.
BasePoint heat_step(const SpaceForm& space, const BasePoint& x, double t, RandomStream& rng,
                    const HeatOptions& opts = {});

/// Number of random-walk substeps used for time t.
int heat_substeps(const SpaceForm& space, double t, const HeatOptions& opts);

/// Brownian-motion tail bound P[sup_{s<=t} d(B_s, x) >= r] <= ... with
/// Ricci >= -K_tilde, K_tilde = max(0, -ricci_lower).
double heat_tail_bound(const SpaceForm& space, double r, double t, double lambda);

/// Riemannian volume of a closed geodesic ball of radius r.
double ball_volume(const SpaceForm& space, double r);

/// Uniform point in the geodesic ball B(center, r).
BasePoint sample_uniform_ball(const SpaceForm& space, const BasePoint& center, double r,
                              RandomStream& rng);

nlohmann::json space_to_json(const SpaceForm& space);
SpaceForm space_from_json(const nlohmann::json& j);

}  // namespace upsilon
