#include "upsilon/space_form.hpp"

#include <cmath>
#include <numbers>

#include "upsilon/errors.hpp"

namespace upsilon {

namespace {

constexpr double kPointTolerance = 1e-12;

double minkowski(const Vector& u, const Vector& v) {
  return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

Vector cross3(const Vector& a, const Vector& b) {
  Vector c(3);
  c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
  return c;
}

void require_same_space(const SpaceForm& space, const BasePoint& x) {
  if (x.coords.size() != space.ambient_dim()) {
    throw InvalidPointError("point has " + std::to_string(x.coords.size()) +
                            " coordinates, expected " + std::to_string(space.ambient_dim()) +
                            " for " + space.name());
  }
}

}  // namespace

BasePoint::BasePoint(std::initializer_list<double> c) : coords(static_cast<Eigen::Index>(c.size())) {
  Eigen::Index i = 0;
  for (double v : c) coords[i++] = v;
}

SpaceForm SpaceForm::euclidean(int dim) {
  if (dim < 1) throw DomainError("euclidean dimension must be >= 1");
  return SpaceForm(SpaceKind::euclidean, dim, 1.0);
}

SpaceForm SpaceForm::sphere(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("sphere radius must be positive");
  return SpaceForm(SpaceKind::sphere2, 2, radius);
}

SpaceForm SpaceForm::hyperbolic() { return SpaceForm(SpaceKind::hyperbolic2, 2, 1.0); }

double SpaceForm::sectional_curvature() const {
  switch (kind_) {
    case SpaceKind::euclidean:
      return 0.0;
    case SpaceKind::sphere2:
      return 1.0 / (radius_ * radius_);
    case SpaceKind::hyperbolic2:
      return -1.0;
  }
  return 0.0;
}

std::string SpaceForm::name() const {
  switch (kind_) {
    case SpaceKind::euclidean:
      return "euclidean(" + std::to_string(dim_) + ")";
    case SpaceKind::sphere2:
      return "sphere2(" + std::to_string(radius_) + ")";
    case SpaceKind::hyperbolic2:
      return "hyperbolic2";
  }
  return "unknown";
}

bool is_valid_point(const SpaceForm& space, const BasePoint& x) {
  if (x.coords.size() != space.ambient_dim()) return false;
  if (!x.coords.allFinite()) return false;
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return true;
    case SpaceKind::sphere2: {
      const double rho = space.radius();
      return std::abs(x.coords.norm() - rho) <= kPointTolerance * std::max(1.0, rho);
    }
    case SpaceKind::hyperbolic2: {
      const double x0 = x.coords[0];
      return x0 > 0.0 &&
             std::abs(minkowski(x.coords, x.coords) + 1.0) <= kPointTolerance * std::max(1.0, x0 * x0);
    }
  }
  return false;
}

void validate_point(const SpaceForm& space, const BasePoint& x) {
  require_same_space(space, x);
  if (!is_valid_point(space, x)) throw InvalidPointError("point is not on the model surface of " + space.name());
}

BasePoint project_to_model(const SpaceForm& space, const Vector& ambient) {
  if (ambient.size() != space.ambient_dim()) throw InvalidPointError("wrong ambient dimension");
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return BasePoint(ambient);
    case SpaceKind::sphere2: {
      const double n = ambient.norm();
      if (n == 0.0) throw InvalidPointError("cannot project the origin onto the sphere");
      return BasePoint(ambient * (space.radius() / n));
    }
    case SpaceKind::hyperbolic2: {
      Vector p = ambient;
      p[0] = std::sqrt(1.0 + p[1] * p[1] + p[2] * p[2]);
      return BasePoint(std::move(p));
    }
  }
  return BasePoint(ambient);
}

BasePoint model_origin(const SpaceForm& space) {
  Vector o = Vector::Zero(space.ambient_dim());
  if (space.kind() == SpaceKind::sphere2) o[2] = space.radius();
  if (space.kind() == SpaceKind::hyperbolic2) o[0] = 1.0;
  return BasePoint(std::move(o));
}

BasePoint hyperboloid_point(double s, double angle) {
  return BasePoint{std::cosh(s), std::sinh(s) * std::cos(angle), std::sinh(s) * std::sin(angle)};
}

BasePoint sphere_point(const SpaceForm& space, double colatitude, double longitude) {
  const double rho = space.radius();
  return BasePoint{rho * std::sin(colatitude) * std::cos(longitude),
                   rho * std::sin(colatitude) * std::sin(longitude), rho * std::cos(colatitude)};
}

double tangent_inner(const SpaceForm& space, const Vector& u, const Vector& v) {
  return space.kind() == SpaceKind::hyperbolic2 ? minkowski(u, v) : u.dot(v);
}

double tangent_norm(const SpaceForm& space, const Vector& v) {
  return std::sqrt(std::max(0.0, tangent_inner(space, v, v)));
}

Vector project_tangent(const SpaceForm& space, const BasePoint& x, const Vector& v) {
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return v;
    case SpaceKind::sphere2: {
      const Vector n = x.coords / space.radius();
      return v - v.dot(n) * n;
    }
    case SpaceKind::hyperbolic2:
      return v + minkowski(v, x.coords) * x.coords;
  }
  return v;
}

Matrix tangent_frame(const SpaceForm& space, const BasePoint& x) {
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return Matrix::Identity(space.dim(), space.dim());
    case SpaceKind::sphere2: {
      const Vector n = x.coords.normalized();
      Eigen::Index k = 0;
      n.cwiseAbs().minCoeff(&k);
      Vector a = Vector::Zero(3);
      a[k] = 1.0;
      Vector e1 = (a - a.dot(n) * n).normalized();
      Vector e2 = cross3(n, e1);
      Matrix frame(3, 2);
      frame.col(0) = e1;
      frame.col(1) = e2;
      return frame;
    }
    case SpaceKind::hyperbolic2: {
      // Gram-Schmidt of the two spatial axes in the Minkowski metric; smooth on all of H^2.
      Vector a = Vector::Zero(3);
      a[1] = 1.0;
      Vector e1 = a + minkowski(a, x.coords) * x.coords;
      e1 /= std::sqrt(minkowski(e1, e1));
      Vector b = Vector::Zero(3);
      b[2] = 1.0;
      Vector e2 = b + minkowski(b, x.coords) * x.coords - minkowski(b, e1) * e1;
      e2 /= std::sqrt(minkowski(e2, e2));
      Matrix frame(3, 2);
      frame.col(0) = e1;
      frame.col(1) = e2;
      return frame;
    }
  }
  return Matrix();
}

double geodesic_distance(const SpaceForm& space, const BasePoint& x, const BasePoint& y) {
  validate_point(space, x);
  validate_point(space, y);
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return (x.coords - y.coords).norm();
    case SpaceKind::sphere2: {
      const double rho = space.radius();
      return rho * std::atan2(cross3(x.coords, y.coords).norm(), x.coords.dot(y.coords));
    }
    case SpaceKind::hyperbolic2: {
      // |x - y|_L = 2 sinh(d/2); stable for nearby points.
      const Vector diff = x.coords - y.coords;
      const double chord = std::sqrt(std::max(0.0, minkowski(diff, diff)));
      return 2.0 * std::asinh(0.5 * chord);
    }
  }
  return 0.0;
}

BasePoint exp_map(const SpaceForm& space, const BasePoint& x, const Vector& v) {
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return BasePoint(x.coords + v);
    case SpaceKind::sphere2: {
      const double rho = space.radius();
      const double len = v.norm();
      if (len == 0.0) return x;
      const double theta = len / rho;
      const Vector p = std::cos(theta) * x.coords + (rho * std::sin(theta) / len) * v;
      return BasePoint(p * (rho / p.norm()));
    }
    case SpaceKind::hyperbolic2: {
      const double len = std::sqrt(std::max(0.0, minkowski(v, v)));
      if (len == 0.0) return x;
      Vector p = std::cosh(len) * x.coords + (std::sinh(len) / len) * v;
      p[0] = std::sqrt(1.0 + p[1] * p[1] + p[2] * p[2]);
      return BasePoint(std::move(p));
    }
  }
  return x;
}

Vector log_map(const SpaceForm& space, const BasePoint& x, const BasePoint& y) {
  require_same_space(space, x);
  require_same_space(space, y);
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return y.coords - x.coords;
    case SpaceKind::sphere2: {
      const double rho = space.radius();
      const double dot = x.coords.dot(y.coords);
      const Vector u = y.coords - (dot / (rho * rho)) * x.coords;
      const double nu = u.norm();
      if (nu <= 1e-12 * rho) {
        if (dot > 0.0) return Vector::Zero(3);
        throw NonUniqueGeodesicError("antipodal points on the sphere have no unique geodesic");
      }
      return (geodesic_distance(space, x, y) / nu) * u;
    }
    case SpaceKind::hyperbolic2: {
      const Vector u = y.coords + minkowski(x.coords, y.coords) * x.coords;
      const double nu = std::sqrt(std::max(0.0, minkowski(u, u)));
      if (nu == 0.0) return Vector::Zero(3);
      return (geodesic_distance(space, x, y) / nu) * u;
    }
  }
  return Vector();
}

BasePoint geodesic_point(const SpaceForm& space, const BasePoint& x, const BasePoint& y, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("geodesic parameter must lie in [0, 1]");
  if (space.kind() == SpaceKind::euclidean) {
    require_same_space(space, x);
    require_same_space(space, y);
    if (s == 0.0) return x;
    if (s == 1.0) return y;
    return BasePoint((1.0 - s) * x.coords + s * y.coords);
  }
  const Vector v = log_map(space, x, y);
  if (s == 0.0) return x;
  if (s == 1.0) return y;
  return exp_map(space, x, s * v);
}

Vector parallel_transport(const SpaceForm& space, const BasePoint& x, const BasePoint& y,
                          const Vector& v) {
  if (x.coords == y.coords) return v;
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return v;
    case SpaceKind::sphere2: {
      const double rho = space.radius();
      const Vector a = x.coords / rho;
      const Vector b = y.coords / rho;
      const double denom = 1.0 + a.dot(b);
      if (denom <= 1e-12) throw NonUniqueGeodesicError("parallel transport between antipodal points");
      return v - (b.dot(v) / denom) * (a + b);
    }
    case SpaceKind::hyperbolic2: {
      const double denom = 1.0 - minkowski(x.coords, y.coords);
      return v + (minkowski(y.coords, v) / denom) * (x.coords + y.coords);
    }
  }
  return v;
}

Vector tangent_gaussian(const SpaceForm& space, const BasePoint& x, double variance,
                        RandomStream& rng) {
  const double sd = std::sqrt(variance);
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      Vector z(space.dim());
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
      return sd * z;
    }
    case SpaceKind::sphere2: {
      // Projection of an isotropic ambient Gaussian is isotropic in the tangent plane
      // and depends smoothly on x, which keeps common-random-number estimators smooth.
      Vector z(3);
      z << rng.normal(), rng.normal(), rng.normal();
      return sd * project_tangent(space, x, z);
    }
    case SpaceKind::hyperbolic2: {
      const Matrix frame = tangent_frame(space, x);
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      return sd * (z1 * frame.col(0) + z2 * frame.col(1));
    }
  }
  return Vector();
}

int heat_substeps(const SpaceForm& space, double t, const HeatOptions& opts) {
  if (space.kind() == SpaceKind::euclidean || t == 0.0) return 1;
  if (!(opts.substep > 0.0)) throw DomainError("heat substep must be positive");
  return std::max(1, static_cast<int>(std::ceil(t / opts.substep - 1e-12)));
}

BasePoint heat_step(const SpaceForm& space, const BasePoint& x, double t, RandomStream& rng,
                    const HeatOptions& opts) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("heat time must be nonnegative");
  if (t == 0.0) return x;
  const double sign = opts.negate ? -1.0 : 1.0;
  if (space.kind() == SpaceKind::euclidean) {
    return BasePoint(x.coords + sign * tangent_gaussian(space, x, 2.0 * t, rng));
  }
  const int steps = heat_substeps(space, t, opts);
  const double h = t / steps;
  BasePoint p = x;
  for (int k = 0; k < steps; ++k) {
    p = exp_map(space, p, sign * tangent_gaussian(space, p, 2.0 * h, rng));
  }
  return p;
}

double heat_tail_bound(const SpaceForm& space, double r, double t, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  if (!(t > 0.0)) throw DomainError("tail bound needs t > 0");
  if (!(r >= 0.0)) throw DomainError("tail bound needs r >= 0");
  const double d = space.dim();
  const double k_tilde = std::max(0.0, -space.ricci_lower());
  const double exponent =
      -lambda * r * r / (2.0 * t) + lambda * (2.0 * d + k_tilde * d * d * t) / (1.0 - lambda);
  return 2.0 / std::sqrt(1.0 - lambda) * std::exp(exponent);
}

double ball_volume(const SpaceForm& space, double r) {
  if (!(r >= 0.0)) throw DomainError("ball radius must be nonnegative");
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      const double d = space.dim();
      return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r, d);
    }
    case SpaceKind::sphere2: {
      const double rho = space.radius();
      if (r > std::numbers::pi * rho * (1.0 + 1e-15)) throw DomainError("ball radius exceeds pi * radius");
      const double s = std::sin(r / (2.0 * rho));
      return 4.0 * std::numbers::pi * rho * rho * s * s;
    }
    case SpaceKind::hyperbolic2: {
      const double s = std::sinh(r / 2.0);
      return 4.0 * std::numbers::pi * s * s;
    }
  }
  return 0.0;
}

BasePoint sample_uniform_ball(const SpaceForm& space, const BasePoint& center, double r,
                              RandomStream& rng) {
  if (!(r >= 0.0)) throw DomainError("ball radius must be nonnegative");
  if (space.kind() == SpaceKind::euclidean) {
    const int d = space.dim();
    Vector z(d);
    double n2 = 0.0;
    do {
      for (int i = 0; i < d; ++i) z[i] = rng.normal();
      n2 = z.squaredNorm();
    } while (n2 == 0.0);
    const double radius = r * std::pow(rng.uniform(), 1.0 / d);
    return BasePoint(center.coords + (radius / std::sqrt(n2)) * z);
  }
  // Polar coordinates with the exact inverse of the radial area distribution.
  const double u = rng.uniform();
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  double s = 0.0;
  if (space.kind() == SpaceKind::sphere2) {
    const double rho = space.radius();
    const double rr = std::min(r, std::numbers::pi * rho);
    s = 2.0 * rho * std::asin(std::min(1.0, std::sqrt(u) * std::sin(rr / (2.0 * rho))));
  } else {
    s = 2.0 * std::asinh(std::sqrt(u) * std::sinh(r / 2.0));
  }
  const Matrix frame = tangent_frame(space, center);
  const Vector v = s * (std::cos(angle) * frame.col(0) + std::sin(angle) * frame.col(1));
  return exp_map(space, center, v);
}

nlohmann::json space_to_json(const SpaceForm& space) {
  std::string kind;
  switch (space.kind()) {
    case SpaceKind::euclidean:
      kind = "euclidean";
      break;
    case SpaceKind::sphere2:
      kind = "sphere2";
      break;
    case SpaceKind::hyperbolic2:
      kind = "hyperbolic2";
      break;
  }
  return {{"kind", kind}, {"dim", space.dim()}, {"radius", space.radius()}};
}

SpaceForm space_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ParseError("space descriptor needs a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") {
    if (!j.contains("dim")) throw ParseError("euclidean space descriptor needs \"dim\"");
    return SpaceForm::euclidean(j.at("dim").get<int>());
  }
  if (j.contains("dim") && j.at("dim").get<int>() != 2) throw ParseError(kind + " has dim 2");
  if (kind == "sphere2") return SpaceForm::sphere(j.value("radius", 1.0));
  if (kind == "hyperbolic2") return SpaceForm::hyperbolic();
  throw ParseError("unknown space kind \"" + kind + "\"");
}

}  // namespace upsilon
