#include "upsilon/calculus.hpp"

#include <cmath>
#include <numbers>

#include "upsilon/errors.hpp"

namespace upsilon {

double bump_profile(double u) {
  u = std::abs(u);
  if (u >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

namespace {

// psi'(u) / u, smooth through u = 0.
double bump_d1_over_u(double u) {
  u = std::abs(u);
  if (u >= 1.0) return 0.0;
  const double s = 1.0 - u * u;
  return -2.0 * bump_profile(u) / (s * s);
}

// r * ct_K(r): r cot r-type factor of Hess r = ct_K(r) (g - dr (x) dr).
double radial_cotangent_factor(const SpaceForm& space, double r) {
  if (r < 1e-8) return 1.0;
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return 1.0;
    case SpaceKind::sphere2: {
      const double th = r / space.radius();
      return th * std::cos(th) / std::sin(th);
    }
    case SpaceKind::hyperbolic2:
      return r * std::cosh(r) / std::sinh(r);
  }
  return 1.0;
}

Vector frame_coordinates(const SpaceForm& space, const Matrix& frame, const Vector& v) {
  Vector c(frame.cols());
  for (Eigen::Index k = 0; k < frame.cols(); ++k) c[k] = tangent_inner(space, frame.col(k), v);
  return c;
}

struct PointJets {
  Matrix frame;
  std::vector<Jet> jets;  // one per inner; zero jet outside the support
  bool any_active = false;
};

std::vector<PointJets> collect_jets(const CylinderFunction& f, const Configuration& gamma,
                                    Vector* pairing_out) {
  const SpaceForm& space = gamma.space();
  const int dim = space.dim();
  const std::size_t n = f.inners.size();
  std::vector<PointJets> out(gamma.size());
  Vector p = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < gamma.size(); ++a) {
    PointJets& pj = out[a];
    pj.jets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (geodesic_distance(space, f.inners[i].center, gamma[a]) < f.inners[i].radius) pj.any_active = true;
    }
    if (pj.any_active) pj.frame = tangent_frame(space, gamma[a]);
    for (std::size_t i = 0; i < n; ++i) {
      if (pj.any_active) {
        pj.jets[i] = test_function_jet(space, f.inners[i], gamma[a], pj.frame);
      } else {
        pj.jets[i] = Jet{0.0, Vector::Zero(dim), Matrix::Zero(dim, dim), 0.0};
      }
      p[static_cast<Eigen::Index>(i)] += pj.jets[i].value;
    }
  }
  if (pairing_out != nullptr) *pairing_out = p;
  return out;
}

}  // namespace

double bump_profile_d1(double u) {
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return sign * std::abs(u) * bump_d1_over_u(u);
}

double bump_profile_d2(double u) {
  u = std::abs(u);
  if (u >= 1.0) return 0.0;
  const double s = 1.0 - u * u;
  const double psi = bump_profile(u);
  return -2.0 * psi / (s * s) + 4.0 * u * u * psi * (1.0 - 2.0 * s) / (s * s * s * s);
}

void validate_test_function(const SpaceForm& space, const TestFunction& phi) {
  validate_point(space, phi.center);
  if (!(phi.radius > 0.0) || !std::isfinite(phi.radius)) throw DomainError("bump radius must be positive");
  if (space.kind() == SpaceKind::sphere2 && phi.radius >= std::numbers::pi * space.radius()) {
    throw DomainError("bump support on the sphere must exclude the antipode of its center");
  }
  if (!std::isfinite(phi.amplitude)) throw DomainError("bump amplitude must be finite");
}

double eval_test_function(const SpaceForm& space, const TestFunction& phi, const BasePoint& x) {
  return phi.amplitude * bump_profile(geodesic_distance(space, phi.center, x) / phi.radius);
}

Jet test_function_jet(const SpaceForm& space, const TestFunction& phi, const BasePoint& x,
                      const Matrix& frame) {
  const int dim = space.dim();
  Jet jet{0.0, Vector::Zero(dim), Matrix::Zero(dim, dim), 0.0};
  const double r = geodesic_distance(space, phi.center, x);
  const double big_r = phi.radius;
  if (r >= big_r) return jet;
  const double u = r / big_r;
  const double a_r2 = phi.amplitude / (big_r * big_r);
  const double q = bump_d1_over_u(u);
  const double psi2 = bump_profile_d2(u);
  const double rct = radial_cotangent_factor(space, r);

  // r * grad r = -log_x(center).
  const Vector w = frame_coordinates(space, frame, -log_map(space, x, phi.center));
  jet.value = phi.amplitude * bump_profile(u);
  jet.gradient = a_r2 * q * w;
  if (r > 0.0) {
    const Vector nrm = w / r;
    const Matrix radial = nrm * nrm.transpose();
    jet.hessian = a_r2 * (psi2 * radial + q * rct * (Matrix::Identity(dim, dim) - radial));
  } else {
    jet.hessian = a_r2 * q * Matrix::Identity(dim, dim);
  }
  jet.laplacian = a_r2 * (psi2 + (dim - 1) * q * rct);
  return jet;
}

OuterFunction OuterFunction::linear(Vector weights, double offset) {
  OuterFunction g;
  g.kind_ = OuterKind::linear;
  g.arity_ = static_cast<int>(weights.size());
  g.weights_ = std::move(weights);
  g.offset_ = offset;
  return g;
}

OuterFunction OuterFunction::product(int arity, double scale) {
  if (arity < 1) throw DomainError("product outer function needs arity >= 1");
  OuterFunction g;
  g.kind_ = OuterKind::product;
  g.arity_ = arity;
  g.scale_ = scale;
  return g;
}

OuterFunction OuterFunction::power_saturated(Vector weights, int power, double saturation,
                                             double scale) {
  if (power < 1) throw DomainError("power must be a positive integer");
  if (saturation < 0.0) throw DomainError("saturation must be nonnegative");
  if (saturation > 0.0 && power % 2 != 0) throw DomainError("saturated powers must be even");
  OuterFunction g;
  g.kind_ = OuterKind::power_saturated;
  g.arity_ = static_cast<int>(weights.size());
  g.weights_ = std::move(weights);
  g.power_ = power;
  g.saturation_ = saturation;
  g.scale_ = scale;
  return g;
}

OuterFunction OuterFunction::tanh_composed(Vector weights, double offset, double scale) {
  OuterFunction g;
  g.kind_ = OuterKind::tanh_composed;
  g.arity_ = static_cast<int>(weights.size());
  g.weights_ = std::move(weights);
  g.offset_ = offset;
  g.scale_ = scale;
  return g;
}

OuterFunction OuterFunction::sum(std::vector<std::pair<OuterFunction, double>> terms) {
  OuterFunction g;
  g.kind_ = OuterKind::sum;
  for (const auto& t : terms) g.arity_ += t.first.arity();
  g.terms_ = std::move(terms);
  return g;
}

void OuterFunction::profile(double u, double& h, double& h1, double& h2) const {
  switch (kind_) {
    case OuterKind::linear:
      h = offset_ + u;
      h1 = 1.0;
      h2 = 0.0;
      return;
    case OuterKind::tanh_composed: {
      const double th = std::tanh(offset_ + u);
      h = scale_ * th;
      h1 = scale_ * (1.0 - th * th);
      h2 = scale_ * (-2.0 * th * (1.0 - th * th));
      return;
    }
    case OuterKind::power_saturated: {
      const int p = power_;
      const double up = std::pow(u, p);
      const double up1 = p >= 1 ? p * std::pow(u, p - 1) : 0.0;
      const double up2 = p >= 2 ? p * (p - 1) * std::pow(u, p - 2) : 0.0;
      const double den = 1.0 + saturation_ * up;
      // h = up / den
      h = scale_ * up / den;
      h1 = scale_ * up1 / (den * den);
      h2 = scale_ * (up2 / (den * den) - 2.0 * saturation_ * up1 * up1 / (den * den * den));
      return;
    }
    default:
      h = h1 = h2 = 0.0;
  }
}

double OuterFunction::value(const Vector& s) const {
  switch (kind_) {
    case OuterKind::product:
      return scale_ * s.prod();
    case OuterKind::sum: {
      double total = 0.0;
      Eigen::Index at = 0;
      for (const auto& [g, c] : terms_) {
        total += c * g.value(s.segment(at, g.arity()));
        at += g.arity();
      }
      return total;
    }
    default: {
      double h = 0.0, h1 = 0.0, h2 = 0.0;
      profile(weights_.dot(s), h, h1, h2);
      return h;
    }
  }
}

Vector OuterFunction::gradient(const Vector& s) const {
  switch (kind_) {
    case OuterKind::product: {
      Vector grad(arity_);
      for (int i = 0; i < arity_; ++i) {
        double prod = scale_;
        for (int k = 0; k < arity_; ++k) {
          if (k != i) prod *= s[k];
        }
        grad[i] = prod;
      }
      return grad;
    }
    case OuterKind::sum: {
      Vector grad(arity_);
      Eigen::Index at = 0;
      for (const auto& [g, c] : terms_) {
        grad.segment(at, g.arity()) = c * g.gradient(s.segment(at, g.arity()));
        at += g.arity();
      }
      return grad;
    }
    default: {
      double h = 0.0, h1 = 0.0, h2 = 0.0;
      profile(weights_.dot(s), h, h1, h2);
      return h1 * weights_;
    }
  }
}

Matrix OuterFunction::hessian(const Vector& s) const {
  switch (kind_) {
    case OuterKind::product: {
      Matrix hess = Matrix::Zero(arity_, arity_);
      for (int i = 0; i < arity_; ++i) {
        for (int j = 0; j < arity_; ++j) {
          if (i == j) continue;
          double prod = scale_;
          for (int k = 0; k < arity_; ++k) {
            if (k != i && k != j) prod *= s[k];
          }
          hess(i, j) = prod;
        }
      }
      return hess;
    }
    case OuterKind::sum: {
      Matrix hess = Matrix::Zero(arity_, arity_);
      Eigen::Index at = 0;
      for (const auto& [g, c] : terms_) {
        hess.block(at, at, g.arity(), g.arity()) = c * g.hessian(s.segment(at, g.arity()));
        at += g.arity();
      }
      return hess;
    }
    default: {
      double h = 0.0, h1 = 0.0, h2 = 0.0;
      profile(weights_.dot(s), h, h1, h2);
      return h2 * weights_ * weights_.transpose();
    }
  }
}

nlohmann::json OuterFunction::to_json() const {
  const std::vector<double> w(weights_.data(), weights_.data() + weights_.size());
  switch (kind_) {
    case OuterKind::linear:
      return {{"kind", "linear"}, {"weights", w}, {"offset", offset_}};
    case OuterKind::product:
      return {{"kind", "product"}, {"arity", arity_}, {"scale", scale_}};
    case OuterKind::power_saturated:
      return {{"kind", "power_saturated"}, {"weights", w},          {"power", power_},
              {"saturation", saturation_}, {"scale", scale_}};
    case OuterKind::tanh_composed:
      return {{"kind", "tanh"}, {"weights", w}, {"offset", offset_}, {"scale", scale_}};
    case OuterKind::sum: {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& [g, c] : terms_) terms.push_back({{"outer", g.to_json()}, {"coefficient", c}});
      return {{"kind", "sum"}, {"terms", terms}};
    }
  }
  return {};
}

namespace {

Vector json_vector(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

OuterFunction OuterFunction::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") return linear(json_vector(j.at("weights")), j.value("offset", 0.0));
    if (kind == "product") return product(j.at("arity").get<int>(), j.value("scale", 1.0));
    if (kind == "power_saturated") {
      return power_saturated(json_vector(j.at("weights")), j.at("power").get<int>(),
                             j.value("saturation", 0.0), j.value("scale", 1.0));
    }
    if (kind == "tanh") {
      return tanh_composed(json_vector(j.at("weights")), j.value("offset", 0.0), j.value("scale", 1.0));
    }
    if (kind == "sum") {
      std::vector<std::pair<OuterFunction, double>> terms;
      for (const auto& t : j.at("terms")) terms.emplace_back(from_json(t.at("outer")), t.value("coefficient", 1.0));
      return sum(std::move(terms));
    }
    throw ParseError("unknown outer function kind \"" + kind + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad outer function: ") + e.what());
  }
}

CylinderFunction CylinderFunction::combine(const CylinderFunction& f, double a,
                                           const CylinderFunction& g, double b) {
  CylinderFunction out{OuterFunction::sum({{f.outer, a}, {g.outer, b}}), f.inners};
  out.inners.insert(out.inners.end(), g.inners.begin(), g.inners.end());
  return out;
}

void validate_cylinder(const SpaceForm& space, const CylinderFunction& f) {
  if (static_cast<std::size_t>(f.outer.arity()) != f.inners.size()) {
    throw DomainError("outer function arity " + std::to_string(f.outer.arity()) + " does not match " +
                      std::to_string(f.inners.size()) + " inner test functions");
  }
  for (const auto& phi : f.inners) validate_test_function(space, phi);
}

Vector pairings(const CylinderFunction& f, const Configuration& gamma) {
  Vector p = Vector::Zero(static_cast<Eigen::Index>(f.inners.size()));
  for (const auto& x : gamma.points()) {
    for (std::size_t i = 0; i < f.inners.size(); ++i) {
      p[static_cast<Eigen::Index>(i)] += eval_test_function(gamma.space(), f.inners[i], x);
    }
  }
  return p;
}

double eval_cylinder(const CylinderFunction& f, const Configuration& gamma) {
  return f.outer.value(pairings(f, gamma));
}

std::vector<Vector> grad_cylinder(const CylinderFunction& f, const Configuration& gamma) {
  Vector p;
  const auto jets = collect_jets(f, gamma, &p);
  const Vector g1 = f.outer.gradient(p);
  std::vector<Vector> out;
  out.reserve(gamma.size());
  for (const auto& pj : jets) {
    if (!pj.any_active) {
      out.push_back(Vector::Zero(gamma.space().ambient_dim()));
      continue;
    }
    Vector local = Vector::Zero(gamma.space().dim());
    for (std::size_t i = 0; i < pj.jets.size(); ++i) local += g1[static_cast<Eigen::Index>(i)] * pj.jets[i].gradient;
    out.push_back(pj.frame * local);
  }
  return out;
}

double gamma_cylinder(const CylinderFunction& f, const Configuration& gamma) {
  Vector p;
  const auto jets = collect_jets(f, gamma, &p);
  const auto n = static_cast<Eigen::Index>(f.inners.size());
  Matrix big_gamma = Matrix::Zero(n, n);
  for (const auto& pj : jets) {
    if (!pj.any_active) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) big_gamma(i, j) += pj.jets[i].gradient.dot(pj.jets[j].gradient);
    }
  }
  const Vector g1 = f.outer.gradient(p);
  return g1.dot(big_gamma * g1);
}

double gamma_cylinder(const CylinderFunction& f, const CylinderFunction& g,
                      const Configuration& gamma) {
  const auto grad_f = grad_cylinder(f, gamma);
  const auto grad_g = grad_cylinder(g, gamma);
  double total = 0.0;
  for (std::size_t a = 0; a < gamma.size(); ++a) total += tangent_inner(gamma.space(), grad_f[a], grad_g[a]);
  return total;
}

double laplacian_cylinder(const CylinderFunction& f, const Configuration& gamma) {
  Vector p;
  const auto jets = collect_jets(f, gamma, &p);
  const auto n = static_cast<Eigen::Index>(f.inners.size());
  Matrix big_gamma = Matrix::Zero(n, n);
  Vector lap = Vector::Zero(n);
  for (const auto& pj : jets) {
    if (!pj.any_active) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      lap[i] += pj.jets[i].laplacian;
      for (Eigen::Index j = 0; j < n; ++j) big_gamma(i, j) += pj.jets[i].gradient.dot(pj.jets[j].gradient);
    }
  }
  const Vector g1 = f.outer.gradient(p);
  const Matrix g2 = f.outer.hessian(p);
  return g1.dot(lap) + (g2.cwiseProduct(big_gamma)).sum();
}

double gamma2_cylinder(const CylinderFunction& f, const Configuration& gamma) {
  Vector p;
  const auto jets = collect_jets(f, gamma, &p);
  const auto n = static_cast<Eigen::Index>(f.inners.size());
  const double ric = gamma.space().ricci_lower();

  // <Gamma(phi_i, phi_j), gamma>, <Gamma_2(phi_i, phi_j), gamma>, and
  // T(a, b, c) = <Gamma(phi_a, Gamma(phi_b, phi_c)), gamma>
  //            = sum_x grad phi_a . (Hess phi_b grad phi_c + Hess phi_c grad phi_b).
  Matrix big_gamma = Matrix::Zero(n, n);
  Matrix big_gamma2 = Matrix::Zero(n, n);
  std::vector<double> triple(static_cast<std::size_t>(n * n * n), 0.0);
  auto t_index = [n](Eigen::Index a, Eigen::Index b, Eigen::Index c) {
    return static_cast<std::size_t>((a * n + b) * n + c);
  };
  for (const auto& pj : jets) {
    if (!pj.any_active) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Jet& ji = pj.jets[i];
      for (Eigen::Index j = 0; j < n; ++j) {
        const Jet& jj = pj.jets[j];
        const double gij = ji.gradient.dot(jj.gradient);
        big_gamma(i, j) += gij;
        big_gamma2(i, j) += ji.hessian.cwiseProduct(jj.hessian).sum() + ric * gij;
      }
    }
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index c = 0; c < n; ++c) {
        // grad Gamma(phi_b, phi_c) at x
        const Vector gbc = pj.jets[b].hessian * pj.jets[c].gradient + pj.jets[c].hessian * pj.jets[b].gradient;
        for (Eigen::Index a = 0; a < n; ++a) triple[t_index(a, b, c)] += pj.jets[a].gradient.dot(gbc);
      }
    }
  }

  const Vector g1 = f.outer.gradient(p);
  const Matrix g2 = f.outer.hessian(p);

  const double first = g1.dot(big_gamma2 * g1);
  // sum_{ijkl} g_ik g_jl Gamma_ij Gamma_kl = tr(g2 Gamma g2 Gamma)
  const double second = (g2 * big_gamma * g2 * big_gamma).trace();
  double third = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        third += g1[i] * g2(j, k) * (2.0 * triple[t_index(j, i, k)] - triple[t_index(i, j, k)]);
      }
    }
  }
  return first + second + third;
}

nlohmann::json test_function_to_json(const TestFunction& phi) {
  return {{"center", std::vector<double>(phi.center.coords.data(), phi.center.coords.data() + phi.center.coords.size())},
          {"radius", phi.radius},
          {"amplitude", phi.amplitude}};
}

TestFunction test_function_from_json(const nlohmann::json& j) {
  try {
    return TestFunction{BasePoint(json_vector(j.at("center"))), j.at("radius").get<double>(),
                        j.value("amplitude", 1.0)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad test function: ") + e.what());
  }
}

nlohmann::json cylinder_to_json(const CylinderFunction& f) {
  nlohmann::json inners = nlohmann::json::array();
  for (const auto& phi : f.inners) inners.push_back(test_function_to_json(phi));
  return {{"outer", f.outer.to_json()}, {"inners", inners}};
}

CylinderFunction cylinder_from_json(const nlohmann::json& j) {
  try {
    CylinderFunction f{OuterFunction::from_json(j.at("outer")), {}};
    for (const auto& phi : j.at("inners")) f.inners.push_back(test_function_from_json(phi));
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad cylinder function: ") + e.what());
  }
}

}  // namespace upsilon
