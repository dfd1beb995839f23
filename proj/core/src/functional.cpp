#include "upsilon/functional.hpp"

#include <cmath>

#include "upsilon/errors.hpp"

namespace upsilon {

Functional Functional::zero() { return Functional(); }

Functional Functional::constant(double c) {
  Functional f;
  f.kind_ = FunctionalKind::constant;
  f.constant_ = c;
  return f;
}

Functional Functional::distance_sum(BasePoint center, double weight) {
  Functional f;
  f.kind_ = FunctionalKind::distance_sum;
  f.center_ = std::move(center);
  f.weight_ = weight;
  return f;
}

Functional Functional::cylinder(CylinderFunction g) {
  Functional f;
  f.kind_ = FunctionalKind::cylinder;
  f.cylinder_ = std::move(g);
  return f;
}

Functional Functional::exp_cylinder(CylinderFunction g) {
  Functional f;
  f.kind_ = FunctionalKind::exp_cylinder;
  f.cylinder_ = std::move(g);
  return f;
}

double Functional::value(const Configuration& gamma) const {
  switch (kind_) {
    case FunctionalKind::zero:
      return 0.0;
    case FunctionalKind::constant:
      return constant_;
    case FunctionalKind::distance_sum: {
      double total = 0.0;
      for (const auto& x : gamma.points()) total += geodesic_distance(gamma.space(), center_, x);
      return weight_ * total;
    }
    case FunctionalKind::cylinder:
      return eval_cylinder(*cylinder_, gamma);
    case FunctionalKind::exp_cylinder:
      return std::exp(eval_cylinder(*cylinder_, gamma));
  }
  return 0.0;
}

std::vector<Vector> Functional::gradient(const Configuration& gamma) const {
  const SpaceForm& space = gamma.space();
  switch (kind_) {
    case FunctionalKind::distance_sum: {
      std::vector<Vector> out;
      out.reserve(gamma.size());
      for (const auto& x : gamma.points()) {
        const double r = geodesic_distance(space, center_, x);
        if (r == 0.0) {
          out.push_back(Vector::Zero(space.ambient_dim()));
        } else {
          out.push_back(-weight_ / r * log_map(space, x, center_));
        }
      }
      return out;
    }
    case FunctionalKind::cylinder:
      return grad_cylinder(*cylinder_, gamma);
    case FunctionalKind::exp_cylinder: {
      auto grads = grad_cylinder(*cylinder_, gamma);
      const double e = std::exp(eval_cylinder(*cylinder_, gamma));
      for (auto& g : grads) g *= e;
      return grads;
    }
    default:
      return std::vector<Vector>(gamma.size(), Vector::Zero(space.ambient_dim()));
  }
}

nlohmann::json Functional::to_json() const {
  switch (kind_) {
    case FunctionalKind::zero:
      return {{"kind", "zero"}};
    case FunctionalKind::constant:
      return {{"kind", "constant"}, {"value", constant_}};
    case FunctionalKind::distance_sum:
      return {{"kind", "distance_sum"},
              {"center", std::vector<double>(center_.coords.data(), center_.coords.data() + center_.coords.size())},
              {"weight", weight_}};
    case FunctionalKind::cylinder:
      return {{"kind", "cylinder"}, {"function", cylinder_to_json(*cylinder_)}};
    case FunctionalKind::exp_cylinder:
      return {{"kind", "exp_cylinder"}, {"function", cylinder_to_json(*cylinder_)}};
  }
  return {};
}

Functional Functional::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return zero();
    if (kind == "constant") return constant(j.at("value").get<double>());
    if (kind == "distance_sum") {
      const auto c = j.at("center").get<std::vector<double>>();
      return distance_sum(BasePoint(Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()))),
                          j.value("weight", 1.0));
    }
    if (kind == "cylinder") return cylinder(cylinder_from_json(j.at("function")));
    if (kind == "exp_cylinder") return exp_cylinder(cylinder_from_json(j.at("function")));
    throw ParseError("unknown functional kind \"" + kind + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad functional: ") + e.what());
  }
}

}  // namespace upsilon
