#include "upsilon/generators.hpp"

#include <algorithm>
#include <numbers>

#include "upsilon/errors.hpp"

namespace upsilon {

namespace {

double clamp_extent(const SpaceForm& space, double extent) {
  if (!(extent >= 0.0)) throw DomainError("extent must be nonnegative");
  if (space.kind() == SpaceKind::sphere2) return std::min(extent, std::numbers::pi * space.radius());
  return extent;
}

Vector normal_vector(int n, RandomStream& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

Configuration random_configuration(const SpaceForm& space, std::size_t n, double extent,
                                   RandomStream& rng) {
  const double r = clamp_extent(space, extent);
  const BasePoint origin = model_origin(space);
  std::vector<BasePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_uniform_ball(space, origin, r, rng));
  return Configuration::unchecked(space, std::move(pts));
}

TestFunction random_test_function(const SpaceForm& space, double extent, RandomStream& rng) {
  TestFunction phi;
  phi.center = sample_uniform_ball(space, model_origin(space), clamp_extent(space, extent), rng);
  phi.radius = 0.6 + rng.uniform();
  if (space.kind() == SpaceKind::sphere2) phi.radius = std::min(phi.radius, 0.9 * std::numbers::pi * space.radius());
  phi.amplitude = 0.5 + rng.uniform();
  return phi;
}

OuterFunction random_outer(int arity, RandomStream& rng) {
  if (arity < 1) throw DomainError("outer arity must be positive");
  switch (rng.next() % 5) {
    case 0:
      return OuterFunction::linear(normal_vector(arity, rng), rng.normal());
    case 1:
      return OuterFunction::product(arity, 0.5 + rng.uniform());
    case 2:
      return OuterFunction::power_saturated(normal_vector(arity, rng), 2, rng.uniform(), 0.5 + rng.uniform());
    case 3:
      return OuterFunction::tanh_composed(normal_vector(arity, rng), 0.5 * rng.normal(), 0.5 + rng.uniform());
    default: {
      if (arity == 1) return OuterFunction::power_saturated(normal_vector(1, rng), 2, 0.0, 1.0);
      const int left = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(arity - 1));
      OuterFunction a = OuterFunction::tanh_composed(normal_vector(left, rng), 0.0, 1.0);
      OuterFunction b = OuterFunction::power_saturated(normal_vector(arity - left, rng), 2, 0.5, 1.0);
      return OuterFunction::sum({{a, rng.normal()}, {b, rng.normal()}});
    }
  }
}

CylinderFunction random_cylinder(const SpaceForm& space, int inners, double extent,
                                 RandomStream& rng) {
  CylinderFunction f;
  for (int i = 0; i < inners; ++i) f.inners.push_back(random_test_function(space, extent, rng));
  f.outer = random_outer(inners, rng);
  return f;
}

}  // namespace upsilon
