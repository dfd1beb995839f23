#pragma once

#include <cstddef>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <variant>
#include <vector>

#include "upsilon/random.hpp"
#include "upsilon/space_form.hpp"

namespace upsilon {

struct BallRegion {
  BasePoint center;
  double radius = 0.0;
};

/// Axis-aligned box; Euclidean spaces only.
struct BoxRegion {
  Vector lower;
  Vector upper;
};

/// A closed observation window.
class Region {
 public:
  static Region ball(BasePoint center, double radius);
  static Region box(Vector lower, Vector upper);

  bool contains(const SpaceForm& space, const BasePoint& x) const;
  double volume(const SpaceForm& space) const;
  BasePoint sample_uniform(const SpaceForm& space, RandomStream& rng) const;

  bool is_ball() const { return std::holds_alternative<BallRegion>(shape_); }
  const BallRegion& as_ball() const { return std::get<BallRegion>(shape_); }
  const BoxRegion& as_box() const { return std::get<BoxRegion>(shape_); }

 private:
  explicit Region(std::variant<BallRegion, BoxRegion> shape) : shape_(std::move(shape)) {}
  std::variant<BallRegion, BoxRegion> shape_;
};

/// A finite point configuration. Labels (the storage order) are bookkeeping only;
/// two configurations are the same element of the configuration space iff they agree
/// as multisets, see multiset_equal().
class Configuration {
 public:
  explicit Configuration(SpaceForm space, std::vector<BasePoint> points = {});

  /// Skips point validation; for points produced by the model maps themselves.
  static Configuration unchecked(SpaceForm space, std::vector<BasePoint> points);

  const SpaceForm& space() const { return space_; }
  const std::vector<BasePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const BasePoint& operator[](std::size_t i) const { return points_[i]; }

  Configuration with_point(std::size_t i, BasePoint p) const;
  /// Superposition (multiset sum).
  Configuration united(const Configuration& other) const;

 private:
  struct NoCheck {};
  Configuration(SpaceForm space, std::vector<BasePoint> points, NoCheck)
      : space_(space), points_(std::move(points)) {}

  SpaceForm space_;
  std::vector<BasePoint> points_;
};

bool multiset_equal(const Configuration& a, const Configuration& b, double tol = 1e-12);

/// Poisson point process of the given intensity (relative to Riemannian volume) in region.
Configuration sample_poisson(const SpaceForm& space, const Region& region, double intensity,
                             RandomStream& rng);

Configuration restrict(const Configuration& gamma, const Region& region);
Configuration restrict_complement(const Configuration& gamma, const Region& region);

std::size_t count_ball(const Configuration& gamma, const BasePoint& center, double r);

/// Smallest C with count_ball(gamma, center, r) <= C e^{alpha r} for r = 1..r_max.
/// alpha < 1 is allowed but reported through warn().
double good_config_witness(const Configuration& gamma, const BasePoint& center, double alpha,
                           int r_max);

// File formats.
void write_configuration_csv(std::ostream& out, const Configuration& gamma);
Configuration read_configuration_csv(std::istream& in);
nlohmann::json configuration_to_json(const Configuration& gamma);
Configuration configuration_from_json(const nlohmann::json& j);
/// JSON if the path ends in ".json", CSV otherwise.
Configuration read_configuration_file(const std::string& path);
void write_configuration_file(const std::string& path, const Configuration& gamma);

std::string format_double(double value);

}  // namespace upsilon
