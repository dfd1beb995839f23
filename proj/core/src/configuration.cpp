#include "upsilon/configuration.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "upsilon/assignment.hpp"
#include "upsilon/errors.hpp"
#include "upsilon/log.hpp"

namespace upsilon {

Region Region::ball(BasePoint center, double radius) {
  if (!(radius >= 0.0)) throw DomainError("region radius must be nonnegative");
  return Region(BallRegion{std::move(center), radius});
}

Region Region::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw DomainError("box corners differ in dimension");
  if ((upper.array() < lower.array()).any()) throw DomainError("box upper corner below lower corner");
  return Region(BoxRegion{std::move(lower), std::move(upper)});
}

bool Region::contains(const SpaceForm& space, const BasePoint& x) const {
  if (const auto* ball = std::get_if<BallRegion>(&shape_)) {
    return geodesic_distance(space, ball->center, x) <= ball->radius;
  }
  const auto& box = std::get<BoxRegion>(shape_);
  if (space.kind() != SpaceKind::euclidean) throw DomainError("box regions need a Euclidean space");
  return (x.coords.array() >= box.lower.array()).all() && (x.coords.array() <= box.upper.array()).all();
}

double Region::volume(const SpaceForm& space) const {
  if (const auto* ball = std::get_if<BallRegion>(&shape_)) {
    validate_point(space, ball->center);
    double r = ball->radius;
    if (space.kind() == SpaceKind::sphere2) r = std::min(r, std::numbers::pi * space.radius());
    return ball_volume(space, r);
  }
  const auto& box = std::get<BoxRegion>(shape_);
  if (space.kind() != SpaceKind::euclidean) throw DomainError("box regions need a Euclidean space");
  if (box.lower.size() != space.dim()) throw DomainError("box dimension does not match the space");
  return (box.upper - box.lower).prod();
}

BasePoint Region::sample_uniform(const SpaceForm& space, RandomStream& rng) const {
  if (const auto* ball = std::get_if<BallRegion>(&shape_)) {
    return sample_uniform_ball(space, ball->center, ball->radius, rng);
  }
  const auto& box = std::get<BoxRegion>(shape_);
  Vector p(box.lower.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * rng.uniform();
  }
  return BasePoint(std::move(p));
}

Configuration::Configuration(SpaceForm space, std::vector<BasePoint> points)
    : space_(space), points_(std::move(points)) {
  for (const auto& p : points_) validate_point(space_, p);
}

Configuration Configuration::unchecked(SpaceForm space, std::vector<BasePoint> points) {
  return Configuration(space, std::move(points), NoCheck{});
}

Configuration Configuration::with_point(std::size_t i, BasePoint p) const {
  std::vector<BasePoint> pts = points_;
  pts.at(i) = std::move(p);
  return Configuration(space_, std::move(pts));
}

Configuration Configuration::united(const Configuration& other) const {
  if (!(space_ == other.space_)) throw DomainError("cannot superpose configurations over different spaces");
  std::vector<BasePoint> pts = points_;
  pts.insert(pts.end(), other.points_.begin(), other.points_.end());
  return Configuration(space_, std::move(pts), NoCheck{});
}

bool multiset_equal(const Configuration& a, const Configuration& b, double tol) {
  if (!(a.space() == b.space()) || a.size() != b.size()) return false;
  const std::size_t n = a.size();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (geodesic_distance(a.space(), a[i], b[j]) <= tol) adjacency[i].push_back(j);
    }
  }
  return has_perfect_matching(adjacency, n);
}

Configuration sample_poisson(const SpaceForm& space, const Region& region, double intensity,
                             RandomStream& rng) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw DomainError("intensity must be positive");
  const double vol = region.volume(space);
  if (!std::isfinite(vol)) throw DomainError("region volume is not finite");
  const std::uint64_t count = rng.poisson(intensity * vol);
  std::vector<BasePoint> pts;
  pts.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) pts.push_back(region.sample_uniform(space, rng));
  return Configuration::unchecked(space, std::move(pts));
}

Configuration restrict(const Configuration& gamma, const Region& region) {
  std::vector<BasePoint> pts;
  for (const auto& p : gamma.points()) {
    if (region.contains(gamma.space(), p)) pts.push_back(p);
  }
  return Configuration::unchecked(gamma.space(), std::move(pts));
}

Configuration restrict_complement(const Configuration& gamma, const Region& region) {
  std::vector<BasePoint> pts;
  for (const auto& p : gamma.points()) {
    if (!region.contains(gamma.space(), p)) pts.push_back(p);
  }
  return Configuration::unchecked(gamma.space(), std::move(pts));
}

std::size_t count_ball(const Configuration& gamma, const BasePoint& center, double r) {
  std::size_t count = 0;
  for (const auto& p : gamma.points()) {
    if (geodesic_distance(gamma.space(), center, p) <= r) ++count;
  }
  return count;
}

double good_config_witness(const Configuration& gamma, const BasePoint& center, double alpha,
                           int r_max) {
  if (!(alpha > 0.0)) throw DomainError("growth exponent alpha must be positive");
  if (r_max < 1) throw DomainError("r_max must be a positive integer");
  if (alpha < 1.0) warn("good_config_witness: alpha < 1 is outside the usual growth class");
  std::vector<double> dist;
  dist.reserve(gamma.size());
  for (const auto& p : gamma.points()) dist.push_back(geodesic_distance(gamma.space(), center, p));
  double c = 0.0;
  for (int r = 1; r <= r_max; ++r) {
    std::size_t count = 0;
    for (double d : dist) count += d <= r ? 1 : 0;
    c = std::max(c, static_cast<double>(count) * std::exp(-alpha * r));
  }
  return c;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("cannot parse number \"" + std::string(s) + "\"");
  }
  return v;
}

constexpr std::string_view kSpacePrefix = "# space:";

}  // namespace

void write_configuration_csv(std::ostream& out, const Configuration& gamma) {
  out << kSpacePrefix << ' ' << space_to_json(gamma.space()).dump() << '\n';
  const int n = gamma.space().ambient_dim();
  for (int i = 0; i < n; ++i) out << (i ? "," : "") << 'x' << i;
  out << '\n';
  for (const auto& p : gamma.points()) {
    for (int i = 0; i < n; ++i) out << (i ? "," : "") << format_double(p.coords[i]);
    out << '\n';
  }
}

Configuration read_configuration_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kSpacePrefix, 0) != 0) {
    throw ParseError("configuration CSV must start with a '# space: {...}' header");
  }
  SpaceForm space = SpaceForm::euclidean(1);
  try {
    space = space_from_json(nlohmann::json::parse(line.substr(kSpacePrefix.size())));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad space header: ") + e.what());
  }
  if (!std::getline(in, line)) throw ParseError("configuration CSV is missing its column header");
  const int n = space.ambient_dim();
  std::vector<BasePoint> pts;
  std::size_t row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    Vector c(n);
    std::size_t start = 0;
    int col = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view field(line.data() + start,
                                   (comma == std::string::npos ? line.size() : comma) - start);
      if (col >= n) throw ParseError("row " + std::to_string(row) + " has too many columns");
      c[col++] = parse_double(field);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (col != n) throw ParseError("row " + std::to_string(row) + " has too few columns");
    pts.emplace_back(std::move(c));
  }
  return Configuration(space, std::move(pts));
}

nlohmann::json configuration_to_json(const Configuration& gamma) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : gamma.points()) {
    points.push_back(std::vector<double>(p.coords.data(), p.coords.data() + p.coords.size()));
  }
  return {{"space", space_to_json(gamma.space())}, {"points", points}};
}

Configuration configuration_from_json(const nlohmann::json& j) {
  try {
    const SpaceForm space = space_from_json(j.at("space"));
    std::vector<BasePoint> pts;
    for (const auto& row : j.at("points")) {
      const auto v = row.get<std::vector<double>>();
      pts.emplace_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return Configuration(space, std::move(pts));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad configuration JSON: ") + e.what());
  }
}

Configuration read_configuration_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    try {
      return configuration_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  return read_configuration_csv(in);
}

void write_configuration_file(const std::string& path, const Configuration& gamma) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    out << configuration_to_json(gamma).dump() << '\n';
  } else {
    write_configuration_csv(out, gamma);
  }
}

}  // namespace upsilon
