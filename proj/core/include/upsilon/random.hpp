#pragma once

#include <cstdint>
#include <random>

namespace upsilon {

/// A seeded pseudo-random stream. Streams are never shared between workers;
/// independent streams are obtained with derive().
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Child stream number `index`; a pure function of (seed, index).
  RandomStream derive(std::uint64_t index) const;

  double uniform();  // [0, 1)
  double normal();   // standard normal
  std::uint64_t poisson(double mean);
  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace upsilon
