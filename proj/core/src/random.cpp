#include "upsilon/random.hpp"

namespace upsilon {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RandomStream RandomStream::derive(std::uint64_t index) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double RandomStream::uniform() { return uniform_(engine_); }

double RandomStream::normal() { return normal_(engine_); }

std::uint64_t RandomStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

}  // namespace upsilon
