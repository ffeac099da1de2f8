#include "vfog/random.hpp"

#include <cmath>
#include <limits>

#include "vfog/error.hpp"

namespace vfog {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t RandomStream::derive_key(std::uint64_t seed, std::string_view name,
                                       std::uint64_t entity, std::uint64_t sub) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ fnv1a(name));
  h = splitmix64(h ^ entity);
  h = splitmix64(h ^ (sub * 0xd6e8feb86659fd93ULL));
  return h;
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view name, std::uint64_t entity,
                           std::uint64_t sub)
    : engine_(derive_key(seed, name, entity, sub)) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_pos() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RandomStream::exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidParameter("exponential rate must be positive");
  return -std::log(uniform_pos()) / rate;
}

std::uint64_t RandomStream::geometric(double p) {
  if (!(p > 0.0) || p > 1.0) throw InvalidParameter("geometric p must lie in (0, 1]");
  if (p == 1.0) return 1;
  // Inversion: floor(log U / log(1-p)) failures before the first success.
  const double failures = std::floor(std::log(uniform_pos()) / std::log1p(-p));
  if (failures >= static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    return std::numeric_limits<std::uint32_t>::max();
  }
  return static_cast<std::uint64_t>(failures) + 1;
}

std::uint64_t RandomStream::index(std::uint64_t n) {
  if (n == 0) throw InvalidParameter("index range must be non-empty");
  // Rejection sampling keeps the result exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace vfog
