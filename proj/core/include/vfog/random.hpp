#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vfog {

// A random stream keyed by (seed, name, entity). Two streams with the same key
// produce the same sequence, and unrelated keys are decorrelated through a
// splitmix64 finalizer, so adding a new consumer never shifts the draws seen
// by existing ones.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view name, std::uint64_t entity = 0,
               std::uint64_t sub = 0);

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1]; safe to pass to log().
  double uniform_pos();
  double uniform(double lo, double hi);
  double exponential(double rate);
  // Number of Bernoulli(p) trials up to and including the first success.
  std::uint64_t geometric(double p);
  // Uniform integer on [0, n).
  std::uint64_t index(std::uint64_t n);

  std::uint64_t next_u64() { return engine_(); }

  static std::uint64_t derive_key(std::uint64_t seed, std::string_view name,
                                  std::uint64_t entity, std::uint64_t sub);

 private:
  std::mt19937_64 engine_;
};

}  // namespace vfog
