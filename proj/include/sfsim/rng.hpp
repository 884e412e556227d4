#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace sfsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counter-based: the value for (seed, counter) does not depend on any other draw,
// so streams can be split by counter offset.
inline std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(splitmix64(seed) ^ (counter * 0xD1342543DE82EF95ull));
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(counter_bits(seed, counter) >> 11) * 0x1.0p-53;
}

// UniformRandomBitGenerator over the counter sequence, for <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  explicit CounterRng(std::uint64_t seed, std::uint64_t offset = 0)
      : seed_(seed), counter_(offset) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return counter_bits(seed_, counter_++); }
  double uniform() { return counter_uniform(seed_, counter_++); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

// `count` distinct uniform indices in [0, 2^n), reproducible from (n, count, seed).
std::vector<std::uint64_t> select_indices(int n, std::uint64_t count, std::uint64_t seed);

// `count` distinct uniform values in [0, space), ascending.
std::vector<std::uint64_t> select_subset(std::uint64_t space, std::uint64_t count,
                                         std::uint64_t seed);

}  // namespace sfsim
