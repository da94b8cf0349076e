#ifndef FLOERLIB_RNG_HPP
#define FLOERLIB_RNG_HPP

#include "floerlib/rational.hpp"

#include <random>

namespace floerlib {

/// Deterministic seeded generator. Only engine draws are used (never
/// std::uniform_*_distribution) so sequences are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  long long range(long long lo, long long hi) {  // inclusive bounds
    return lo + static_cast<long long>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Rat rat(long long num_bound, long long den_bound) {
    long long d = range(1, den_bound);
    return Rat(range(-num_bound, num_bound), d);
  }

  bool coin() { return (eng_() & 1u) != 0; }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace floerlib

#endif
