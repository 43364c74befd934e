#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace oa {

// Seeded RNG with explicit float mappings. std::uniform_real_distribution is
// implementation-defined, so the mappings are done by hand to keep
// seed -> sample sequences identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on (0,1), never exactly 0 or 1.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
  }

  // Standard Gumbel(0,1) noise.
  double gumbel() { return -std::log(-std::log(uniform01())); }

  // Uniform index in [0, n). n must be >= 1.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) {
      throw std::invalid_argument("uniform_index needs n >= 1");
    }
    auto idx = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return idx >= n ? n - 1 : idx;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace oa
