#pragma once

#include <cmath>
#include <cstdint>

namespace ergopipe::gap {

// Sequential splitmix64 stream; cheap to fork per scene/epoch so results
// never depend on evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) {  // [0, n)
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  double normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  Rng fork(std::uint64_t stream) {
    return Rng(next_u64() ^ (stream * 0xD1B54A32D192ED03ULL));
  }

 private:
  std::uint64_t state_;
};

// Deterministic sub-stream derivation without consuming the parent.
inline Rng rng_for(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (stream + 1) * 0x9E3779B97F4A7C15ULL);
  r.next_u64();
  return r;
}

}  // namespace ergopipe::gap
