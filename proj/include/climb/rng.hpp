#pragma once

#include <cstdint>
#include <cmath>

namespace climb {

// Counter-based generator built on splitmix64. Streams are derived by
// hashing indices into the master seed, so results do not depend on the
// order in which work units are executed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(mix_once(seed)) {}

  static std::uint64_t mix_once(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // Deterministic sub-stream: hash extra indices into the seed.
  template <typename... Idx>
  static CounterRng substream(std::uint64_t seed, Idx... idx) {
    std::uint64_t s = mix_once(seed);
    ((s = mix_once(s ^ (static_cast<std::uint64_t>(idx) + 0x9E3779B97F4A7C15ULL))), ...);
    CounterRng r(0);
    r.state_ = s;
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Marsaglia polar form would branch on rejection; Box-Muller keeps the
  // consumption pattern fixed (two uniforms per pair).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace climb
