#pragma once

#include <cstdint>
#include <random>

namespace vrfb {

/// mt19937_64 with a fixed bits-to-double mapping, so draws are identical
/// across standard library implementations (std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform on the open interval (lo, hi); redraws the endpoint.
  double uniform_open(double lo, double hi) {
    for (;;) {
      const double u = unit();
      if (u > 0.0) return lo + (hi - lo) * u;
    }
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vrfb
