#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace prt {

// Small deterministic generator (splitmix64). Every stochastic component of a
// run owns its own stream so that results do not depend on event interleaving.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  // Exponential with the given rate (events per unit time). A rate <= 0 means
  // the event never happens.
  double exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    double u = uniform01();
    return -std::log1p(-u) / rate;
  }

  // Triangular(lo, mode, hi) via inverse CDF; degenerate widths collapse to a
  // point mass.
  double triangular(double lo, double mode, double hi) {
    const double width = hi - lo;
    if (width <= 0.0) return lo;
    const double u = uniform01();
    const double cut = (mode - lo) / width;
    if (u < cut) return lo + std::sqrt(u * width * (mode - lo));
    return hi - std::sqrt((1.0 - u) * width * (hi - mode));
  }

 private:
  std::uint64_t state_;
};

// Stream derivation: hash (master, a, b) into an independent seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  Rng mix(master ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL));
  mix.next_u64();
  return mix.next_u64();
}

}  // namespace prt
