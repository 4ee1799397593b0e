#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ewb {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named sub-streams derived from one run seed, so that samplers, checkers
/// and Monte Carlo estimates stay reproducible under any parallel layout.
enum class StreamId : std::uint64_t {
  Prior = 1,
  LossCenters = 2,
  Checker = 3,
  MonteCarlo = 4,
  BatchData = 5,
  Probe = 6,
  RiskMc = 7,
  Mixtures = 8,
};

inline std::uint64_t derive_seed(std::uint64_t seed, StreamId stream) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream) * 0x517cc1b727220a95ULL));
}

/// Deterministic random source. Uniform and normal variates are generated
/// with fixed algorithms (53-bit mantissa scaling, Box-Muller) instead of
/// std::uniform_real_distribution so that byte-identical outputs do not
/// depend on the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_(seed), gen_(splitmix64(splitmix64(seed))) {}

  /// Independent sub-stream; same (seed, id) always yields the same stream.
  Rng stream(StreamId id) const { return Rng(derive_seed(root_, id)); }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t root_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ewb
