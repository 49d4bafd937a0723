#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace isoci {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Seeded random generator with hand-rolled distributions so that output
//! streams are stable across standard-library versions. Streams derived
//! from the same seed via stream() are independent counter-based
//! substreams: replication r always sees the same draws no matter how
//! many other replications ran before it.
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    engine_.seed(splitmix64(s));
  }

  //! Derives a fresh seed for a nested simulation layer (e.g. the
  //! bootstrap inside replication r); mixed differently from stream().
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t layer) {
    std::uint64_t s = seed ^ 0x1f123bb5159a55e5ULL;
    std::uint64_t a = splitmix64(s);
    s = layer + 0xd1b54a32d192ed03ULL;
    std::uint64_t b = splitmix64(s);
    return a ^ (b * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82bULL);
  }

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = stream_id ^ 0x5851f42d4c957f2dULL;
    std::uint64_t b = splitmix64(s);
    std::uint64_t mixed = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return Rng(mixed);
  }

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0, 1)
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  double exponential() { return -std::log1p(-uniform01()); }

  // Box-Muller, one spare cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace isoci
