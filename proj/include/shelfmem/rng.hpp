#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace shelfmem {

/// Deterministic random source. All distribution mappings are implemented
/// here (rather than with std:: distributions, whose outputs are
/// implementation-defined) so that seeded results are reproducible across
/// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    const auto v = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * range) >> 64);
    return lo + static_cast<int>(v);
  }

  /// Triangular distribution on [lo, hi] with the given mode.
  double triangular(double lo, double mode, double hi) {
    const double u = uniform();
    const double fc = (mode - lo) / (hi - lo);
    if (u < fc) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
    return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
  }

  /// Independent stream derived from this generator's seed. Used to give
  /// parallel work items (scenes, candidate evaluations) stable substreams.
  Rng child(std::uint64_t stream) const { return Rng(mix(seed_, stream)); }

  std::uint64_t seed() const { return seed_; }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_;
};

}  // namespace shelfmem
