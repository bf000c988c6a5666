#pragma once

#include <cstdint>
#include <random>

namespace ppdac {

/// Stream purposes. Separating data draws from noise draws keeps the
/// private data identical across noise-variance grid points, which pairs
/// Monte-Carlo trials for variance reduction.
enum class Draw : std::uint64_t {
  PrivateData = 1,
  Noise = 2,
  Jitter = 3,
  Graph = 4,
};

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the stream (master_seed, trial, purpose). Chained splitmix64
/// so that distinct inputs give statistically independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t trial, Draw purpose) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ trial);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

/// Deterministic random stream: mt19937_64 seeded via derive_seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t master_seed, std::uint64_t trial, Draw purpose)
      : engine_(derive_seed(master_seed, trial, purpose)) {}

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian(double stddev) {
    std::normal_distribution<double> d(0.0, 1.0);
    return stddev * d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ppdac
