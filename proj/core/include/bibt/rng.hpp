#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bibt {

/// Derives a child seed from a master seed and a stream index. Used to give
/// every replication / chain / role its own decorrelated stream while keeping
/// the whole experiment a pure function of one master seed.
///
/// SplitMix64 finalizer over master + odd-constant * (stream + 1).
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded random stream. Every draw in the library goes through an explicitly
/// passed Rng; there is no global generator. Not safe to share across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// U[0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  double exponential() { return -std::log(1.0 - uniform()); }

  /// Gamma(shape, scale); mean = shape * scale.
  double gamma(double shape, double scale) {
    std::gamma_distribution<double> dist(shape, scale);
    return dist(engine_);
  }

  /// InverseGamma(shape a, scale b); density ~ x^{-a-1} exp(-b/x).
  double inverse_gamma(double shape, double scale) {
    return 1.0 / gamma(shape, 1.0 / scale);
  }

  long binomial(long trials, double p) {
    std::binomial_distribution<long> dist(trials, p);
    return dist(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace bibt
