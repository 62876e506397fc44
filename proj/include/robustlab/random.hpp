#pragma once

#include <cstdint>
#include <random>

namespace robustlab {

/// SplitMix64 finalizer over (seed, stream). Distinct stream indices give
/// statistically independent generators, so replication m always draws from
/// derive_seed(seed, m) no matter which thread runs it.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile. Acklam's rational approximation (relative error
/// below 1.2e-9) followed by one Halley step against erfc.
double normal_quantile(double p);

/// Portable random stream: mt19937_64 with distribution code owned here, so
/// draws are identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal by inversion.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace robustlab
