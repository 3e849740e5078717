#pragma once

// Portable random streams. Every draw in the library goes through SplitMix64
// and the helpers below, never through <random> distributions, whose output
// is implementation-defined. Integer draws (permutations, index choices) are
// therefore bit-identical across platforms; real-valued draws additionally
// depend on the platform libm for log/sqrt/cos.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

namespace momlasso {

/// SplitMix64 (Steele, Lea, Flood 2014). Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t state_;
};

/// Order-sensitive hash of a seed with a stream/counter value.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  g();
  return g();
}

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, Rest... rest) noexcept {
  return derive_seed(derive_seed(seed, stream), static_cast<std::uint64_t>(rest)...);
}

/// Uniform on [0, 1) with 53 random bits.
template <typename Gen>
double uniform01(Gen& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection (no modulo bias).
template <typename Gen>
std::uint64_t uniform_below(Gen& g, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = g();
  } while (v >= limit);
  return v % bound;
}

/// Box-Muller, one variate per call.
template <typename Gen>
double standard_normal(Gen& g) {
  const double u1 = 1.0 - uniform01(g);  // (0, 1]
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Marsaglia-Tsang gamma(shape, 1).
template <typename Gen>
double standard_gamma(Gen& g, double shape) {
  if (shape < 1.0) {
    const double u = 1.0 - uniform01(g);
    return standard_gamma(g, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(g);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform01(g);
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

/// Student-t with nu degrees of freedom (unnormalized, variance nu/(nu-2)).
template <typename Gen>
double student_t(Gen& g, double nu) {
  const double z = standard_normal(g);
  const double chi2 = 2.0 * standard_gamma(g, 0.5 * nu);
  return z / std::sqrt(chi2 / nu);
}

template <typename Gen>
double rademacher(Gen& g) {
  return (g() >> 63) ? 1.0 : -1.0;
}

/// Fisher-Yates shuffle.
template <typename T, typename Gen>
void shuffle(std::span<T> values, Gen& g) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(g, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace momlasso
