#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace chemid {

/// SplitMix64 finaliser; a good bijective mixer for 64-bit seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines several integers into one well-mixed seed. Order matters.
std::uint64_t combine_seeds(std::initializer_list<std::uint64_t> parts) noexcept;

/// Derives an independent stream seed from a root seed and a stage label,
/// e.g. derive_seed(root, "simulate/0.05").
std::uint64_t derive_seed(std::uint64_t root, std::string_view label) noexcept;

/// Thin wrapper over mt19937_64 whose derived draws are defined here rather
/// than by the standard library's distributions, so sequences are identical
/// across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal draw (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace chemid
