#pragma once

#include <cstdint>
#include <random>

namespace pdmp {

/// Owned source of randomness for one replica.
///
/// Wraps a 64-bit Mersenne Twister whose output sequence is fixed by the
/// C++ standard, so a given seed produces the same draws on every platform.
/// Every continuous variate in the library is derived from `uniform_open()`
/// by inversion; nothing goes through `std::*_distribution`, whose algorithms
/// are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream `index` of family `tag` under `base_seed`. Replica streams are
  /// addressed this way so results do not depend on scheduling.
  static RandomStream indexed(std::uint64_t base_seed, std::uint64_t tag,
                              std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard exponential variate.
  double exp1();

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finaliser; used to derive well-separated seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace pdmp
