#pragma once

#include <cstdint>
#include <random>

namespace lyapnet {

/// Portable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not (their algorithms are left to
/// the library vendor), so the real-valued draws below are derived from raw
/// engine words by hand. Given the same seed, every platform produces the
/// same stream of doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe to take a logarithm of.
  double uniform_open_low() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer, used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x);

/// Well-known stream identifiers. Each consumer of randomness in a run draws
/// from its own stream so that, e.g., changing the evaluation set size does
/// not perturb the training batches.
enum class Stream : std::uint64_t {
  kInit = 1,
  kTrainBatches = 2,
  kEvalSet = 3,
  kVerify = 4,
};

/// Seed for stream `stream` under root seed `root`.
std::uint64_t derive_seed(std::uint64_t root, Stream stream);

}  // namespace lyapnet
