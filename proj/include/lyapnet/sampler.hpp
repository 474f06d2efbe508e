#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lyapnet/rng.hpp"
#include "lyapnet/systems.hpp"

namespace lyapnet {

enum class SamplingScheme { kUniform, kCenterConcentrated };

std::string_view to_string(SamplingScheme s);
SamplingScheme parse_sampling_scheme(std::string_view text);

/// The ball {x : inner_radius <= |x| <= radius} in `dim` dimensions, sampled
/// at resolution `delta`.
struct SamplingDomain {
  int dim = 2;
  double radius = 1.0;
  double delta = 0.02;
  SamplingScheme scheme = SamplingScheme::kUniform;
  double inner_radius = 0.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError on r <= 0, delta <= 0, delta > 2r, or r_in outside [0, r).
  void validate() const;
};

using SampleBatch = std::vector<State>;

inline constexpr double kMaxSampleBudget = 281474976710656.0;  // 2^48

/// ceil((2r / delta)^d). Throws ConfigError above 2^48.
std::uint64_t sample_budget(const SamplingDomain& domain);

/// Maps a radius and d-1 hyperspherical angles to Cartesian coordinates:
/// x1 = r cos(phi1), x2 = r sin(phi1) cos(phi2), ..., xd = r sin(phi1)...sin(phi_{d-1}).
State polar_to_cartesian(double radius, std::span<const double> angles);

/// Draws points from a SamplingDomain. Owns its RNG; one instance per thread.
class Sampler {
 public:
  explicit Sampler(SamplingDomain domain);
  Sampler(SamplingDomain domain, std::uint64_t seed);

  const SamplingDomain& domain() const { return domain_; }

  /// i.i.d. uniform in the shell: Gaussian direction, radius
  /// r (u (1 - q^d) + q^d)^(1/d) with q = r_in / r.
  SampleBatch sample_uniform(std::size_t count);

  /// Radius uniform on [r_in, r] and angles uniform on their ranges, so
  /// points concentrate near the center. For d = 1, x = +-radius.
  SampleBatch sample_polar(std::size_t count);

  /// Dispatches on domain().scheme.
  SampleBatch sample(std::size_t count);

 private:
  SamplingDomain domain_;
  Rng rng_;
};

}  // namespace lyapnet
