#pragma once

#include <cstdint>
#include <filesystem>

#include "lyapnet/net.hpp"
#include "lyapnet/sampler.hpp"
#include "lyapnet/systems.hpp"

namespace lyapnet {

inline constexpr std::uint64_t kMaxVerificationSamples = 1'000'000;

struct VerificationReport {
  std::uint64_t samples_checked = 0;
  std::uint64_t requested_samples = 0;  // sample_budget before the cap
  double min_V = 0;
  double max_Vdot = 0;
  double fraction_V_positive = 0;
  double fraction_Vdot_negative = 0;
  double pass_threshold = 0.999;
  bool pass = false;
  double radius = 0;
  double inner_radius = 0;
  double delta = 0;

  bool capped() const { return requested_samples > samples_checked; }
};

/// Checks V(x) > 0 and V-dot(x) < 0 (strict, no margins) on
/// min(sample_budget(domain), 10^6) fresh uniform samples of the shell
/// r_in <= |x| <= r, drawn with domain.seed. Passes when both fractions reach
/// pass_threshold.
///
/// This is empirical evidence, not a proof. With r_in = 0 the origin itself
/// (where V = 0) has probability zero of being drawn.
VerificationReport verify(const LyapunovNetwork& net, const DynamicalSystem& sys, const SamplingDomain& domain,
                          double pass_threshold = 0.999);

/// Writes x1,x2,V,Vdot over a resolution x resolution grid on [-r, r]^2,
/// x1 varying slowest. Planar systems only.
void export_grid(const LyapunovNetwork& net, const DynamicalSystem& sys, double r, int resolution,
                 const std::filesystem::path& path);

}  // namespace lyapnet
