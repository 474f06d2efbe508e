#include "lyapnet/verifier.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace lyapnet {

VerificationReport verify(const LyapunovNetwork& net, const DynamicalSystem& sys, const SamplingDomain& domain,
                          double pass_threshold) {
  if (!(pass_threshold >= 0.0 && pass_threshold <= 1.0)) {
    throw ConfigError("pass_threshold must lie in [0, 1]");
  }
  if (sys.dim() != domain.dim || net.input_dim() != domain.dim) {
    throw std::invalid_argument("verify: dimensions of network, system and domain differ");
  }
  VerificationReport rep;
  rep.requested_samples = sample_budget(domain);
  rep.samples_checked = std::min(rep.requested_samples, kMaxVerificationSamples);
  rep.pass_threshold = pass_threshold;
  rep.radius = domain.radius;
  rep.inner_radius = domain.inner_radius;
  rep.delta = domain.delta;
  rep.min_V = std::numeric_limits<double>::infinity();
  rep.max_Vdot = -std::numeric_limits<double>::infinity();

  Sampler sampler(domain);
  std::uint64_t positive = 0, negative = 0;
  // Chunked so memory stays bounded at the cap.
  constexpr std::uint64_t kChunk = 4096;
  for (std::uint64_t done = 0; done < rep.samples_checked;) {
    const auto n = static_cast<std::size_t>(std::min(kChunk, rep.samples_checked - done));
    for (const auto& x : sampler.sample_uniform(n)) {
      const double v = net.value(x);
      const double vd = net.vdot(sys, x);
      rep.min_V = std::min(rep.min_V, v);
      rep.max_Vdot = std::max(rep.max_Vdot, vd);
      positive += v > 0.0;
      negative += vd < 0.0;
    }
    done += n;
  }
  const double total = static_cast<double>(rep.samples_checked);
  rep.fraction_V_positive = static_cast<double>(positive) / total;
  rep.fraction_Vdot_negative = static_cast<double>(negative) / total;
  rep.pass = rep.fraction_V_positive >= pass_threshold && rep.fraction_Vdot_negative >= pass_threshold;
  return rep;
}

void export_grid(const LyapunovNetwork& net, const DynamicalSystem& sys, double r, int resolution,
                 const std::filesystem::path& path) {
  if (sys.dim() != 2 || net.input_dim() != 2) {
    throw std::invalid_argument("export_grid: unsupported dimension " + std::to_string(sys.dim()) +
                                " (grids are planar only)");
  }
  if (resolution < 2) throw std::invalid_argument("export_grid: resolution must be at least 2");
  if (!(r > 0)) throw std::invalid_argument("export_grid: radius must be positive");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open grid file for writing: " + path.string());
  out << "x1,x2,V,Vdot\n";
  char buf[160];
  const double step = 2.0 * r / static_cast<double>(resolution - 1);
  for (int i = 0; i < resolution; ++i) {
    const double x1 = i == resolution - 1 ? r : -r + step * i;
    for (int j = 0; j < resolution; ++j) {
      const double x2 = j == resolution - 1 ? r : -r + step * j;
      const State x{x1, x2};
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x1, x2, net.value(x), net.vdot(sys, x));
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("failed writing grid file: " + path.string());
}

}  // namespace lyapnet
