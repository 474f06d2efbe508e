#include "lyapnet/sampler.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace lyapnet {

std::string_view to_string(SamplingScheme s) {
  return s == SamplingScheme::kUniform ? "uniform" : "center_concentrated";
}

SamplingScheme parse_sampling_scheme(std::string_view text) {
  if (text == "uniform") return SamplingScheme::kUniform;
  if (text == "center_concentrated" || text == "polar") return SamplingScheme::kCenterConcentrated;
  throw ConfigError("unknown sampling scheme '" + std::string(text) +
                    "' (expected uniform or center_concentrated)");
}

void SamplingDomain::validate() const {
  if (dim < 1) throw ConfigError("domain dimension must be positive");
  if (!(radius > 0) || !std::isfinite(radius)) throw ConfigError("domain radius must be positive");
  if (!(delta > 0) || !std::isfinite(delta)) throw ConfigError("domain delta must be positive");
  if (delta > 2.0 * radius) throw ConfigError("domain delta must not exceed 2 * radius");
  if (!(inner_radius >= 0) || !(inner_radius < radius)) {
    throw ConfigError("domain inner_radius must satisfy 0 <= inner_radius < radius");
  }
}

std::uint64_t sample_budget(const SamplingDomain& domain) {
  domain.validate();
  const double n = std::pow(2.0 * domain.radius / domain.delta, domain.dim);
  if (!(n <= kMaxSampleBudget)) {
    throw ConfigError("sample budget (2r/delta)^d = " + std::to_string(n) + " exceeds 2^48");
  }
  // Guard against pow() rounding an exact integer up by an ulp.
  const double nearest = std::round(n);
  if (std::abs(n - nearest) <= 1e-9 * nearest) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(n));
}

State polar_to_cartesian(double radius, std::span<const double> angles) {
  const std::size_t d = angles.size() + 1;
  State x(d);
  double sin_product = radius;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    x[i] = sin_product * std::cos(angles[i]);
    sin_product *= std::sin(angles[i]);
  }
  x[d - 1] = sin_product;
  return x;
}

Sampler::Sampler(SamplingDomain domain) : Sampler(domain, domain.seed) {}

Sampler::Sampler(SamplingDomain domain, std::uint64_t seed) : domain_(domain), rng_(seed) {
  domain_.validate();
}

SampleBatch Sampler::sample_uniform(std::size_t count) {
  const auto d = static_cast<std::size_t>(domain_.dim);
  const double dd = static_cast<double>(d);
  const double floor_mass = std::pow(domain_.inner_radius / domain_.radius, dd);
  SampleBatch batch;
  batch.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    State x(d);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& xi : x) {
        xi = rng_.normal();
        norm2 += xi * xi;
      }
    } while (norm2 == 0.0);
    const double u = rng_.uniform();
    const double rho = domain_.radius * std::pow(u * (1.0 - floor_mass) + floor_mass, 1.0 / dd);
    const double scale = rho / std::sqrt(norm2);
    for (auto& xi : x) xi *= scale;
    batch.push_back(std::move(x));
  }
  return batch;
}

SampleBatch Sampler::sample_polar(std::size_t count) {
  const auto d = static_cast<std::size_t>(domain_.dim);
  SampleBatch batch;
  batch.reserve(count);
  std::vector<double> angles(d > 1 ? d - 1 : 0);
  for (std::size_t k = 0; k < count; ++k) {
    const double rho = rng_.uniform(domain_.inner_radius, domain_.radius);
    if (d == 1) {
      batch.push_back({rng_.uniform() < 0.5 ? -rho : rho});
      continue;
    }
    for (std::size_t i = 0; i + 1 < angles.size(); ++i) angles[i] = rng_.uniform(0.0, std::numbers::pi);
    angles.back() = rng_.uniform(0.0, 2.0 * std::numbers::pi);
    batch.push_back(polar_to_cartesian(rho, angles));
  }
  return batch;
}

SampleBatch Sampler::sample(std::size_t count) {
  return domain_.scheme == SamplingScheme::kUniform ? sample_uniform(count) : sample_polar(count);
}

}  // namespace lyapnet
