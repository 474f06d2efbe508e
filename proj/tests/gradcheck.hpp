#pragma once

// Finite-difference oracles for the network derivatives. Test-only; these
// deliberately go through value()/point_loss() and nothing else.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lyapnet/loss.hpp"
#include "lyapnet/net.hpp"
#include "lyapnet/rng.hpp"
#include "lyapnet/systems.hpp"

namespace lyapnet::testing {

/// |a - b| / max(|a|, |b|, floor). The floor turns the check into an
/// absolute one for coordinates that are essentially zero.
inline double rel_error(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline State fd_input_gradient(const LyapunovNetwork& net, const State& x, double h = 1e-5) {
  State g(x.size());
  State probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = net.value(probe);
    probe[i] = x[i] - h;
    const double down = net.value(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double mean_loss(const LyapunovNetwork& net, const DynamicalSystem& sys, const SampleBatch& batch,
                        const LossConfig& cfg) {
  double s = 0;
  for (const auto& x : batch) s += point_loss(net, sys, x, cfg);
  return s / static_cast<double>(batch.size());
}

inline ParamVector fd_loss_gradient(LyapunovNetwork net, const DynamicalSystem& sys, const SampleBatch& batch,
                                    const LossConfig& cfg, double h0 = 1e-6) {
  ParamVector theta = net.params();
  ParamVector g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    const double h = h0 * std::max(1.0, std::abs(saved));
    theta[i] = saved + h;
    net.set_params(theta);
    const double up = mean_loss(net, sys, batch, cfg);
    theta[i] = saved - h;
    net.set_params(theta);
    const double down = mean_loss(net, sys, batch, cfg);
    theta[i] = saved;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

/// True when some hinge argument sits within `band` of its kink, where the
/// loss is not differentiable and finite differences are meaningless.
inline bool near_kink(const LyapunovNetwork& net, const DynamicalSystem& sys, const SampleBatch& batch,
                      const LossConfig& cfg, double band = 1e-3) {
  for (const auto& x : batch) {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    const double scale = cfg.margin_mode == MarginMode::kStateScaled ? r2 : 1.0;
    if (std::abs(net.value(x) - cfg.m1 * scale) < band) return true;
    if (std::abs(net.vdot(sys, x) + cfg.m2 * scale) < band) return true;
  }
  return false;
}

struct GradientCase {
  LyapunovNetwork net;
  DynamicalSystem sys;
  SampleBatch batch;
  LossConfig cfg;
  std::string label;
};

inline std::vector<DynamicalSystem> gradient_check_systems() {
  std::vector<DynamicalSystem> out{
      DynamicalSystem::from_strings("d1_cubic", 1, {"-x1 + x1^3"}),
      DynamicalSystem::from_strings("d1_sine", 1, {"sin(x1) - 2*x1"}),
  };
  for (const auto& s : benchmark_systems()) out.push_back(s);
  return out;
}

/// Random architecture over poly2/poly3/tanh (plus linear), random weights,
/// random system of dimension 1..3, random batch and margins.
inline GradientCase random_gradient_case(Rng& rng) {
  static const std::vector<DynamicalSystem> systems = gradient_check_systems();
  const DynamicalSystem& sys = systems[rng.next_u64() % systems.size()];
  const Activation acts[] = {Activation::kPoly2, Activation::kPoly3, Activation::kTanh, Activation::kLinear};

  Architecture arch{sys.dim(), {}};
  const int depth = 1 + static_cast<int>(rng.next_u64() % 3);
  for (int k = 0; k < depth; ++k) {
    const int width = k + 1 == depth ? 1 : 1 + static_cast<int>(rng.next_u64() % 5);
    // Hidden layers draw from the smooth nonlinearities; the output layer may be anything.
    const Activation a = k + 1 == depth ? acts[rng.next_u64() % 4] : acts[rng.next_u64() % 3];
    arch.layers.push_back({width, a});
  }
  auto net = LyapunovNetwork::init(arch, rng.next_u64(), rng.uniform() < 0.7);
  ParamVector theta = net.params();
  for (auto& t : theta) t = rng.uniform(-1.2, 1.2);
  net.set_params(theta);

  SampleBatch batch;
  const int n = 1 + static_cast<int>(rng.next_u64() % 6);
  for (int i = 0; i < n; ++i) {
    State x(static_cast<std::size_t>(sys.dim()));
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    batch.push_back(x);
  }
  LossConfig cfg;
  cfg.m1 = rng.uniform(0.0, 0.3);
  cfg.m2 = rng.uniform(0.0, 0.3);
  cfg.margin_mode = rng.uniform() < 0.5 ? MarginMode::kConstant : MarginMode::kStateScaled;
  return {std::move(net), sys, std::move(batch), cfg,
          sys.name() + " " + format_layer_spec(arch.layers)};
}

struct GradientCheckResult {
  double worst_input = 0;
  double worst_param = 0;
  int cases = 0;
  int resampled = 0;
  bool saw_active_hinge = false;
};

/// Runs `cases` kink-free random configurations through both gradient checks.
inline GradientCheckResult run_gradient_checks(std::uint64_t seed, int cases) {
  Rng rng(seed);
  GradientCheckResult res;
  while (res.cases < cases) {
    GradientCase c = random_gradient_case(rng);
    if (near_kink(c.net, c.sys, c.batch, c.cfg)) {
      ++res.resampled;
      continue;
    }
    ++res.cases;
    for (const auto& x : c.batch) {
      const State g = c.net.input_gradient(x);
      const State fd = fd_input_gradient(c.net, x);
      for (std::size_t i = 0; i < g.size(); ++i) res.worst_input = std::max(res.worst_input, rel_error(g[i], fd[i]));
    }
    const ParamVector g = loss_param_gradient(c.net, c.sys, c.batch, c.cfg);
    const ParamVector fd = fd_loss_gradient(c.net, c.sys, c.batch, c.cfg);
    for (std::size_t i = 0; i < g.size(); ++i) {
      res.worst_param = std::max(res.worst_param, rel_error(g[i], fd[i]));
      res.saw_active_hinge = res.saw_active_hinge || g[i] != 0.0;
    }
  }
  return res;
}

}  // namespace lyapnet::testing
